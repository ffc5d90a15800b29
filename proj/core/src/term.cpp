#include "tabkit/term.hpp"

#include <array>
#include <atomic>
#include <cassert>
#include <mutex>
#include <stdexcept>
#include <string>

#include <boost/functional/hash.hpp>

namespace tabkit {

class TermNode {
 public:
  TermNode(TermKind k, bool g) : kind(k), ground(g) {}
  TermKind kind;
  bool ground;
};

namespace {

struct VarNode final : TermNode {
  explicit VarNode(std::uint64_t i) : TermNode(TermKind::Var, false), id(i) {}
  std::uint64_t id;
  mutable Term ref;
};

struct AtomNode final : TermNode {
  explicit AtomNode(Symbol s) : TermNode(TermKind::Atom, true), name(s) {}
  Symbol name;
};

struct IntNode final : TermNode {
  explicit IntNode(BigInt v) : TermNode(TermKind::Int, true), value(std::move(v)) {}
  BigInt value;
};

struct StructNode final : TermNode {
  StructNode(Symbol f, std::vector<Term> a, bool g)
      : TermNode(TermKind::Struct, g), functor(f), args(std::move(a)) {}
  Symbol functor;
  std::vector<Term> args;
};

struct LocalNode final : TermNode {
  explicit LocalNode(std::uint32_t i) : TermNode(TermKind::Local, false), index(i) {}
  std::uint32_t index;
};

const VarNode& as_var(const TermNode* n) { return *static_cast<const VarNode*>(n); }
const AtomNode& as_atom(const TermNode* n) { return *static_cast<const AtomNode*>(n); }
const IntNode& as_int(const TermNode* n) { return *static_cast<const IntNode*>(n); }
const StructNode& as_struct(const TermNode* n) { return *static_cast<const StructNode*>(n); }
const LocalNode& as_local(const TermNode* n) { return *static_cast<const LocalNode*>(n); }

// Symbol table: fixed-size chunks so readers never observe a reallocation.
constexpr std::size_t kChunkBits = 12;
constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
constexpr std::size_t kMaxChunks = 4096;

struct SymbolEntry {
  std::string name;
  Term atom;
};

struct SymbolTable {
  std::mutex mu;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::array<std::atomic<SymbolEntry*>, kMaxChunks> chunks{};
  std::uint32_t count = 0;

  SymbolEntry& entry(std::uint32_t id) {
    SymbolEntry* chunk = chunks[id >> kChunkBits].load(std::memory_order_acquire);
    return chunk[id & (kChunkSize - 1)];
  }
};

SymbolTable& symbols() {
  static SymbolTable* table = new SymbolTable;  // never destroyed
  return *table;
}

}  // namespace

Symbol Symbol::intern(std::string_view name) {
  SymbolTable& t = symbols();
  std::lock_guard lock(t.mu);
  auto add = [&t](std::string_view n) {
    std::uint32_t id = t.count;
    std::size_t chunk = id >> kChunkBits;
    if (chunk >= kMaxChunks) throw std::length_error("symbol table full");
    if (t.chunks[chunk].load(std::memory_order_relaxed) == nullptr)
      t.chunks[chunk].store(new SymbolEntry[kChunkSize], std::memory_order_release);
    SymbolEntry& e = t.entry(id);
    e.name = std::string(n);
    // Published to other threads only through the returned id.
    e.atom = Term(std::make_shared<AtomNode>(Symbol(id)));
    ++t.count;
    t.ids.emplace(e.name, id);
    return Symbol(id);
  };
  if (t.count == 0) add("");  // id 0 is the default-constructed Symbol
  auto it = t.ids.find(std::string(name));
  if (it != t.ids.end()) return Symbol(it->second);
  return add(name);
}

std::string_view Symbol::name() const { return symbols().entry(id_).name; }

namespace sym {
Symbol nil() { static const Symbol s = Symbol::intern("[]"); return s; }
Symbol dot() { static const Symbol s = Symbol::intern("."); return s; }
Symbol comma() { static const Symbol s = Symbol::intern(","); return s; }
Symbol semicolon() { static const Symbol s = Symbol::intern(";"); return s; }
Symbol var_marker() { static const Symbol s = Symbol::intern("$VAR"); return s; }
Symbol tuple() { static const Symbol s = Symbol::intern("$tuple"); return s; }
Symbol neck() { static const Symbol s = Symbol::intern(":-"); return s; }
Symbol true_() { static const Symbol s = Symbol::intern("true"); return s; }
Symbol fail() { static const Symbol s = Symbol::intern("fail"); return s; }
Symbol tabled_call() { static const Symbol s = Symbol::intern("tabled_call"); return s; }
}  // namespace sym

// ---------------------------------------------------------------------------
// Construction and access

Term Term::atom(Symbol name) { return symbols().entry(name.id()).atom; }

Term Term::integer(BigInt value) {
  return Term(std::make_shared<IntNode>(std::move(value)));
}

Term Term::integer(std::int64_t value) {
  static const std::vector<Term> small = [] {
    std::vector<Term> v;
    for (int i = -16; i <= 1024; ++i)
      v.push_back(Term(std::make_shared<IntNode>(BigInt(i))));
    return v;
  }();
  if (value >= -16 && value <= 1024) return small[static_cast<std::size_t>(value + 16)];
  return Term(std::make_shared<IntNode>(BigInt(value)));
}

Term Term::compound(Symbol functor, std::vector<Term> args) {
  if (args.empty()) return atom(functor);
  bool g = true;
  for (const Term& a : args) {
    assert(a && "compound argument must not be empty");
    if (!a.ground()) {
      g = false;
      break;
    }
  }
  return Term(std::make_shared<StructNode>(functor, std::move(args), g));
}

Term Term::local(std::uint32_t index) {
  return Term(std::make_shared<LocalNode>(index));
}

Term Term::list(std::span<const Term> items, Term tail) {
  Term out = tail ? std::move(tail) : atom(sym::nil());
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    out = compound(sym::dot(), {*it, out});
  return out;
}

TermKind Term::kind() const noexcept { return node_->kind; }
bool Term::ground() const noexcept { return node_->ground; }

Symbol Term::name() const {
  switch (node_->kind) {
    case TermKind::Atom: return as_atom(node_.get()).name;
    case TermKind::Struct: return as_struct(node_.get()).functor;
    default: throw std::logic_error("name() of non-callable term");
  }
}

std::size_t Term::arity() const noexcept {
  return node_->kind == TermKind::Struct ? as_struct(node_.get()).args.size() : 0;
}

const Term& Term::arg(std::size_t i) const { return as_struct(node_.get()).args.at(i); }

std::span<const Term> Term::args() const {
  if (node_->kind != TermKind::Struct) return {};
  return as_struct(node_.get()).args;
}

const BigInt& Term::int_value() const {
  if (node_->kind != TermKind::Int) throw std::logic_error("int_value() of non-integer");
  return as_int(node_.get()).value;
}

std::uint64_t Term::var_id() const {
  if (node_->kind != TermKind::Var) throw std::logic_error("var_id() of non-variable");
  return as_var(node_.get()).id;
}

std::uint32_t Term::local_index() const {
  if (node_->kind != TermKind::Local) throw std::logic_error("local_index() of non-local");
  return as_local(node_.get()).index;
}

// ---------------------------------------------------------------------------
// Bindings

Bindings::~Bindings() = default;

Term Bindings::fresh_var() { return Term(std::make_shared<VarNode>(next_id_++)); }

void Bindings::bind(const Term& var, Term value) {
  const VarNode& v = as_var(var.node());
  assert(!v.ref && "binding an already bound variable");
  v.ref = std::move(value);
  trail_.push_back(var);
}

void Bindings::undo_to(Checkpoint mark) {
  while (trail_.size() > mark) {
    as_var(trail_.back().node()).ref = Term();
    trail_.pop_back();
  }
}

Term deref(Term t) {
  while (t.node_->kind == TermKind::Var) {
    const Term& r = as_var(t.node_.get()).ref;
    if (!r) break;
    t = r;
  }
  return t;
}

Term binding_of(const Term& var) { return as_var(var.node()).ref; }

// ---------------------------------------------------------------------------
// Unification

bool occurs_in(const Term& var, const Term& t) {
  Term d = deref(t);
  if (d.ground()) return false;
  switch (d.kind()) {
    case TermKind::Var: return d.same(var);
    case TermKind::Struct:
      for (const Term& a : d.args())
        if (occurs_in(var, a)) return true;
      return false;
    default: return false;
  }
}

namespace {

bool bind_checked(const Term& var, const Term& value, Bindings& s) {
  if (value.is_struct() && !value.ground() && occurs_in(var, value)) return false;
  s.bind(var, value);
  return true;
}

bool unify_rec(const Term& a0, const Term& b0, Bindings& s) {
  Term a = deref(a0);
  Term b = deref(b0);
  for (;;) {
    if (a.same(b)) return true;
    if (a.is_var()) {
      if (b.is_var()) {
        // Bind the younger variable to the older one.
        if (a.var_id() < b.var_id()) {
          s.bind(b, a);
        } else {
          s.bind(a, b);
        }
        return true;
      }
      return bind_checked(a, b, s);
    }
    if (b.is_var()) return bind_checked(b, a, s);
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case TermKind::Atom: return a.name() == b.name();
      case TermKind::Int: return a.int_value() == b.int_value();
      case TermKind::Struct: {
        if (a.name() != b.name() || a.arity() != b.arity()) return false;
        auto xs = a.args();
        auto ys = b.args();
        std::size_t n = xs.size();
        for (std::size_t i = 0; i + 1 < n; ++i)
          if (!unify_rec(xs[i], ys[i], s)) return false;
        // Iterate on the last argument so long lists do not recurse.
        Term na = deref(xs[n - 1]);
        Term nb = deref(ys[n - 1]);
        a = std::move(na);
        b = std::move(nb);
        continue;
      }
      default: throw std::logic_error("unify: unexpected term kind");
    }
  }
}

}  // namespace

bool unify(const Term& a, const Term& b, Bindings& s) {
  auto mark = s.checkpoint();
  if (unify_rec(a, b, s)) return true;
  s.undo_to(mark);
  return false;
}

// ---------------------------------------------------------------------------
// Traversals

Term resolve(const Term& t) {
  if (t.ground()) return t;
  Term d = deref(t);
  if (d.kind() != TermKind::Struct || d.ground()) return d;
  auto args = d.args();
  std::vector<Term> out;
  bool changed = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Term r = resolve(args[i]);
    if (!changed && !r.same(args[i])) {
      changed = true;
      out.reserve(args.size());
      out.assign(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (changed) out.push_back(std::move(r));
  }
  if (!changed) return d;
  return Term::compound(d.name(), std::move(out));
}

namespace {

void collect_vars(const Term& t, std::vector<Term>& out) {
  Term d = deref(t);
  if (d.ground()) return;
  if (d.is_var()) {
    for (const Term& v : out)
      if (v.same(d)) return;
    out.push_back(d);
    return;
  }
  if (d.is_struct())
    for (const Term& a : d.args()) collect_vars(a, out);
}

}  // namespace

std::vector<Term> term_variables(const Term& t) {
  std::vector<Term> out;
  collect_vars(t, out);
  return out;
}

bool structurally_equal(const Term& a, const Term& b) {
  if (a.same(b)) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Var: return false;
    case TermKind::Atom: return a.name() == b.name();
    case TermKind::Int: return a.int_value() == b.int_value();
    case TermKind::Local: return a.local_index() == b.local_index();
    case TermKind::Struct: {
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      auto xs = a.args();
      auto ys = b.args();
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (!structurally_equal(xs[i], ys[i])) return false;
      return true;
    }
  }
  return false;
}

std::size_t structural_hash(const Term& t) {
  std::size_t h = static_cast<std::size_t>(t.kind()) * 0x9e3779b97f4a7c15ULL;
  switch (t.kind()) {
    case TermKind::Var: boost::hash_combine(h, t.var_id()); break;
    case TermKind::Atom: boost::hash_combine(h, t.name().id()); break;
    case TermKind::Int: boost::hash_combine(h, boost::multiprecision::hash_value(t.int_value())); break;
    case TermKind::Local: boost::hash_combine(h, t.local_index()); break;
    case TermKind::Struct:
      boost::hash_combine(h, t.name().id());
      boost::hash_combine(h, t.arity());
      for (const Term& a : t.args()) boost::hash_combine(h, structural_hash(a));
      break;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Variant classes

namespace {

struct Numbering {
  std::vector<const TermNode*> seen;
  std::unordered_map<const TermNode*, std::uint32_t> big;

  std::uint32_t index_of(const Term& v) {
    if (big.empty() && seen.size() < 16) {
      for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] == v.node()) return static_cast<std::uint32_t>(i);
      seen.push_back(v.node());
      return static_cast<std::uint32_t>(seen.size() - 1);
    }
    if (big.empty())
      for (std::size_t i = 0; i < seen.size(); ++i)
        big.emplace(seen[i], static_cast<std::uint32_t>(i));
    auto [it, inserted] = big.emplace(v.node(), static_cast<std::uint32_t>(big.size()));
    return it->second;
  }
  std::uint32_t count() const {
    return static_cast<std::uint32_t>(big.empty() ? seen.size() : big.size());
  }
};

Term number_vars(const Term& t, Numbering& n) {
  if (t.ground()) return t;
  Term d = deref(t);
  if (d.ground()) return d;
  if (d.is_var()) {
    std::uint32_t i = n.index_of(d);
    return Term::compound(sym::var_marker(), {Term::integer(static_cast<std::int64_t>(i))});
  }
  if (d.is_local()) throw std::logic_error("variant_key of a clause template");
  auto args = d.args();
  std::vector<Term> out;
  out.reserve(args.size());
  for (const Term& a : args) out.push_back(number_vars(a, n));
  return Term::compound(d.name(), std::move(out));
}

bool is_marker(const Term& t) {
  return t.is_struct() && t.arity() == 1 && t.name() == sym::var_marker() &&
         t.arg(0).is_int();
}

Term unnumber(const Term& t, std::vector<Term>& env, Bindings& s) {
  if (!t.is_struct()) return t;
  if (is_marker(t)) {
    auto i = static_cast<std::size_t>(t.arg(0).int_value());
    if (i >= env.size()) env.resize(i + 1);
    if (!env[i]) env[i] = s.fresh_var();
    return env[i];
  }
  auto args = t.args();
  std::vector<Term> out;
  out.reserve(args.size());
  bool changed = false;
  for (const Term& a : args) {
    out.push_back(unnumber(a, env, s));
    changed = changed || !out.back().same(a);
  }
  if (!changed) return t;
  return Term::compound(t.name(), std::move(out));
}

}  // namespace

VariantKey::VariantKey(Term t, std::uint32_t vars)
    : term_(std::move(t)), hash_(structural_hash(term_)), vars_(vars) {}

VariantKey variant_key(const Term& call) {
  Numbering n;
  Term k = number_vars(call, n);
  return VariantKey(std::move(k), n.count());
}

Term from_variant_key(const VariantKey& key, Bindings& s) {
  if (key.variable_count() == 0) return key.term();
  std::vector<Term> env(key.variable_count());
  return unnumber(key.term(), env, s);
}

namespace {

bool variant_rec(const Term& a0, const Term& b0,
                 std::unordered_map<const TermNode*, const TermNode*>& ab,
                 std::unordered_map<const TermNode*, const TermNode*>& ba) {
  Term a = deref(a0);
  Term b = deref(b0);
  if (a.is_var() || b.is_var()) {
    if (!a.is_var() || !b.is_var()) return false;
    auto ia = ab.find(a.node());
    auto ib = ba.find(b.node());
    if (ia == ab.end() && ib == ba.end()) {
      ab.emplace(a.node(), b.node());
      ba.emplace(b.node(), a.node());
      return true;
    }
    return ia != ab.end() && ib != ba.end() && ia->second == b.node() &&
           ib->second == a.node();
  }
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Atom: return a.name() == b.name();
    case TermKind::Int: return a.int_value() == b.int_value();
    case TermKind::Struct: {
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (!variant_rec(a.arg(i), b.arg(i), ab, ba)) return false;
      return true;
    }
    default: return false;
  }
}

}  // namespace

bool is_variant(const Term& a, const Term& b) {
  std::unordered_map<const TermNode*, const TermNode*> ab, ba;
  return variant_rec(a, b, ab, ba);
}

// ---------------------------------------------------------------------------
// Renaming and clause templates

Renamer::Renamer(Bindings& s, std::span<const Term> protected_vars) : bindings_(&s) {
  for (const Term& v : protected_vars) {
    Term d = deref(v);
    if (d.is_var()) map_.emplace(d.var_id(), d);
  }
}

Term Renamer::operator()(const Term& t) {
  if (t.ground()) return t;
  Term d = deref(t);
  if (d.ground()) return d;
  if (d.is_var()) {
    auto [it, inserted] = map_.try_emplace(d.var_id());
    if (inserted) it->second = bindings_->fresh_var();
    return it->second;
  }
  if (d.is_local()) return d;
  auto args = d.args();
  std::vector<Term> out;
  out.reserve(args.size());
  for (const Term& a : args) out.push_back((*this)(a));
  return Term::compound(d.name(), std::move(out));
}

std::pair<Term, VarMap> rename_fresh(const Term& t, std::span<const Term> protected_vars,
                                     Bindings& s) {
  Renamer r(s, protected_vars);
  Term out = r(t);
  return {std::move(out), r.mapping()};
}

Term instantiate(const Term& tmpl, std::vector<Term>& env, Bindings& s) {
  if (tmpl.ground()) return tmpl;
  switch (tmpl.kind()) {
    case TermKind::Local: {
      Term& slot = env.at(tmpl.local_index());
      if (!slot) slot = s.fresh_var();
      return slot;
    }
    case TermKind::Struct: {
      auto args = tmpl.args();
      std::vector<Term> out;
      out.reserve(args.size());
      for (const Term& a : args) out.push_back(instantiate(a, env, s));
      return Term::compound(tmpl.name(), std::move(out));
    }
    default: return tmpl;
  }
}

namespace {

bool unify_head_rec(const Term& pattern, const Term& actual, std::vector<Term>& env,
                    Bindings& s) {
  if (pattern.is_local()) {
    Term& slot = env.at(pattern.local_index());
    if (!slot) {
      slot = deref(actual);
      return true;
    }
    return unify_rec(slot, actual, s);
  }
  Term a = deref(actual);
  if (a.is_var()) return bind_checked(a, instantiate(pattern, env, s), s);
  if (pattern.kind() != a.kind()) return false;
  switch (pattern.kind()) {
    case TermKind::Atom: return pattern.name() == a.name();
    case TermKind::Int: return pattern.int_value() == a.int_value();
    case TermKind::Struct: {
      if (pattern.name() != a.name() || pattern.arity() != a.arity()) return false;
      if (pattern.ground()) return unify_rec(pattern, a, s);
      auto ps = pattern.args();
      auto as = a.args();
      for (std::size_t i = 0; i < ps.size(); ++i)
        if (!unify_head_rec(ps[i], as[i], env, s)) return false;
      return true;
    }
    default: return false;
  }
}

}  // namespace

bool unify_head(const Term& pattern, const Term& actual, std::vector<Term>& env,
                Bindings& s) {
  auto mark = s.checkpoint();
  if (unify_head_rec(pattern, actual, env, s)) return true;
  s.undo_to(mark);
  return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_letter_atom(std::string_view n) {
  if (n.empty() || !(n[0] >= 'a' && n[0] <= 'z')) return false;
  for (std::size_t i = 1; i < n.size(); ++i) {
    char c = n[i];
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
          c == '_'))
      return false;
  }
  return true;
}

std::string quote_atom(std::string_view n) {
  if (n == "[]" || is_letter_atom(n)) return std::string(n);
  std::string out = "'";
  for (char c : n) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

bool is_infix(std::string_view n) {
  static constexpr std::string_view ops[] = {":-", ";",   ",",   "=",  "is", "<",  "=<",
                                             ">",  ">=",  "=:=", "=\\=", "+", "-", "*",
                                             "//", "mod", "/"};
  for (auto op : ops)
    if (op == n) return true;
  return false;
}

void write_term(const Term& t0, std::string& out) {
  Term t = deref(t0);
  switch (t.kind()) {
    case TermKind::Var: out += "_G" + std::to_string(t.var_id()); return;
    case TermKind::Local: out += "_L" + std::to_string(t.local_index()); return;
    case TermKind::Int: out += t.int_value().str(); return;
    case TermKind::Atom: out += quote_atom(t.name().name()); return;
    case TermKind::Struct: break;
  }
  std::string_view f = t.name().name();
  if (t.name() == sym::dot() && t.arity() == 2) {
    out.push_back('[');
    write_term(t.arg(0), out);
    Term rest = deref(t.arg(1));
    while (rest.is_struct() && rest.name() == sym::dot() && rest.arity() == 2) {
      out.push_back(',');
      write_term(rest.arg(0), out);
      rest = deref(rest.arg(1));
    }
    if (!(rest.is_atom() && rest.name() == sym::nil())) {
      out.push_back('|');
      write_term(rest, out);
    }
    out.push_back(']');
    return;
  }
  if (t.arity() == 2 && is_infix(f)) {
    out.push_back('(');
    write_term(t.arg(0), out);
    if (f == ",") {
      out += ", ";
    } else {
      out.push_back(' ');
      out += f;
      out.push_back(' ');
    }
    write_term(t.arg(1), out);
    out.push_back(')');
    return;
  }
  out += quote_atom(f);
  out.push_back('(');
  bool first = true;
  for (const Term& a : t.args()) {
    if (!first) out.push_back(',');
    first = false;
    write_term(a, out);
  }
  out.push_back(')');
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  write_term(t, out);
  return out;
}

std::size_t term_size(const Term& t) {
  Term d = deref(t);
  std::size_t n = 1;
  if (d.is_struct())
    for (const Term& a : d.args()) n += term_size(a);
  return n;
}

}  // namespace tabkit
