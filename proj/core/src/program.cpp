#include "tabkit/program.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "tabkit/builtins.hpp"
#include "tabkit/errors.hpp"

namespace tabkit {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Atom, QuotedAtom, Var, Int, Punct, End, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  bool space_before = false;
};

bool is_symbol_char(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
    case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&':
    case '$':
      return true;
    default:
      return false;
  }
}

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : src_(text) {}

  Token next() {
    bool space = skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    t.space_before = space;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c >= '0' && c <= '9') {
      t.kind = Tok::Int;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') t.text.push_back(take());
      return t;
    }
    if (c == '_' || (c >= 'A' && c <= 'Z')) {
      t.kind = Tok::Var;
      while (pos_ < src_.size() && is_alnum(src_[pos_])) t.text.push_back(take());
      return t;
    }
    if (c >= 'a' && c <= 'z') {
      t.kind = Tok::Atom;
      while (pos_ < src_.size() && is_alnum(src_[pos_])) t.text.push_back(take());
      // Worker names such as path# read as one atom.
      if (pos_ < src_.size() && src_[pos_] == '#' &&
          !(pos_ + 1 < src_.size() && is_symbol_char(src_[pos_ + 1])))
        t.text.push_back(take());
      return t;
    }
    if (c == '\'') {
      t.kind = Tok::QuotedAtom;
      take();
      for (;;) {
        if (pos_ >= src_.size()) throw SyntaxError(t.line, t.column, "unterminated quoted atom");
        char d = take();
        if (d == '\'') {
          if (pos_ < src_.size() && src_[pos_] == '\'') {
            t.text.push_back(take());
            continue;
          }
          break;
        }
        if (d == '\\' && pos_ < src_.size()) {
          char e = take();
          switch (e) {
            case 'n': t.text.push_back('\n'); break;
            case 't': t.text.push_back('\t'); break;
            default: t.text.push_back(e); break;
          }
          continue;
        }
        t.text.push_back(d);
      }
      return t;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',' || c == '|' || c == '{' ||
        c == '}') {
      t.kind = Tok::Punct;
      t.text.push_back(take());
      return t;
    }
    if (c == ';' || c == '!') {
      t.kind = Tok::Atom;
      t.text.push_back(take());
      return t;
    }
    if (is_symbol_char(c)) {
      if (c == '.' && (pos_ + 1 >= src_.size() || std::isspace(static_cast<unsigned char>(src_[pos_ + 1])) ||
                       src_[pos_ + 1] == '%')) {
        take();
        t.kind = Tok::End;
        return t;
      }
      t.kind = Tok::Atom;
      while (pos_ < src_.size() && is_symbol_char(src_[pos_])) t.text.push_back(take());
      return t;
    }
    throw SyntaxError(t.line, t.column, std::string("unexpected character '") + c + "'");
  }

 private:
  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  bool skip_space() {
    bool any = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        take();
        any = true;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
        any = true;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        take();
        take();
        while (pos_ < src_.size() && !(src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/'))
          take();
        if (pos_ < src_.size()) {
          take();
          take();
        }
        any = true;
      } else {
        break;
      }
    }
    return any;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---------------------------------------------------------------------------
// Operator-precedence parser

enum class Assoc { XFX, XFY, YFX, FY, FX };

struct OpDef {
  int prec;
  Assoc assoc;
};

std::optional<OpDef> infix_op(std::string_view name) {
  static const std::unordered_map<std::string_view, OpDef> ops = {
      {":-", {1200, Assoc::XFX}}, {";", {1100, Assoc::XFY}},  {",", {1000, Assoc::XFY}},
      {"=", {700, Assoc::XFX}},   {"is", {700, Assoc::XFX}},  {"<", {700, Assoc::XFX}},
      {"=<", {700, Assoc::XFX}},  {">", {700, Assoc::XFX}},   {">=", {700, Assoc::XFX}},
      {"=:=", {700, Assoc::XFX}}, {"=\\=", {700, Assoc::XFX}}, {"+", {500, Assoc::YFX}},
      {"-", {500, Assoc::YFX}},   {"*", {400, Assoc::YFX}},   {"//", {400, Assoc::YFX}},
      {"mod", {400, Assoc::YFX}}, {"/", {400, Assoc::YFX}},
  };
  auto it = ops.find(name);
  if (it == ops.end()) return std::nullopt;
  return it->second;
}

std::optional<OpDef> prefix_op(std::string_view name) {
  if (name == ":-") return OpDef{1200, Assoc::FX};
  if (name == "table") return OpDef{1150, Assoc::FX};
  if (name == "-") return OpDef{200, Assoc::FY};
  return std::nullopt;
}

class Parser {
 public:
  using VarFactory = std::function<Term(const std::string&)>;

  Parser(std::string_view text, VarFactory vars) : lex_(text), vars_(std::move(vars)) {
    advance();
  }

  bool at_eof() const { return tok_.kind == Tok::Eof; }

  // One clause or directive terminated by '.'.
  Term read_clause() {
    Term t = parse(1200);
    if (tok_.kind != Tok::End) fail("operator expected");
    advance();
    return t;
  }

  // A term optionally followed by '.', then end of input.
  Term read_single() {
    Term t = parse(1200);
    if (tok_.kind == Tok::End) advance();
    if (tok_.kind != Tok::Eof) fail("unexpected text after term");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    if (tok_.kind == Tok::Eof) throw SyntaxError(tok_.line, tok_.column, msg + " (unexpected end of input)");
    throw SyntaxError(tok_.line, tok_.column, msg + " near '" + tok_.text + "'");
  }

  void advance() { tok_ = lex_.next(); }

  bool is_punct(char c) const { return tok_.kind == Tok::Punct && tok_.text.size() == 1 && tok_.text[0] == c; }

  void expect(char c) {
    if (!is_punct(c)) fail(std::string("expected '") + c + "'");
    advance();
  }

  // Name of the current token when it can act as an infix operator.
  std::optional<std::string> infix_name() const {
    if (tok_.kind == Tok::Atom) return tok_.text;
    if (tok_.kind == Tok::Punct && tok_.text == ",") return tok_.text;
    return std::nullopt;
  }

  bool starts_term() const {
    switch (tok_.kind) {
      case Tok::Atom:
      case Tok::QuotedAtom:
      case Tok::Var:
      case Tok::Int: return true;
      case Tok::Punct: return tok_.text == "(" || tok_.text == "[" || tok_.text == "{";
      default: return false;
    }
  }

  Term parse(int max_prec) {
    auto [left, left_prec] = primary(max_prec);
    for (;;) {
      auto name = infix_name();
      if (!name) break;
      auto op = infix_op(*name);
      if (!op || op->prec > max_prec) break;
      int left_max = op->assoc == Assoc::YFX ? op->prec : op->prec - 1;
      int right_max = op->assoc == Assoc::XFY ? op->prec : op->prec - 1;
      if (left_prec > left_max) break;
      advance();
      Term right = parse(right_max);
      left = Term::compound(*name, {std::move(left), std::move(right)});
      left_prec = op->prec;
    }
    return left;
  }

  std::pair<Term, int> primary(int max_prec) {
    Token t = tok_;
    switch (t.kind) {
      case Tok::Int:
        advance();
        return {Term::integer(BigInt(t.text)), 0};
      case Tok::Var:
        advance();
        return {vars_(t.text), 0};
      case Tok::Punct:
        if (t.text == "(") {
          advance();
          Term inner = parse(1200);
          expect(')');
          return {inner, 0};
        }
        if (t.text == "[") return {list(), 0};
        if (t.text == "{") fail("curly terms are not supported");
        fail("unexpected '" + t.text + "'");
      case Tok::Atom:
      case Tok::QuotedAtom: {
        advance();
        if (is_punct('(') && !tok_.space_before) return {compound(t.text), 0};
        if (t.kind == Tok::Atom) {
          if (t.text == "-" && tok_.kind == Tok::Int && !tok_.space_before) {
            Token n = tok_;
            advance();
            return {Term::integer(-BigInt(n.text)), 0};
          }
          auto pre = prefix_op(t.text);
          if (pre && starts_term() && !infix_follows()) {
            int prec = pre->prec;
            if (prec > max_prec) prec = 999;
            int arg_max = pre->assoc == Assoc::FY ? prec : prec - 1;
            Term arg = parse(arg_max);
            return {Term::compound(t.text, {std::move(arg)}), prec};
          }
          if (infix_op(t.text) || pre) {
            int p = std::max(infix_op(t.text) ? infix_op(t.text)->prec : 0, pre ? pre->prec : 0);
            return {Term::atom(t.text), p > max_prec ? 0 : p};
          }
        }
        return {Term::atom(t.text), 0};
      }
      case Tok::End: fail("unexpected end of clause");
      case Tok::Eof: fail("term expected");
    }
    fail("term expected");
  }

  // After a prefix operator atom: true when the next token is an infix
  // operator, in which case the prefix operator is an operand itself.
  bool infix_follows() const {
    if (tok_.kind != Tok::Atom) return false;
    if (!infix_op(tok_.text)) return false;
    // "- (" or "- -1" still read as prefix applications.
    return tok_.text != "-" && tok_.text != "+";
  }

  Term compound(const std::string& name) {
    expect('(');
    std::vector<Term> args;
    args.push_back(parse(999));
    while (is_punct(',')) {
      advance();
      args.push_back(parse(999));
    }
    expect(')');
    return Term::compound(name, std::move(args));
  }

  Term list() {
    expect('[');
    if (is_punct(']')) {
      advance();
      return Term::atom(sym::nil());
    }
    std::vector<Term> items;
    items.push_back(parse(999));
    while (is_punct(',')) {
      advance();
      items.push_back(parse(999));
    }
    Term tail;
    if (is_punct('|')) {
      advance();
      tail = parse(999);
    }
    expect(']');
    return Term::list(items, tail);
  }

  Lexer lex_;
  VarFactory vars_;
  Token tok_;
};

// ---------------------------------------------------------------------------
// Clause helpers

Symbol s_table() { static const Symbol s = Symbol::intern("table"); return s; }
Symbol s_slash() { static const Symbol s = Symbol::intern("/"); return s; }

void collect_table_specs(const Term& t, std::vector<PredicateId>& out) {
  if (t.is_struct() && t.arity() == 2 && t.name() == sym::comma()) {
    collect_table_specs(t.arg(0), out);
    collect_table_specs(t.arg(1), out);
    return;
  }
  if (!(t.is_struct() && t.arity() == 2 && t.name() == s_slash() && t.arg(0).is_atom() &&
        t.arg(1).is_int() && t.arg(1).int_value() >= 0 && t.arg(1).int_value() <= 255))
    throw TableDirectiveError("table directive expects name/arity, got " + to_string(t));
  out.push_back(PredicateId{t.arg(0).name(), static_cast<std::uint32_t>(t.arg(1).int_value())});
}

Term rename_functor(const Term& head, Symbol name) {
  if (head.is_atom()) return Term::atom(name);
  return Term::compound(name, std::vector<Term>(head.args().begin(), head.args().end()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Program

Symbol worker_name(Symbol name) { return Symbol::intern(std::string(name.name()) + "#"); }

Symbol strip_worker_name(Symbol name) {
  std::string_view n = name.name();
  if (n.size() < 2 || n.back() != '#') return name;
  return Symbol::intern(n.substr(0, n.size() - 1));
}

Program::Program() : db_(std::make_unique<Database>()) {}
Program::Program(Program&&) noexcept = default;
Program& Program::operator=(Program&&) noexcept = default;
Program::~Program() = default;

Program Program::parse(std::string_view text) {
  Program p;
  std::unordered_map<std::string, Term> names;
  std::uint32_t nvars = 0;
  Parser parser(text, [&](const std::string& name) {
    if (name == "_") return Term::local(nvars++);
    auto [it, inserted] = names.try_emplace(name);
    if (inserted) it->second = Term::local(nvars++);
    return it->second;
  });
  while (!parser.at_eof()) {
    names.clear();
    nvars = 0;
    Term t = parser.read_clause();
    if (t.is_struct() && t.arity() == 1 && t.name() == sym::neck()) {
      Term d = t.arg(0);
      if (!(d.is_struct() && d.arity() == 1 && d.name() == s_table()))
        throw Error("unsupported directive " + to_string(d));
      std::vector<PredicateId> specs;
      collect_table_specs(d.arg(0), specs);
      for (PredicateId id : specs)
        if (std::find(p.tabled_.begin(), p.tabled_.end(), id) == p.tabled_.end())
          p.tabled_.push_back(id);
      continue;
    }
    p.add_clause(std::move(t), nvars);
  }
  p.rebuild();
  return p;
}

Program Program::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Program::add_clause(Term t, std::uint32_t nvars) {
  Term head = t;
  Term body = Term::atom(sym::true_());
  if (t.is_struct() && t.arity() == 2 && t.name() == sym::neck()) {
    head = t.arg(0);
    body = t.arg(1);
  }
  if (!head.is_callable()) throw Error("clause head is not callable: " + to_string(head));
  if (is_reserved(head.name(), static_cast<std::uint32_t>(head.arity())))
    throw Error("cannot redefine builtin " +
                to_string(PredicateId{head.name(), static_cast<std::uint32_t>(head.arity())}));
  clauses_.push_back(Clause{std::move(head), std::move(body), nvars});
}

void Program::apply_table_directive(Symbol name, std::uint32_t arity) {
  PredicateId id{name, arity};
  if (std::find(tabled_.begin(), tabled_.end(), id) != tabled_.end()) return;
  tabled_.push_back(id);
  try {
    rebuild();
  } catch (...) {
    tabled_.pop_back();
    throw;
  }
}

void Program::rebuild() {
  for (PredicateId id : tabled_) {
    if (is_reserved(id.name, id.arity))
      throw TableDirectiveError("cannot table builtin " + to_string(id));
    bool same = false;
    bool other = false;
    for (const Clause& c : clauses_) {
      if (c.head.name() != id.name) continue;
      if (c.head.arity() == id.arity) {
        same = true;
      } else {
        other = true;
      }
    }
    if (!same && other)
      throw TableDirectiveError("table " + to_string(id) +
                                ": no clauses with that arity, but clauses with another");
  }
  auto db = std::make_unique<Database>();
  auto tabled = [&](Symbol name, std::uint32_t arity) {
    return std::find(tabled_.begin(), tabled_.end(), PredicateId{name, arity}) != tabled_.end();
  };
  auto install_wrapper = [&](PredicateId id) {
    Predicate& w = db->declare(id.name, id.arity);
    if (!w.clauses().empty()) return;
    std::vector<Term> args;
    for (std::uint32_t i = 0; i < id.arity; ++i) args.push_back(Term::local(i));
    Symbol worker = worker_name(id.name);
    db->declare(worker, id.arity);
    Term call = id.arity == 0 ? Term::atom(worker) : Term::compound(worker, args);
    Term head = id.arity == 0 ? Term::atom(id.name) : Term::compound(id.name, args);
    w.add(Clause{std::move(head), Term::compound(sym::tabled_call(), {call}), id.arity});
    db->mark_tabled(id);
  };
  for (const Clause& c : clauses_) {
    auto arity = static_cast<std::uint32_t>(c.head.arity());
    if (tabled(c.head.name(), arity)) {
      install_wrapper(PredicateId{c.head.name(), arity});
      Symbol worker = worker_name(c.head.name());
      db->declare(worker, arity).add(Clause{rename_functor(c.head, worker), c.body, c.nvars});
    } else {
      db->declare(c.head.name(), arity).add(c);
    }
  }
  for (PredicateId id : tabled_) install_wrapper(id);
  db_ = std::move(db);
}

std::string Program::to_source() const {
  std::string out;
  for (PredicateId id : tabled_) out += ":- table " + to_string(Term::atom(id.name)) + "/" + std::to_string(id.arity) + ".\n";
  for (const Clause& c : clauses_) {
    out += to_string(c.head);
    if (!(c.body.is_atom() && c.body.name() == sym::true_())) out += " :- " + to_string(c.body);
    out += ".\n";
  }
  return out;
}

Query parse_query(std::string_view text, Bindings& s) {
  Query q;
  std::unordered_map<std::string, Term> names;
  Parser parser(text, [&](const std::string& name) {
    if (name == "_") return s.fresh_var();
    auto [it, inserted] = names.try_emplace(name);
    if (inserted) {
      it->second = s.fresh_var();
      q.variables.emplace_back(name, it->second);
    }
    return it->second;
  });
  q.goal = parser.read_single();
  return q;
}

Term parse_term(std::string_view text, Bindings& s) { return parse_query(text, s).goal; }

}  // namespace tabkit
