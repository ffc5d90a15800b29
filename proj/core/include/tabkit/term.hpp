#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tabkit/symbol.hpp"

namespace tabkit {

using BigInt = boost::multiprecision::cpp_int;

enum class TermKind : std::uint8_t {
  Var,
  Atom,
  Int,
  Struct,
  /// Clause-local variable slot. Only appears inside stored clause templates;
  /// instantiation replaces it with a fresh Var.
  Local,
};

class TermNode;
class Bindings;

/// Immutable, reference-counted term handle. A default-constructed Term is
/// empty and only used as "no value".
class Term {
 public:
  Term() = default;

  static Term atom(Symbol name);
  static Term atom(std::string_view name) { return atom(Symbol::intern(name)); }
  static Term integer(BigInt value);
  static Term integer(std::int64_t value);
  /// Zero arguments yield the atom `functor`.
  static Term compound(Symbol functor, std::vector<Term> args);
  static Term compound(std::string_view functor, std::vector<Term> args) {
    return compound(Symbol::intern(functor), std::move(args));
  }
  static Term local(std::uint32_t index);
  /// Proper list of `items` ending in `tail` (default `[]`).
  static Term list(std::span<const Term> items, Term tail = Term());

  explicit operator bool() const noexcept { return node_ != nullptr; }

  TermKind kind() const noexcept;
  bool is_var() const noexcept { return kind() == TermKind::Var; }
  bool is_atom() const noexcept { return kind() == TermKind::Atom; }
  bool is_int() const noexcept { return kind() == TermKind::Int; }
  bool is_struct() const noexcept { return kind() == TermKind::Struct; }
  bool is_local() const noexcept { return kind() == TermKind::Local; }
  bool is_callable() const noexcept { return is_atom() || is_struct(); }

  /// True when the term is known to contain no Var or Local node. Computed at
  /// construction, so a Struct whose variables were later bound still reports
  /// false until it is resolved.
  bool ground() const noexcept;

  /// Atom name or functor.
  Symbol name() const;
  /// 0 for atoms.
  std::size_t arity() const noexcept;
  const Term& arg(std::size_t i) const;
  std::span<const Term> args() const;
  const BigInt& int_value() const;
  std::uint64_t var_id() const;
  std::uint32_t local_index() const;

  const TermNode* node() const noexcept { return node_.get(); }
  /// Identity comparison (same node).
  bool same(const Term& other) const noexcept { return node_ == other.node_; }

 private:
  friend class Bindings;
  friend class Symbol;
  friend Term deref(Term t);
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

/// Variable bindings with an undo trail. Bindings live in the variable nodes
/// themselves; this object owns the trail and the per-engine variable counter,
/// so ids increase monotonically for the lifetime of an engine.
class Bindings {
 public:
  using Checkpoint = std::size_t;

  Bindings() = default;
  Bindings(const Bindings&) = delete;
  Bindings& operator=(const Bindings&) = delete;
  ~Bindings();

  Term fresh_var();
  std::uint64_t vars_created() const noexcept { return next_id_ - 1; }

  /// `var` must be an unbound variable.
  void bind(const Term& var, Term value);

  Checkpoint checkpoint() const noexcept { return trail_.size(); }
  void undo_to(Checkpoint mark);
  std::size_t trail_size() const noexcept { return trail_.size(); }

  /// Every variable bound since `mark`, oldest first.
  std::span<const Term> bound_since(Checkpoint mark) const {
    return std::span<const Term>(trail_).subspan(mark);
  }

 private:
  std::vector<Term> trail_;
  std::uint64_t next_id_ = 1;
};

/// Follow variable bindings until reaching a non-variable or unbound variable.
Term deref(Term t);

/// Current binding of an unbound-or-bound variable (empty when unbound).
Term binding_of(const Term& var);

/// Most general unifier extension, with occurs check. On failure every binding
/// made during the attempt is undone.
bool unify(const Term& a, const Term& b, Bindings& s);

/// True if variable `var` occurs in `t` under current bindings.
bool occurs_in(const Term& var, const Term& t);

/// Substitute current bindings everywhere. Unbound variables are kept as they
/// are; unchanged subterms are shared with the input.
Term resolve(const Term& t);

/// Distinct unbound variables of `t`, depth-first left-to-right by first
/// occurrence.
std::vector<Term> term_variables(const Term& t);

/// Structural equality without dereferencing (variables equal iff same node).
bool structurally_equal(const Term& a, const Term& b);
std::size_t structural_hash(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const { return structural_hash(t); }
};
struct TermEqual {
  bool operator()(const Term& a, const Term& b) const {
    return structurally_equal(a, b);
  }
};

/// Ground canonical representative of a variant class: every distinct free
/// variable is replaced by '$VAR'(i), numbered by first occurrence.
class VariantKey {
 public:
  VariantKey() = default;

  const Term& term() const noexcept { return term_; }
  std::size_t hash() const noexcept { return hash_; }
  /// Number of distinct variables the source term had.
  std::uint32_t variable_count() const noexcept { return vars_; }

  friend bool operator==(const VariantKey& a, const VariantKey& b) {
    return a.hash_ == b.hash_ && structurally_equal(a.term_, b.term_);
  }

 private:
  friend VariantKey variant_key(const Term& call);
  VariantKey(Term t, std::uint32_t vars);
  Term term_;
  std::size_t hash_ = 0;
  std::uint32_t vars_ = 0;
};

struct VariantKeyHash {
  std::size_t operator()(const VariantKey& k) const noexcept { return k.hash(); }
};

VariantKey variant_key(const Term& call);

/// Inverse of variant_key up to renaming: markers become fresh variables.
Term from_variant_key(const VariantKey& key, Bindings& s);

/// Independent check that two terms are variants (bijective renaming),
/// by simultaneous traversal.
bool is_variant(const Term& a, const Term& b);

/// Maps variables (by id) to replacement terms.
using VarMap = std::unordered_map<std::uint64_t, Term>;

/// Copies terms, replacing every unbound variable (other than protected ones)
/// with a fresh variable. One Renamer shares its mapping across calls so that
/// several terms can be renamed consistently.
class Renamer {
 public:
  explicit Renamer(Bindings& s) : bindings_(&s) {}
  Renamer(Bindings& s, std::span<const Term> protected_vars);
  /// Variables whose id is in `seed` map to the given terms, which are
  /// returned as they are.
  Renamer(Bindings& s, VarMap seed) : bindings_(&s), map_(std::move(seed)) {}

  Term operator()(const Term& t);

  const VarMap& mapping() const noexcept { return map_; }

 private:
  Bindings* bindings_;
  VarMap map_;
};

/// Fresh copy of `t`; `protected_vars` are kept identical.
std::pair<Term, VarMap> rename_fresh(const Term& t,
                                     std::span<const Term> protected_vars,
                                     Bindings& s);

/// Replace Local slots from `env`, allocating fresh variables for empty
/// slots.
Term instantiate(const Term& tmpl, std::vector<Term>& env, Bindings& s);

/// Unify a clause-head template against an actual term, filling `env`
/// lazily. Restores `s` on failure (env may be left partially filled).
bool unify_head(const Term& pattern, const Term& actual, std::vector<Term>& env,
                Bindings& s);

/// Prolog-like rendering; dereferences through current bindings.
std::string to_string(const Term& t);

/// Number of nodes in the resolved term.
std::size_t term_size(const Term& t);

}  // namespace tabkit
