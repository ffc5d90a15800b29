#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tabkit/term.hpp"

namespace tabkit {

/// Clause template. Head and body use Local slots 0..nvars-1 in place of
/// variables; the body is a term (`true` for facts).
struct Clause {
  Term head;
  Term body;
  std::uint32_t nvars = 0;
};

struct PredicateId {
  Symbol name;
  std::uint32_t arity = 0;

  friend bool operator==(PredicateId a, PredicateId b) noexcept {
    return a.name == b.name && a.arity == b.arity;
  }
};

struct PredicateIdHash {
  std::size_t operator()(PredicateId p) const noexcept {
    return (static_cast<std::size_t>(p.name.id()) << 8) ^ p.arity;
  }
};

/// "name/arity"
std::string to_string(PredicateId p);

/// Clauses of one predicate with a first-argument index.
class Predicate {
 public:
  Predicate(Symbol name, std::uint32_t arity) : id_{name, arity} {}

  PredicateId id() const noexcept { return id_; }
  const std::vector<Clause>& clauses() const noexcept { return clauses_; }

  void add(Clause c);

  /// Indices of the clauses that may match a call whose first argument is
  /// `first` (dereferenced), in source order.
  std::span<const std::uint32_t> candidates(const Term& first) const;

 private:
  PredicateId id_;
  std::vector<Clause> clauses_;
  std::vector<std::uint32_t> all_;
  std::vector<std::uint32_t> open_;  // clauses with a variable first argument
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_key_;
};

/// Clause database. Predicates keep their insertion order for printing.
class Database {
 public:
  Predicate& declare(Symbol name, std::uint32_t arity);
  const Predicate* find(Symbol name, std::uint32_t arity) const;
  Predicate* find_mutable(Symbol name, std::uint32_t arity);

  const std::vector<std::unique_ptr<Predicate>>& predicates() const noexcept {
    return preds_;
  }

  bool is_tabled(PredicateId p) const { return tabled_.contains(p); }
  void mark_tabled(PredicateId p) { tabled_.insert(p); }
  const std::unordered_set<PredicateId, PredicateIdHash>& tabled() const noexcept {
    return tabled_;
  }

 private:
  std::vector<std::unique_ptr<Predicate>> preds_;
  std::unordered_map<PredicateId, Predicate*, PredicateIdHash> by_id_;
  std::unordered_set<PredicateId, PredicateIdHash> tabled_;
};

}  // namespace tabkit
