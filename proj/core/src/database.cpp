#include "tabkit/database.hpp"

#include <boost/functional/hash.hpp>

namespace tabkit {

std::string to_string(PredicateId p) {
  return std::string(p.name.name()) + "/" + std::to_string(p.arity);
}

namespace {

// Equal keys for terms that could unify at the top; collisions only widen a
// candidate list.
bool first_arg_key(const Term& t, std::uint64_t& key) {
  switch (t.kind()) {
    case TermKind::Atom: key = std::uint64_t{t.name().id()} << 2; return true;
    case TermKind::Int: {
      std::size_t h = boost::multiprecision::hash_value(t.int_value());
      key = (static_cast<std::uint64_t>(h) << 2) | 1;
      return true;
    }
    case TermKind::Struct:
      key = (std::uint64_t{t.name().id()} << 34) | (std::uint64_t{t.arity() & 0xffffffffu} << 2) | 2;
      return true;
    default: return false;
  }
}

}  // namespace

void Predicate::add(Clause c) {
  auto i = static_cast<std::uint32_t>(clauses_.size());
  std::uint64_t key = 0;
  bool keyed = id_.arity > 0 && first_arg_key(c.head.arg(0), key);
  clauses_.push_back(std::move(c));
  all_.push_back(i);
  if (!keyed) {
    open_.push_back(i);
    for (auto& [k, list] : by_key_) list.push_back(i);
    return;
  }
  auto [it, inserted] = by_key_.try_emplace(key);
  if (inserted) it->second = open_;
  it->second.push_back(i);
}

std::span<const std::uint32_t> Predicate::candidates(const Term& first) const {
  std::uint64_t key = 0;
  if (!first_arg_key(first, key)) return all_;
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return open_;
  return it->second;
}

Predicate& Database::declare(Symbol name, std::uint32_t arity) {
  PredicateId id{name, arity};
  auto it = by_id_.find(id);
  if (it != by_id_.end()) return *it->second;
  preds_.push_back(std::make_unique<Predicate>(name, arity));
  by_id_.emplace(id, preds_.back().get());
  return *preds_.back();
}

const Predicate* Database::find(Symbol name, std::uint32_t arity) const {
  auto it = by_id_.find(PredicateId{name, arity});
  return it == by_id_.end() ? nullptr : it->second;
}

Predicate* Database::find_mutable(Symbol name, std::uint32_t arity) {
  auto it = by_id_.find(PredicateId{name, arity});
  return it == by_id_.end() ? nullptr : it->second;
}

}  // namespace tabkit
