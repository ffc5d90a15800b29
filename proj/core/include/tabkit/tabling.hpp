#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tabkit/machine.hpp"
#include "tabkit/metrics.hpp"
#include "tabkit/term.hpp"

namespace tabkit {

/// One variant class: its answers and the continuations waiting on them.
struct TableEntry {
  VariantKey key;
  /// Canonical answer tuples '$tuple'(...) in insertion order.
  std::vector<VariantKey> answers;
  std::unordered_set<VariantKey, VariantKeyHash> answer_set;
  /// Head of the continuation list.
  ContinuationPtr producer;
  /// Remaining continuations, oldest first. The list order is producer, then
  /// consumers newest first.
  std::vector<ContinuationPtr> consumers;

  std::size_t continuation_count() const noexcept {
    return (producer ? 1 : 0) + consumers.size();
  }
};

/// Variant-keyed tables of one run. Never rolled back by backtracking.
class TableStore {
 public:
  TableEntry* find(const VariantKey& key);
  const TableEntry* find(const VariantKey& key) const;
  /// Looks up the table for a call term. Worker names (`p#`) and user names
  /// (`p`) address the same table.
  const TableEntry* find_call(const Term& call) const;
  TableEntry& create(const VariantKey& key);

  std::size_t size() const noexcept { return order_.size(); }
  /// Entries in creation order.
  const std::vector<TableEntry*>& entries() const noexcept { return order_; }

 private:
  std::unordered_map<VariantKey, std::unique_ptr<TableEntry>, VariantKeyHash> map_;
  std::vector<TableEntry*> order_;
};

/// Table key for a tabled call: the call with its worker functor `p#`
/// replaced by `p`, canonicalized.
VariantKey table_key(const Term& call);

struct TableSummary {
  std::size_t answers = 0;
  std::size_t continuations = 0;

  friend bool operator==(const TableSummary&, const TableSummary&) = default;
};

std::unordered_map<VariantKey, TableSummary, VariantKeyHash> table_dump(const TableStore& store);

struct TabledOptions {
  /// Keep every event in `TabledRun::events()`.
  bool keep_events = false;
  std::function<void(const AnswerEvent&)> listener;
};

/// A tabled query. Solutions stream out as soon as they are derived.
class TabledRun {
 public:
  TabledRun(std::shared_ptr<Machine> m, const Term& query, TabledOptions opts = {});
  ~TabledRun();
  TabledRun(TabledRun&&) noexcept;
  TabledRun& operator=(TabledRun&&) noexcept;

  /// Values of the query variables for the next solution.
  std::optional<std::vector<Term>> next();

  Machine& machine() noexcept;
  const TableStore& store() const noexcept;
  const std::vector<AnswerEvent>& events() const noexcept;
  /// Event counters plus the machine's continuation accounting.
  Metrics metrics() const;
  const std::vector<Term>& variables() const noexcept;

  struct State;

 private:
  std::shared_ptr<Machine> machine_;
  std::shared_ptr<State> state_;
};

TabledRun run_tabled(std::shared_ptr<Machine> m, const Term& query, TabledOptions opts = {});

}  // namespace tabkit
