#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabkit/metrics.hpp"

namespace tabkit {

struct ExpectedCounts {
  std::uint64_t n_p = 0;
  std::uint64_t n_c = 0;
  std::uint64_t n_s = 0;

  friend bool operator==(const ExpectedCounts&, const ExpectedCounts&) = default;
};

struct BenchSpec {
  std::string family;  // e.g. "fib"
  std::uint64_t size = 0;
  std::string source;  // program text
  std::string query;
  std::optional<ExpectedCounts> expected;

  /// "family(size)"
  std::string name() const;
};

/// Benchmark families in table order.
std::span<const std::string_view> bench_families();

/// Program and query for one family at one size. Expected counters are
/// attached where they are known. Throws std::invalid_argument for an
/// unknown family.
BenchSpec make_bench(std::string_view family, std::uint64_t size);

/// "core": the ten reference rows. "all": core plus larger sizes.
/// Throws std::invalid_argument for anything else.
std::vector<BenchSpec> bench_suite(std::string_view suite);

struct BenchRow {
  MetricsRow metrics;
  std::optional<double> wall_ms;
};

struct BenchResult {
  BenchRow row;
  Metrics metrics;
  /// Empty when no expectation exists.
  std::optional<bool> matches;
};

/// Loads the program, runs the query to exhaustion under tabling and
/// collects counters. `step_budget` 0 means unlimited.
BenchResult run_bench(const BenchSpec& spec, std::uint64_t step_budget = 0);

/// Header line, then one line per row, tab separated, each ending in '\n'.
/// The wall_ms column is present when `with_timing` is set.
std::string emit_table(std::span<const BenchRow> rows, bool with_timing);

}  // namespace tabkit
