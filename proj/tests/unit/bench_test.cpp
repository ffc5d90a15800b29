#include <gtest/gtest.h>

#include <stdexcept>

#include "tabkit/bench.hpp"

namespace tabkit {
namespace {

BenchRow row(const char* name, std::uint64_t p, std::uint64_t c, std::uint64_t s) {
  Metrics m;
  m.n_p = p;
  m.n_c = c;
  m.n_s = s;
  return BenchRow{report(name, m), std::nullopt};
}

TEST(EmitTable, HeaderOnly) {
  EXPECT_EQ(emit_table({}, false), "name\tn_p\tn_c\tn_s\tr_c\tr_s\n");
  EXPECT_EQ(emit_table({}, true), "name\tn_p\tn_c\tn_s\tr_c\tr_s\twall_ms\n");
}

TEST(EmitTable, Rows) {
  std::vector<BenchRow> rows = {row("fib(1000)", 1001, 998, 1001), row("nrev(500)", 501, 0, 501)};
  EXPECT_EQ(emit_table(rows, false),
            "name\tn_p\tn_c\tn_s\tr_c\tr_s\n"
            "fib(1000)\t1001\t998\t1001\t1.0\t1.0\n"
            "nrev(500)\t501\t0\t501\t0.0\t1.0\n");
}

TEST(MakeBench, Errors) {
  EXPECT_THROW(make_bench("nope", 10), std::invalid_argument);
  EXPECT_THROW(make_bench("path_dfst", 1), std::invalid_argument);
  EXPECT_THROW(bench_suite("some"), std::invalid_argument);
}

TEST(MakeBench, Names) {
  EXPECT_EQ(make_bench("fib", 1000).name(), "fib(1000)");
  EXPECT_EQ(bench_suite("core").size(), 10u);
  EXPECT_GT(bench_suite("all").size(), 10u);
}

TEST(RunBench, SmallSizesMatchClosedForms) {
  for (auto family : bench_families()) {
    if (family == "pyramid") continue;
    for (std::uint64_t n : {4u, 9u, 16u}) {
      BenchSpec spec = make_bench(family, n);
      BenchResult r = run_bench(spec);
      ASSERT_TRUE(r.matches.has_value()) << spec.name();
      EXPECT_TRUE(*r.matches) << spec.name() << " " << r.metrics.n_p << "/" << r.metrics.n_c << "/"
                              << r.metrics.n_s;
    }
  }
}

TEST(RunBench, Deterministic) {
  BenchSpec spec = make_bench("path_dfst_loop", 10);
  BenchResult a = run_bench(spec), b = run_bench(spec);
  EXPECT_EQ(a.row.metrics.n_p, b.row.metrics.n_p);
  EXPECT_EQ(a.row.metrics.n_c, b.row.metrics.n_c);
  EXPECT_EQ(a.row.metrics.n_s, b.row.metrics.n_s);
  EXPECT_EQ(a.metrics.last_ordinal, b.metrics.last_ordinal);
}

}  // namespace
}  // namespace tabkit
