#include <benchmark/benchmark.h>

#include <string>

#include "tabkit/bench.hpp"
#include "tabkit/machine.hpp"
#include "tabkit/program.hpp"
#include "tabkit/tabling.hpp"

namespace {

using namespace tabkit;

std::string nested(int depth, const char* leaf) {
  std::string t = leaf;
  for (int i = 0; i < depth; ++i) t = "f(" + t + ", g(" + std::to_string(i) + ", " + leaf + "))";
  return t;
}

void BM_Unify(benchmark::State& state) {
  Bindings s;
  Term a = parse_term(nested(int(state.range(0)), "X"), s);
  Term b = parse_term(nested(int(state.range(0)), "a"), s);
  for (auto _ : state) {
    auto mark = s.checkpoint();
    benchmark::DoNotOptimize(unify(a, b, s));
    s.undo_to(mark);
  }
}
BENCHMARK(BM_Unify)->Arg(4)->Arg(16)->Arg(64);

void BM_VariantKey(benchmark::State& state) {
  Bindings s;
  Term t = parse_term(nested(int(state.range(0)), "X"), s);
  for (auto _ : state) benchmark::DoNotOptimize(variant_key(t));
}
BENCHMARK(BM_VariantKey)->Arg(4)->Arg(16)->Arg(64);

void BM_Solve(benchmark::State& state) {
  Program p = Program::parse(
      "app([], L, L).\n"
      "app([H|T], L, [H|R]) :- app(T, L, R).\n"
      "mk(0, []).\n"
      "mk(N, [N|T]) :- N > 0, M is N-1, mk(M, T).\n");
  std::string q = "mk(" + std::to_string(state.range(0)) + ", L), app(A, B, L)";
  for (auto _ : state) {
    auto m = std::make_shared<Machine>(&p.database());
    Query goal = parse_query(q, m->bindings());
    SolutionStream st = solve(m, goal.goal);
    std::size_t n = 0;
    while (st.next()) ++n;
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_Solve)->Arg(100)->Arg(1000);

void BM_Tabled(benchmark::State& state, const char* family) {
  BenchSpec spec = make_bench(family, std::uint64_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_bench(spec).metrics.n_s);
}
BENCHMARK_CAPTURE(BM_Tabled, fib, "fib")->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Tabled, path_dfst, "path_dfst")->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Tabled, shuttle, "shuttle")->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
