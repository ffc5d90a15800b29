#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tabkit/bench.hpp"
#include "tabkit/errors.hpp"
#include "tabkit/machine.hpp"
#include "tabkit/memolist.hpp"
#include "tabkit/program.hpp"
#include "tabkit/tabling.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kLoadError = 2;
constexpr int kRuntimeError = 3;

struct SolveArgs {
  std::string file;
  std::string query;
  std::uint64_t steps = 0;
  bool metrics = false;
  bool memolist = false;
};

struct BenchArgs {
  std::string suite = "core";
  bool check = false;
  std::vector<std::uint64_t> sizes;
  std::string out;
};

std::string format_solution(const tabkit::Query& q, const std::vector<tabkit::Term>& values,
                            const std::vector<tabkit::Term>& vars) {
  std::string line;
  for (const auto& [name, var] : q.variables) {
    if (name.starts_with('_')) continue;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (!vars[i].same(var)) continue;
      if (!line.empty()) line += ", ";
      line += name + "=" + tabkit::to_string(values[i]);
    }
  }
  return line.empty() ? "true" : line;
}

void print_metrics(const tabkit::Metrics& m) {
  auto row = tabkit::report("query", m);
  std::fprintf(stderr,
               "n_p=%llu n_c=%llu n_s=%llu r_c=%s r_s=%s captures=%llu resumes=%llu "
               "cont_frames_total=%llu max_cont_frames=%llu\n",
               static_cast<unsigned long long>(m.n_p), static_cast<unsigned long long>(m.n_c),
               static_cast<unsigned long long>(m.n_s), row.r_c.c_str(), row.r_s.c_str(),
               static_cast<unsigned long long>(m.captures),
               static_cast<unsigned long long>(m.resumes),
               static_cast<unsigned long long>(m.cont_frames_total),
               static_cast<unsigned long long>(m.max_cont_frames));
}

int run_solve(const SolveArgs& a) {
  tabkit::Program prog;
  try {
    prog = tabkit::Program::load(a.file);
  } catch (const tabkit::Error& e) {
    std::fprintf(stderr, "tabkit: %s\n", e.what());
    return kLoadError;
  }
  auto m = std::make_shared<tabkit::Machine>(&prog.database());
  m->set_step_budget(a.steps);
  tabkit::Query q;
  try {
    q = tabkit::parse_query(a.query, m->bindings());
  } catch (const tabkit::Error& e) {
    std::fprintf(stderr, "tabkit: query: %s\n", e.what());
    return kLoadError;
  }

  if (a.memolist) {
    try {
      auto answers = tabkit::memo_solve(prog, q.goal);
      std::vector<tabkit::Term> vars = tabkit::term_variables(q.goal);
      for (const auto& values : answers) std::printf("%s\n", format_solution(q, values, vars).c_str());
      if (answers.empty()) std::printf("false\n");
    } catch (const tabkit::Error& e) {
      std::fprintf(stderr, "tabkit: %s\n", e.what());
      return kRuntimeError;
    }
    return kOk;
  }

  tabkit::TabledRun run(m, q.goal);
  std::size_t count = 0;
  int status = kOk;
  try {
    while (auto values = run.next()) {
      std::printf("%s\n", format_solution(q, *values, run.variables()).c_str());
      std::fflush(stdout);
      ++count;
    }
    if (count == 0) std::printf("false\n");
  } catch (const tabkit::Error& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "tabkit: %s\n", e.what());
    status = kRuntimeError;
  }
  if (a.metrics) print_metrics(run.metrics());
  return status;
}

int run_bench_cmd(const BenchArgs& a) {
  std::vector<tabkit::BenchSpec> specs;
  try {
    if (a.sizes.empty()) {
      specs = tabkit::bench_suite(a.suite);
    } else {
      std::vector<std::string> seen;
      for (const auto& s : tabkit::bench_suite(a.suite)) {
        if (std::find(seen.begin(), seen.end(), s.family) != seen.end()) continue;
        seen.push_back(s.family);
        for (std::uint64_t size : a.sizes) specs.push_back(tabkit::make_bench(s.family, size));
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tabkit: %s\n", e.what());
    return kLoadError;
  }

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) {
      std::fprintf(stderr, "tabkit: cannot write %s\n", a.out.c_str());
      return kLoadError;
    }
  }
  std::vector<tabkit::BenchRow> rows;
  std::string header = tabkit::emit_table({}, true);
  std::fputs(header.c_str(), stdout);
  std::fflush(stdout);
  if (file) file << header;
  int status = kOk;
  for (const auto& spec : specs) {
    tabkit::BenchResult r;
    try {
      r = tabkit::run_bench(spec);
    } catch (const tabkit::Error& e) {
      std::fprintf(stderr, "tabkit: %s: %s\n", spec.name().c_str(), e.what());
      status = kRuntimeError;
      continue;
    }
    std::string table = tabkit::emit_table(std::span(&r.row, 1), true);
    std::string line = table.substr(table.find('\n') + 1);
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    if (file) file << line;
    if (a.check && r.matches && !*r.matches) {
      const auto& e = *spec.expected;
      std::fprintf(stderr, "tabkit: %s: expected %llu/%llu/%llu\n", spec.name().c_str(),
                   static_cast<unsigned long long>(e.n_p), static_cast<unsigned long long>(e.n_c),
                   static_cast<unsigned long long>(e.n_s));
      if (status == kOk) status = kMismatch;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabled logic programming engine"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run a query and print each answer as it is found");
  s->add_option("file", solve.file, "Program file")->required();
  s->add_option("query", solve.query, "Query, e.g. \"path(a,W)\"")->required();
  s->add_option("--steps", solve.steps, "Step budget (0 = unlimited)");
  s->add_flag("--metrics", solve.metrics, "Print tabling counters to stderr");
  s->add_flag("--memolist", solve.memolist, "Evaluate with the list-based memo oracle");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run the benchmark suite and print a TSV table");
  b->add_option("--suite", bench.suite, "core or all")->check(CLI::IsMember({"core", "all"}));
  b->add_flag("--check", bench.check, "Exit 1 when counters differ from the expected values");
  b->add_option("--sizes", bench.sizes, "Sizes to run for every family")->delimiter(',');
  b->add_option("--out", bench.out, "Also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kLoadError;
  }
  if (*s) return run_solve(solve);
  return run_bench_cmd(bench);
}
