#include "tabkit/bench.hpp"

#include <array>
#include <chrono>
#include <stdexcept>

#include "tabkit/machine.hpp"
#include "tabkit/program.hpp"
#include "tabkit/tabling.hpp"

namespace tabkit {

namespace {

constexpr std::array<std::string_view, 8> kFamilies = {
    "fib", "nrev", "shuttle", "ping_pong", "path_dfst", "path_dfst_loop", "recognise", "pyramid",
};

std::string n(std::uint64_t v) { return std::to_string(v); }

std::string fib_source() {
  return ":- table fib/2.\n"
         "fib(0, 0).\n"
         "fib(1, 1).\n"
         "fib(N, F) :- N > 1, N1 is N-1, N2 is N-2, fib(N1, F1), fib(N2, F2), F is F1+F2.\n";
}

std::string nrev_source() {
  return ":- table nrev/2.\n"
         "nrev([], []).\n"
         "nrev([H|T], R) :- nrev(T, RT), app(RT, [H], R).\n"
         "app([], L, L).\n"
         "app([H|T], L, [H|R]) :- app(T, L, R).\n"
         "mklist(0, []).\n"
         "mklist(N, [N|T]) :- N > 0, M is N-1, mklist(M, T).\n";
}

std::string shuttle_source(std::uint64_t size) {
  return ":- table shuttle/1.\n"
         "lim(" + n(size) + ").\n"
         "shuttle(0).\n"
         "shuttle(X) :- shuttle(Y), lim(L), Y < L, X is Y+1.\n"
         "shuttle(X) :- shuttle(Y), lim(L), Y > -L, X is Y-1.\n";
}

std::string ping_pong_source(std::uint64_t size) {
  return ":- table ping/1, pong/1.\n"
         "lim(" + n(size) + ").\n"
         "ping(0).\n"
         "ping(X) :- pong(Y), lim(L), Y < L, X is Y+1.\n"
         "pong(0).\n"
         "pong(X) :- ping(Y), lim(L), Y < L, X is Y+1.\n";
}

// Doubly recursive transitive closure, recursive clause first.
std::string path_dfst_source(std::uint64_t size, bool loop) {
  std::string s =
      ":- table path/2.\n"
      "path(X, Y) :- path(X, Z), path(Z, Y).\n"
      "path(X, Y) :- edge(X, Y).\n";
  // path_dfst: a chain over `size` nodes. path_dfst_loop: a cycle over
  // size-1 nodes.
  std::uint64_t last = loop ? size - 1 : size;
  for (std::uint64_t i = 1; i < last; ++i) s += "edge(" + n(i) + ", " + n(i + 1) + ").\n";
  if (loop) s += "edge(" + n(last) + ", 1).\n";
  return s;
}

// Left-recursive grammar over alternating a/b tokens.
std::string recognise_source(std::uint64_t size) {
  std::string s =
      ":- table x/2, y/2.\n"
      "x(P0, P) :- tok(P0, a, P).\n"
      "x(P0, P) :- y(P0, P1), tok(P1, a, P).\n"
      "y(P0, P) :- x(P0, P1), tok(P1, b, P).\n";
  for (std::uint64_t i = 0; i < size; ++i)
    s += "tok(" + n(i) + ", " + (i % 2 == 0 ? "a" : "b") + ", " + n(i + 1) + ").\n";
  return s;
}

std::string pyramid_source(std::uint64_t) {
  return ":- table p/2.\n"
         "p(1, 0).\n";
}

}  // namespace

std::string BenchSpec::name() const { return family + "(" + std::to_string(size) + ")"; }

std::span<const std::string_view> bench_families() { return kFamilies; }

BenchSpec make_bench(std::string_view family, std::uint64_t size) {
  BenchSpec b;
  b.family = std::string(family);
  b.size = size;
  const std::uint64_t s = size;
  if (family == "fib") {
    b.source = fib_source();
    b.query = "fib(" + n(s) + ", F)";
    if (s >= 2) b.expected = ExpectedCounts{s + 1, s - 2, s + 1};
  } else if (family == "nrev") {
    b.source = nrev_source();
    b.query = "mklist(" + n(s) + ", L), nrev(L, R)";
    b.expected = ExpectedCounts{s + 1, 0, s + 1};
  } else if (family == "shuttle") {
    b.source = shuttle_source(s);
    b.query = "shuttle(X)";
    b.expected = ExpectedCounts{1, 2, 2 * s + 1};
  } else if (family == "ping_pong") {
    b.source = ping_pong_source(s);
    b.query = "ping(X) ; pong(X)";
    b.expected = ExpectedCounts{2, 2, 2 * s + 2};
  } else if (family == "path_dfst") {
    if (s < 2) throw std::invalid_argument("path_dfst needs size >= 2");
    b.source = path_dfst_source(s, false);
    b.query = "path(X, Y)";
    b.expected = ExpectedCounts{s, (s - 1) * (s - 1) + 1, (s - 1) * (s - 1)};
  } else if (family == "path_dfst_loop") {
    if (s < 3) throw std::invalid_argument("path_dfst_loop needs size >= 3");
    b.source = path_dfst_source(s, true);
    b.query = "path(X, Y)";
    b.expected = ExpectedCounts{s, 2 * (s - 1) * (s - 1) + 1, 2 * (s - 1) * (s - 1)};
  } else if (family == "recognise") {
    b.source = recognise_source(s);
    b.query = "x(0, P) ; y(0, P)";
    if (s >= 2) b.expected = ExpectedCounts{2, 2, s};
  } else if (family == "pyramid") {
    b.source = pyramid_source(s);
    b.query = "p(" + n(s) + ", X)";
    if (s == 500) b.expected = ExpectedCounts{500, 995, 186751};
  } else {
    throw std::invalid_argument("unknown benchmark family " + std::string(family));
  }
  return b;
}

std::vector<BenchSpec> bench_suite(std::string_view suite) {
  std::vector<BenchSpec> out = {
      make_bench("fib", 1000),       make_bench("nrev", 500),           make_bench("shuttle", 2000),
      make_bench("shuttle", 5000),   make_bench("ping_pong", 10000),    make_bench("path_dfst", 50),
      make_bench("path_dfst", 100),  make_bench("path_dfst_loop", 50),  make_bench("recognise", 20000),
      make_bench("pyramid", 500),
  };
  if (suite == "core") return out;
  if (suite != "all") throw std::invalid_argument("unknown suite " + std::string(suite));
  out.push_back(make_bench("fib", 2000));
  out.push_back(make_bench("nrev", 1000));
  out.push_back(make_bench("shuttle", 10000));
  return out;
}

BenchResult run_bench(const BenchSpec& spec, std::uint64_t step_budget) {
  Program prog = Program::parse(spec.source);
  auto m = std::make_shared<Machine>(&prog.database());
  m->set_step_budget(step_budget);
  Query q = parse_query(spec.query, m->bindings());
  auto start = std::chrono::steady_clock::now();
  TabledRun run(m, q.goal);
  while (run.next()) {
  }
  auto stop = std::chrono::steady_clock::now();
  BenchResult r;
  r.metrics = run.metrics();
  r.row.metrics = report(spec.name(), r.metrics);
  r.row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  if (spec.expected)
    r.matches = *spec.expected == ExpectedCounts{r.metrics.n_p, r.metrics.n_c, r.metrics.n_s};
  return r;
}

std::string emit_table(std::span<const BenchRow> rows, bool with_timing) {
  std::string out = "name\tn_p\tn_c\tn_s\tr_c\tr_s";
  if (with_timing) out += "\twall_ms";
  out += '\n';
  for (const BenchRow& row : rows) {
    const MetricsRow& m = row.metrics;
    out += m.name + '\t' + n(m.n_p) + '\t' + n(m.n_c) + '\t' + n(m.n_s) + '\t' + m.r_c + '\t' + m.r_s;
    if (with_timing) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1f", row.wall_ms.value_or(0.0));
      out += '\t';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace tabkit
