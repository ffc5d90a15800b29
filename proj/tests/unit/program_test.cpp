#include <gtest/gtest.h>

#include <random>

#include "oracles/datalog.hpp"
#include "support/run.hpp"
#include "tabkit/bench.hpp"
#include "tabkit/errors.hpp"

namespace tabkit {
namespace {

const Predicate* find(const Program& p, const char* name, std::uint32_t arity) {
  return p.database().find(Symbol::intern(name), arity);
}

TEST(Parse, SingleFact) {
  Program p = Program::parse("p(a).");
  ASSERT_EQ(p.clauses().size(), 1u);
  const Predicate* pred = find(p, "p", 1);
  ASSERT_NE(pred, nullptr);
  EXPECT_EQ(pred->clauses().size(), 1u);
  EXPECT_EQ(to_string(pred->clauses()[0].body), "true");
}

TEST(Parse, TableDirectiveRehomesClauses) {
  Program p = Program::parse(
      ":- table path/2.\n"
      "path(X,Z) :- edge(X,Z).\n"
      "path(X,Z) :- path(X,Y), edge(Y,Z).");
  const Predicate* wrapper = find(p, "path", 2);
  const Predicate* worker = find(p, "path#", 2);
  ASSERT_NE(wrapper, nullptr);
  ASSERT_NE(worker, nullptr);
  ASSERT_EQ(wrapper->clauses().size(), 1u);
  EXPECT_EQ(to_string(wrapper->clauses()[0].head), "path(_L0,_L1)");
  EXPECT_EQ(to_string(wrapper->clauses()[0].body), "tabled_call('path#'(_L0,_L1))");
  EXPECT_EQ(worker->clauses().size(), 2u);
  EXPECT_TRUE(p.database().is_tabled({Symbol::intern("path"), 2}));
}

TEST(Parse, SyntaxErrorAtEof) {
  try {
    Program::parse("p(X) :- q(X");
    FAIL() << "no error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos);
  }
}

TEST(Parse, ReportsLineNumbers) {
  try {
    Program::parse("p(a).\n\nq(b) :- .\n");
    FAIL() << "no error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Parse, CommentsListsAndOperators) {
  Program p = Program::parse(
      "% line comment\n"
      "/* block\n comment */\n"
      "r([H|T], X) :- X is -H * 2 + 7 mod 3 - (4 // 2), T = [].\n"
      "s('Quoted atom', -3).\n");
  ASSERT_EQ(p.clauses().size(), 2u);
  EXPECT_EQ(to_string(p.clauses()[1].head), "s('Quoted atom',-3)");
  auto rows = testing::sld_rows(p, "r([5], X)");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0][0], "-11");
}

TEST(Parse, BuiltinCannotBeRedefined) {
  EXPECT_THROW(Program::parse("X is Y :- true."), Error);
}

TEST(TableDirective, FibThreeClauses) {
  Program p = Program::parse(make_bench("fib", 10).source);
  EXPECT_EQ(find(p, "fib#", 2)->clauses().size(), 3u);
  EXPECT_EQ(find(p, "fib", 2)->clauses().size(), 1u);
}

TEST(TableDirective, ZeroClausesGivesEmptyProducer) {
  Program p = Program::parse(":- table q/3.\n");
  ASSERT_NE(find(p, "q", 3), nullptr);
  ASSERT_NE(find(p, "q#", 3), nullptr);
  EXPECT_TRUE(find(p, "q#", 3)->clauses().empty());
}

TEST(TableDirective, MayFollowClauses) {
  Program p = Program::parse("e(a, b).\ne(b, c).\n:- table e/2.\n");
  EXPECT_EQ(find(p, "e#", 2)->clauses().size(), 2u);
}

TEST(TableDirective, Idempotent) {
  Program once = Program::parse(":- table e/2.\ne(a, b).\n");
  Program twice = Program::parse(":- table e/2.\n:- table e/2, e/2.\ne(a, b).\n");
  EXPECT_EQ(once.to_source(), twice.to_source());
  twice.apply_table_directive(Symbol::intern("e"), 2);
  EXPECT_EQ(find(twice, "e", 2)->clauses().size(), 1u);
  EXPECT_EQ(twice.table_directives().size(), 1u);
}

TEST(TableDirective, Errors) {
  EXPECT_THROW(Program::parse(":- table between/3.\n"), TableDirectiveError);
  EXPECT_THROW(Program::parse(":- table p/2.\np(a).\n"), TableDirectiveError);
  EXPECT_THROW(Program::parse(":- table p.\n"), TableDirectiveError);

  Program p = Program::parse("p(a).\n");
  EXPECT_THROW(p.apply_table_directive(Symbol::intern("p"), 3), TableDirectiveError);
  EXPECT_TRUE(p.table_directives().empty());
  EXPECT_FALSE(p.database().is_tabled({Symbol::intern("p"), 1}));
}

TEST(TableDirective, WorkerNames) {
  EXPECT_EQ(worker_name(Symbol::intern("path")).name(), "path#");
  EXPECT_EQ(strip_worker_name(Symbol::intern("path#")).name(), "path");
  EXPECT_EQ(strip_worker_name(Symbol::intern("path")).name(), "path");
}

TEST(Query, NamedVariables) {
  Bindings s;
  Query q = parse_query("path(a,W)", s);
  ASSERT_EQ(q.variables.size(), 1u);
  EXPECT_EQ(q.variables[0].first, "W");
  EXPECT_EQ(to_string(q.goal.arg(0)), "a");

  Query f = parse_query("fib(10,F)", s);
  EXPECT_EQ(f.goal.name().name(), "fib");

  Query c = parse_query("p(X), q(X, _)", s);
  EXPECT_EQ(c.goal.name(), sym::comma());
  EXPECT_EQ(c.variables.size(), 1u);
  EXPECT_TRUE(deref(c.goal.arg(0).arg(0)).same(deref(c.goal.arg(1).arg(0))));
}

TEST(ProgramProperties, SourceRoundTrip) {
  std::mt19937_64 rng(oracle::seed_from_env(41));
  std::vector<std::string> sources;
  for (auto family : bench_families()) sources.push_back(make_bench(family, 6).source);
  for (int i = 0; i < 100; ++i) {
    oracle::Prog op = oracle::generate(rng, {});
    if (i % 2) op.tabled.push_back(op.arity.begin()->first);
    sources.push_back(op.text());
  }
  for (const std::string& src : sources) {
    Program a = Program::parse(src);
    Program b = Program::parse(a.to_source());
    ASSERT_EQ(a.to_source(), b.to_source()) << src;
    ASSERT_EQ(a.clauses().size(), b.clauses().size());
    for (std::size_t i = 0; i < a.clauses().size(); ++i) {
      ASSERT_TRUE(structurally_equal(a.clauses()[i].head, b.clauses()[i].head));
      ASSERT_TRUE(structurally_equal(a.clauses()[i].body, b.clauses()[i].body));
    }
  }
}

TEST(ProgramProperties, DirectiveEqualsManualWrapper) {
  std::mt19937_64 rng(oracle::seed_from_env(42));
  for (int i = 0; i < 60; ++i) {
    oracle::Prog op = oracle::generate(rng, {});
    for (const auto& [name, n] : op.arity) op.tabled.push_back(name);

    oracle::Prog manual = op;
    manual.tabled.clear();
    for (oracle::Rule& r : manual.rules) r.head.pred += "#";
    for (const auto& [name, n] : op.arity) {
      oracle::Rule w{{name, {}}, {{name + "#", {}}}};
      for (int k = 0; k < n; ++k) {
        w.head.args.push_back(oracle::Arg::v(k));
        w.body[0].args.push_back(oracle::Arg::v(k));
      }
      manual.rules.push_back(w);
    }
    std::string manual_text = manual.text();
    for (const auto& [name, n] : op.arity) {
      // name#(...) in the body becomes tabled_call(name#(...)).
      std::string from = " :- " + name + "#(";
      for (std::size_t at = 0; (at = manual_text.find(from, at)) != std::string::npos;) {
        std::size_t close = manual_text.find(").", at);
        manual_text.insert(close + 1, ")");
        manual_text.replace(at, from.size(), " :- tabled_call(" + name + "#(");
        at = close;
      }
    }
    Program a = Program::parse(op.text());
    Program b = Program::parse(manual_text);
    for (const auto& [name, n] : op.arity) {
      oracle::Atom q{name, {}};
      for (int k = 0; k < n; ++k) q.args.push_back(oracle::Arg::v(k));
      ASSERT_EQ(testing::tabled_set(a, oracle::query_text(q)), testing::tabled_set(b, oracle::query_text(q)))
          << manual_text;
    }
  }
}

}  // namespace
}  // namespace tabkit
