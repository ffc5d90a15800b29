#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "oracles/datalog.hpp"
#include "tabkit/errors.hpp"
#include "tabkit/memolist.hpp"

namespace tabkit {
namespace {

using memo::Comp;
using memo::Rel;
using memo::Values;

Term A(const char* s) { return Term::atom(s); }

std::vector<std::string> text(const Values& v) {
  std::vector<std::string> out;
  for (const Term& t : v) out.push_back(to_string(t));
  return out;
}

using Strings = std::vector<std::string>;

const std::map<std::string, Strings> kEdges = {
    {"a", {"b", "c"}}, {"b", {"d"}}, {"c", {"d"}}, {"d", {}}};

Comp edge(const Term& x) {
  auto it = kEdges.find(std::string(x.name().name()));
  std::vector<Term> ys;
  for (const std::string& y : it->second) ys.push_back(Term::atom(y));
  return memo::choose(std::move(ys));
}

TEST(Memo, PureIsSingleton) { EXPECT_EQ(text(memo::run_memo(memo::pure(A("x")))), Strings{"x"}); }

TEST(Memo, ChooseThenReturn) {
  Comp c = memo::bind(memo::choose({Term::integer(0), Term::integer(1)}),
                      [](const Term& x) { return memo::pure(x); });
  EXPECT_EQ(text(memo::run_memo(c)), (Strings{"0", "1"}));
}

TEST(Memo, ChooseLaws) {
  EXPECT_TRUE(memo::run_memo(memo::choose({})).empty());
  EXPECT_EQ(text(memo::run_memo(memo::choose({A("a")}))), text(memo::run_memo(memo::pure(A("a")))));
  memo::Cont k = [](const Term& x) { return Values{x, Term::compound("k", {x})}; };
  EXPECT_EQ(text(memo::choose({A("a"), A("b")})(k)), (Strings{"a", "k(a)", "b", "k(b)"}));
}

TEST(Memo, LeftRecursivePathTerminates) {
  Rel path = memo::memo([](const Rel& self, const Term& x) {
    return memo::bind(memo::choose({A("base"), A("step")}), [self, x](const Term& which) {
      if (which.name().name() == "base") return edge(x);
      return memo::bind(self(x), [](const Term& z) { return edge(z); });
    });
  });
  Values out = memo::run_memo(path(A("a")));
  Strings got = text(out);
  EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), (std::set<std::string>{"b", "c", "d"}));
  EXPECT_EQ(got.size(), 3u);
}

TEST(Memo, SecondApplicationReplays) {
  int runs = 0;
  Rel e = memo::memo([&runs](const Rel&, const Term& x) {
    ++runs;
    return edge(x);
  });
  Comp twice = memo::bind(e(A("a")), [e](const Term& y) {
    return memo::bind(e(A("a")), [y](const Term& z) { return memo::pure(Term::compound("p", {y, z})); });
  });
  Strings got = text(memo::run_memo(twice));
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (Strings{"p(b,b)", "p(b,c)", "p(c,b)", "p(c,c)"}));
  EXPECT_EQ(runs, 1);
}

TEST(Memo, EmptyRelation) {
  Rel none = memo::memo([](const Rel&, const Term&) { return memo::choose({}); });
  EXPECT_TRUE(memo::run_memo(none(A("d"))).empty());
}

TEST(MemoProperties, FlatteningNestedChoose) {
  std::mt19937_64 rng(oracle::seed_from_env(61));
  for (int i = 0; i < 200; ++i) {
    std::vector<std::vector<Term>> lists(1 + rng() % 4);
    std::vector<Term> flat;
    for (auto& l : lists) {
      for (int k = 0, n = int(rng() % 4); k < n; ++k) l.push_back(Term::integer(std::int64_t(rng() % 10)));
      flat.insert(flat.end(), l.begin(), l.end());
    }
    std::vector<Term> idx;
    for (std::size_t k = 0; k < lists.size(); ++k) idx.push_back(Term::integer(std::int64_t(k)));
    Comp nested = memo::bind(memo::choose(idx), [&lists](const Term& k) {
      return memo::choose(lists[static_cast<std::size_t>(k.int_value())]);
    });
    ASSERT_EQ(text(memo::run_memo(nested)), text(memo::run_memo(memo::choose(flat))));
  }
}

constexpr const char* kPathProgram =
    ":- table path/2.\n"
    "path(X, Y) :- edge(X, Y).\n"
    "path(X, Y) :- path(X, Z), edge(Z, Y).\n"
    "edge(a, b).\nedge(a, c).\nedge(b, d).\nedge(c, d).\n";

TEST(MemoProgram, PathExample) {
  Program p = Program::parse(kPathProgram);
  ASSERT_TRUE(MemoProgram::supports(p));
  Strings got = text(MemoProgram::from_program(p).run(Symbol::intern("path"), A("a")));
  EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), (std::set<std::string>{"b", "c", "d"}));
  EXPECT_EQ(got.size(), 3u);
  EXPECT_TRUE(MemoProgram::from_program(p).run(Symbol::intern("path"), A("d")).empty());
}

TEST(MemoProgram, RejectsOtherShapes) {
  EXPECT_FALSE(MemoProgram::supports(Program::parse("p(a).\n")));
  EXPECT_FALSE(MemoProgram::supports(Program::parse("p(X, Y) :- q(Y, X).\nq(a, b).\n")));
  EXPECT_FALSE(MemoProgram::supports(Program::parse("p(X, b) :- q(X, b).\nq(a, b).\n")));
  EXPECT_THROW(MemoProgram::from_program(Program::parse("p(X, Y) :- Y is X + 1.\n")), Error);
  Program ok = Program::parse(kPathProgram);
  EXPECT_THROW(MemoProgram::from_program(ok).run(Symbol::intern("nope"), A("a")), UnknownPredicate);
}

TEST(MemoProgram, Solve) {
  Program p = Program::parse(kPathProgram);
  Bindings s;
  Term goal = parse_term("path(b, W)", s);
  auto rows = memo_solve(p, goal);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(to_string(rows[0][0]), "d");
  EXPECT_THROW(memo_solve(p, parse_term("path(X, W)", s)), InstantiationError);
}

}  // namespace
}  // namespace tabkit
