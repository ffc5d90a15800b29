#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "oracles/datalog.hpp"
#include "tabkit/program.hpp"
#include "tabkit/term.hpp"

namespace tabkit {
namespace {

Term T(const char* text, Bindings& s) { return parse_term(text, s); }

TEST(Unify, BindsBothSides) {
  Bindings s;
  Term a = T("f(X, b)", s);
  Term b = T("f(a, Y)", s);
  ASSERT_TRUE(unify(a, b, s));
  EXPECT_EQ(to_string(resolve(a)), "f(a,b)");
  EXPECT_EQ(to_string(resolve(b)), "f(a,b)");
  EXPECT_EQ(s.trail_size(), 2u);
}

TEST(Unify, DistinctAtomsFail) {
  Bindings s;
  EXPECT_FALSE(unify(Term::atom("a"), Term::atom("b"), s));
}

TEST(Unify, OccursCheckFails) {
  Bindings s;
  Term x = s.fresh_var();
  Term fx = Term::compound("f", {x});
  EXPECT_FALSE(unify(x, fx, s));
  EXPECT_TRUE(deref(x).is_var());
  EXPECT_EQ(s.trail_size(), 0u);
}

TEST(Unify, RepeatedVariableConflictRestoresBindings) {
  Bindings s;
  Term g = T("g(X, X)", s);
  EXPECT_FALSE(unify(g, T("g(a, b)", s), s));
  EXPECT_EQ(s.trail_size(), 0u);
  EXPECT_TRUE(deref(g.arg(0)).is_var());
}

TEST(Unify, BigIntegersCompareByValue) {
  Bindings s;
  BigInt big = BigInt(1) << 200;
  EXPECT_TRUE(unify(Term::integer(big), Term::integer(big), s));
  EXPECT_FALSE(unify(Term::integer(big), Term::integer(big + 1), s));
}

TEST(Bindings, UndoRestoresCheckpoint) {
  Bindings s;
  Term t = T("h(X, Y, Z)", s);
  auto mark = s.checkpoint();
  ASSERT_TRUE(unify(t, T("h(1, Y2, Y2)", s), s));
  ASSERT_TRUE(unify(t.arg(1), Term::atom("q"), s));
  s.undo_to(mark);
  for (const Term& a : t.args()) EXPECT_TRUE(deref(a).is_var());
  EXPECT_EQ(s.trail_size(), mark);
}

TEST(VariantKey, NumbersVariablesInFirstOccurrenceOrder) {
  Bindings s;
  EXPECT_EQ(to_string(variant_key(T("foo(a, X, Y)", s)).term()), "foo(a,'$VAR'(0),'$VAR'(1))");
  EXPECT_EQ(to_string(variant_key(T("foo(a, X, X)", s)).term()), "foo(a,'$VAR'(0),'$VAR'(0))");
  EXPECT_EQ(to_string(variant_key(T("p(a, b)", s)).term()), "p(a,b)");
}

TEST(VariantKey, DoesNotBindTheCall) {
  Bindings s;
  Term call = T("foo(X, g(Y, X))", s);
  variant_key(call);
  EXPECT_EQ(s.trail_size(), 0u);
  EXPECT_EQ(term_variables(call).size(), 2u);
}

TEST(VariantKey, FollowsBindings) {
  Bindings s;
  Term call = T("foo(X, Y)", s);
  ASSERT_TRUE(unify(call.arg(0), Term::atom("a"), s));
  EXPECT_EQ(variant_key(call), variant_key(T("foo(a, Z)", s)));
}

TEST(TermVariables, DepthFirstFirstOccurrence) {
  Bindings s;
  Term t = T("foo(a, X, Y)", s);
  auto v = term_variables(t);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_TRUE(v[0].same(deref(t.arg(1))));
  EXPECT_TRUE(v[1].same(deref(t.arg(2))));
  EXPECT_TRUE(term_variables(T("p(a, b)", s)).empty());

  Term u = T("f(X, g(Y, X))", s);
  auto w = term_variables(u);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_TRUE(w[0].same(deref(u.arg(0))));
  EXPECT_TRUE(w[1].same(deref(u.arg(1).arg(0))));
}

TEST(RenameFresh, KeepsProtectedVariables) {
  Bindings s;
  Term t = T("f(X, Y)", s);
  Term x = t.arg(0);
  auto [copy, map] = rename_fresh(t, std::vector<Term>{x}, s);
  EXPECT_TRUE(copy.arg(0).same(x));
  EXPECT_TRUE(copy.arg(1).is_var());
  EXPECT_NE(copy.arg(1).var_id(), t.arg(1).var_id());
  ASSERT_EQ(map.size(), 2u);
  EXPECT_TRUE(map.at(x.var_id()).same(x));
}

TEST(RenameFresh, GroundTermUnchanged) {
  Bindings s;
  Term t = T("p(a)", s);
  EXPECT_TRUE(rename_fresh(t, {}, s).first.same(t));
}

TEST(RenameFresh, TwoRenamesAreDisjoint) {
  Bindings s;
  Term t = T("k(A, B, f(C, A))", s);
  auto ids = [](const Term& x) {
    std::set<std::uint64_t> out;
    for (const Term& v : term_variables(x)) out.insert(v.var_id());
    return out;
  };
  auto a = ids(rename_fresh(t, {}, s).first);
  auto b = ids(rename_fresh(t, {}, s).first);
  auto orig = ids(t);
  for (auto id : a) {
    EXPECT_FALSE(b.contains(id));
    EXPECT_FALSE(orig.contains(id));
  }
  EXPECT_EQ(a.size(), 3u);
}

// ---------------------------------------------------------------------------
// Properties over random terms

struct Gen {
  std::mt19937_64 rng;
  Bindings& s;
  std::vector<Term> pool;

  Term term(int depth) {
    int r = std::uniform_int_distribution<int>(0, depth > 0 ? 5 : 2)(rng);
    if (r == 0) return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    if (r == 1) return Term::atom(std::string(1, char('a' + rng() % 3)));
    if (r == 2) return Term::integer(std::int64_t(rng() % 4));
    std::vector<Term> args(1 + rng() % 3);
    for (Term& a : args) a = term(depth - 1);
    return Term::compound(std::string(1, char('f' + rng() % 2)), std::move(args));
  }
};

// Simultaneous traversal with a bijection between variable ids.
bool variant_oracle(const Term& a0, const Term& b0, std::map<std::uint64_t, std::uint64_t>& ab,
                    std::map<std::uint64_t, std::uint64_t>& ba) {
  Term a = deref(a0), b = deref(b0);
  if (a.is_var() != b.is_var()) return false;
  if (a.is_var()) {
    auto [i, fa] = ab.try_emplace(a.var_id(), b.var_id());
    auto [j, fb] = ba.try_emplace(b.var_id(), a.var_id());
    return i->second == b.var_id() && j->second == a.var_id();
  }
  if (a.kind() != b.kind()) return false;
  if (a.is_int()) return a.int_value() == b.int_value();
  if (a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!variant_oracle(a.arg(i), b.arg(i), ab, ba)) return false;
  return true;
}

TEST(TermProperties, VariantKeyMatchesIndependentChecker) {
  Bindings s;
  Gen g{std::mt19937_64(oracle::seed_from_env(11)), s, {}};
  for (int i = 0; i < 4; ++i) g.pool.push_back(s.fresh_var());
  int agree = 0;
  for (int i = 0; i < 3000; ++i) {
    Term a = g.term(3);
    Term b = (i % 3 == 0) ? rename_fresh(a, {}, s).first : g.term(3);
    std::map<std::uint64_t, std::uint64_t> ab, ba;
    bool expect = variant_oracle(a, b, ab, ba);
    ASSERT_EQ(variant_key(a) == variant_key(b), expect) << to_string(a) << " vs " << to_string(b);
    ASSERT_EQ(is_variant(a, b), expect);
    agree += expect;
  }
  EXPECT_GT(agree, 900);
}

TEST(TermProperties, UnifySymmetricAndIdempotent) {
  Bindings s;
  Gen g{std::mt19937_64(oracle::seed_from_env(12)), s, {}};
  for (int i = 0; i < 5; ++i) g.pool.push_back(s.fresh_var());
  for (int i = 0; i < 3000; ++i) {
    Term a = g.term(3), b = g.term(3);
    auto mark = s.checkpoint();
    bool ab = unify(a, b, s);
    Term once = resolve(a);
    if (ab) {
      EXPECT_TRUE(structurally_equal(resolve(a), resolve(b)));
      EXPECT_TRUE(structurally_equal(resolve(once), once));
    }
    s.undo_to(mark);
    bool ba = unify(b, a, s);
    s.undo_to(mark);
    ASSERT_EQ(ab, ba) << to_string(a) << " = " << to_string(b);
  }
}

TEST(TermProperties, UndoIsExact) {
  Bindings s;
  Gen g{std::mt19937_64(oracle::seed_from_env(13)), s, {}};
  for (int i = 0; i < 5; ++i) g.pool.push_back(s.fresh_var());
  for (int i = 0; i < 500; ++i) {
    Term probe = Term::compound("p", g.pool);
    std::string before = to_string(resolve(probe));
    auto mark = s.checkpoint();
    for (int k = 0; k < 4; ++k) unify(g.term(2), g.term(2), s);
    s.undo_to(mark);
    ASSERT_EQ(to_string(resolve(probe)), before);
  }
}

TEST(TermProperties, RenameWithoutProtectionIsVariant) {
  Bindings s;
  Gen g{std::mt19937_64(oracle::seed_from_env(14)), s, {}};
  for (int i = 0; i < 4; ++i) g.pool.push_back(s.fresh_var());
  for (int i = 0; i < 1000; ++i) {
    Term t = g.term(3);
    ASSERT_TRUE(is_variant(t, rename_fresh(t, {}, s).first));
  }
}

}  // namespace
}  // namespace tabkit
