#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "tabkit/program.hpp"
#include "tabkit/term.hpp"

namespace tabkit {

/// List-reifying memoised nondeterminism over ground values, in
/// continuation-passing style. A computation receives the continuation for
/// its result and returns the concatenated result lists.
namespace memo {

using Values = std::vector<Term>;
using Cont = std::function<Values(const Term&)>;
using Comp = std::function<Values(const Cont&)>;
/// Binary input-output relation.
using Rel = std::function<Comp(const Term&)>;
/// Relation body written against an explicit self parameter.
using OpenRel = std::function<Comp(const Rel& self, const Term& input)>;

Comp pure(Term x);
/// Applies the continuation to each alternative in order.
Comp choose(std::vector<Term> alternatives);
Comp bind(Comp m, std::function<Comp(const Term&)> f);

/// Every result of `root`, in derivation order.
Values run_memo(const Comp& root);

/// Memoised fixpoint of `body`. The first application to an input runs the
/// body as producer; later applications replay the recorded results and
/// register for future ones. New results go to the producer's continuation
/// first, then to the registered consumers, newest first.
Rel memo(OpenRel body);

}  // namespace memo

/// Evaluates a program whose predicates are all binary and whose clauses are
/// ground facts or chain rules p(X,Y) :- q1(X,Z1), q2(Z1,Z2), ..., qn(Zk,Y),
/// by memoising every predicate.
class MemoProgram {
 public:
  /// Throws Error when the program is not of that shape.
  static MemoProgram from_program(const Program& prog);
  /// True when `from_program` would accept `prog`.
  static bool supports(const Program& prog);

  /// Outputs of name/2 for a ground input, deduplicated, in derivation
  /// order. Unknown predicates throw UnknownPredicate.
  memo::Values run(Symbol name, const Term& input) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Answers to a goal name(Input, Out) with ground Input and variable Out, as
/// values for the goal's variables. Used by `tabkit solve --memolist`.
std::vector<std::vector<Term>> memo_solve(const Program& prog, const Term& goal);

}  // namespace tabkit
