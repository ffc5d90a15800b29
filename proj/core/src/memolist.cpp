#include "tabkit/memolist.hpp"

#include <unordered_map>
#include <unordered_set>

#include "tabkit/errors.hpp"

namespace tabkit {

namespace memo {

Comp pure(Term x) {
  return [x = std::move(x)](const Cont& k) { return k(x); };
}

Comp choose(std::vector<Term> alternatives) {
  return [xs = std::move(alternatives)](const Cont& k) {
    Values out;
    for (const Term& x : xs) {
      Values r = k(x);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  };
}

Comp bind(Comp m, std::function<Comp(const Term&)> f) {
  // Continuations may be stored as memo consumers and outlive this call, so
  // they own what they refer to.
  auto fp = std::make_shared<const std::function<Comp(const Term&)>>(std::move(f));
  return [m = std::move(m), fp](const Cont& k) {
    return m([fp, k](const Term& x) { return (*fp)(x)(k); });
  };
}

Values run_memo(const Comp& root) {
  return root([](const Term& x) { return Values{x}; });
}

namespace {

struct Entry {
  Values results;
  std::unordered_set<Term, TermHash, TermEqual> seen;
  std::vector<Cont> consumers;  // newest first
};

struct MemoState {
  OpenRel body;
  std::unordered_map<Term, Entry, TermHash, TermEqual> table;
};

struct MemoRel {
  std::shared_ptr<MemoState> state;

  Comp operator()(const Term& x) const {
    return [state = state, x](const Cont& k) -> Values {
      auto it = state->table.find(x);
      if (it != state->table.end()) {
        Entry& e = it->second;
        e.consumers.insert(e.consumers.begin(), k);
        Values out;
        std::size_t known = e.results.size();
        for (std::size_t i = 0; i < known; ++i) {
          Term y = e.results[i];
          Values r = k(y);
          out.insert(out.end(), r.begin(), r.end());
        }
        return out;
      }
      state->table.emplace(x, Entry{});
      Comp producer = state->body(Rel(MemoRel{state}), x);
      return producer([state, x, k](const Term& y0) -> Values {
        Term y = y0;
        Entry& e = state->table.at(x);
        if (!e.seen.insert(y).second) return {};
        e.results.push_back(y);
        std::vector<Cont> targets;
        targets.reserve(e.consumers.size() + 1);
        targets.push_back(k);
        targets.insert(targets.end(), e.consumers.begin(), e.consumers.end());
        Values out;
        for (const Cont& c : targets) {
          Values r = c(y);
          out.insert(out.end(), r.begin(), r.end());
        }
        return out;
      });
    };
  }
};

}  // namespace

Rel memo(OpenRel body) {
  auto state = std::make_shared<MemoState>();
  state->body = std::move(body);
  return MemoRel{std::move(state)};
}

}  // namespace memo

// ---------------------------------------------------------------------------
// Program translation

struct MemoProgram::Impl {
  struct Shape {
    bool fact = false;
    Term in;
    Term out;
    std::vector<Symbol> chain;
  };
  std::unordered_map<Symbol, std::vector<Shape>> preds;
};

namespace {

// Chain rule p(X,Y) :- q1(X,Z1), ..., qn(Zk,Y) over clause-local slots.
bool chain_shape(const Clause& c, std::vector<Symbol>& chain, std::string& why) {
  const Term& x = c.head.arg(0);
  const Term& y = c.head.arg(1);
  if (!x.is_local() || !y.is_local() || x.local_index() == y.local_index()) {
    why = "rule head must be p(X,Y) with distinct variables";
    return false;
  }
  std::vector<Term> goals;
  Term body = c.body;
  while (body.is_struct() && body.arity() == 2 && body.name() == sym::comma()) {
    goals.push_back(body.arg(0));
    body = body.arg(1);
  }
  goals.push_back(body);
  std::unordered_set<std::uint32_t> used{x.local_index(), y.local_index()};
  std::uint32_t link = x.local_index();
  for (std::size_t i = 0; i < goals.size(); ++i) {
    const Term& g = goals[i];
    if (!(g.is_struct() && g.arity() == 2 && g.arg(0).is_local() && g.arg(1).is_local())) {
      why = "body goal " + to_string(g) + " is not a binary call over variables";
      return false;
    }
    if (g.arg(0).local_index() != link) {
      why = "body is not a chain";
      return false;
    }
    std::uint32_t next = g.arg(1).local_index();
    bool last = i + 1 == goals.size();
    if (last ? next != y.local_index() : !used.insert(next).second) {
      why = "body is not a chain";
      return false;
    }
    link = next;
    chain.push_back(g.name());
  }
  return true;
}

std::shared_ptr<MemoProgram::Impl> translate(const Program& prog, std::string& why) {
  auto impl = std::make_shared<MemoProgram::Impl>();
  for (const Clause& c : prog.clauses()) {
    if (c.head.arity() != 2) {
      why = "predicate " + std::string(c.head.name().name()) + " is not binary";
      return nullptr;
    }
    MemoProgram::Impl::Shape s;
    bool is_fact = c.body.is_atom() && c.body.name() == sym::true_();
    if (is_fact) {
      if (!c.head.ground()) {
        why = "fact " + to_string(c.head) + " is not ground";
        return nullptr;
      }
      s.fact = true;
      s.in = c.head.arg(0);
      s.out = c.head.arg(1);
    } else if (!chain_shape(c, s.chain, why)) {
      return nullptr;
    }
    impl->preds[c.head.name()].push_back(std::move(s));
  }
  for (PredicateId id : prog.table_directives()) {
    if (id.arity != 2) {
      why = "tabled predicate " + to_string(id) + " is not binary";
      return nullptr;
    }
    impl->preds.try_emplace(id.name);
  }
  for (const auto& [name, shapes] : impl->preds)
    for (const auto& s : shapes)
      for (Symbol q : s.chain)
        if (!impl->preds.contains(q)) {
          why = "unknown predicate " + std::string(q.name()) + "/2";
          return nullptr;
        }
  return impl;
}

}  // namespace

bool MemoProgram::supports(const Program& prog) {
  std::string why;
  return translate(prog, why) != nullptr;
}

MemoProgram MemoProgram::from_program(const Program& prog) {
  std::string why;
  auto impl = translate(prog, why);
  if (!impl) throw Error("memolist: " + why);
  MemoProgram p;
  p.impl_ = std::move(impl);
  return p;
}

memo::Values MemoProgram::run(Symbol name, const Term& input) const {
  if (!impl_->preds.contains(name)) throw UnknownPredicate("unknown predicate " + std::string(name.name()) + "/2");
  // Fresh memo tables for every run. Relations find each other through this
  // registry, which outlives the computation.
  std::unordered_map<Symbol, memo::Rel> registry;
  const Impl* impl = impl_.get();
  auto* reg = &registry;
  for (const auto& [pred, shapes] : impl->preds) {
    const auto* clauses = &shapes;
    registry.emplace(pred, memo::memo([clauses, reg](const memo::Rel&, const Term& x) {
      std::vector<Term> indices;
      for (std::size_t i = 0; i < clauses->size(); ++i)
        indices.push_back(Term::integer(static_cast<std::int64_t>(i)));
      return memo::bind(memo::choose(std::move(indices)), [clauses, reg, x](const Term& u) {
        const auto& c = (*clauses)[static_cast<std::size_t>(u.int_value())];
        if (c.fact) return structurally_equal(c.in, x) ? memo::pure(c.out) : memo::choose({});
        memo::Comp m = reg->at(c.chain[0])(x);
        for (std::size_t i = 1; i < c.chain.size(); ++i) {
          Symbol q = c.chain[i];
          m = memo::bind(std::move(m), [reg, q](const Term& z) { return reg->at(q)(z); });
        }
        return m;
      });
    }));
  }
  memo::Values all = memo::run_memo(registry.at(name)(input));
  memo::Values out;
  std::unordered_set<Term, TermHash, TermEqual> seen;
  for (Term& v : all)
    if (seen.insert(v).second) out.push_back(std::move(v));
  return out;
}

std::vector<std::vector<Term>> memo_solve(const Program& prog, const Term& goal) {
  Term g = deref(goal);
  if (!(g.is_struct() && g.arity() == 2))
    throw Error("memolist: goal must be name(Input, Output)");
  Term in = resolve(g.arg(0));
  Term out = deref(g.arg(1));
  if (!in.ground()) throw InstantiationError("memolist: input argument must be ground");
  MemoProgram mp = MemoProgram::from_program(prog);
  std::vector<Term> vars = term_variables(g);
  std::vector<std::vector<Term>> answers;
  Bindings scratch;
  for (const Term& y : mp.run(g.name(), in)) {
    // Match the output argument against each value without touching the
    // caller's variables.
    auto [pattern, map] = rename_fresh(out, {}, scratch);
    auto mark = scratch.checkpoint();
    if (!unify(pattern, y, scratch)) continue;
    std::vector<Term> row;
    for (const Term& v : vars) {
      auto it = map.find(v.var_id());
      row.push_back(it == map.end() ? v : resolve(it->second));
    }
    scratch.undo_to(mark);
    answers.push_back(std::move(row));
  }
  return answers;
}

}  // namespace tabkit
