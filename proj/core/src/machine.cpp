#include "tabkit/machine.hpp"

#include <string>

#include "tabkit/builtins.hpp"
#include "tabkit/errors.hpp"

namespace tabkit {

Prompt tab_prompt() {
  static const Prompt p = Symbol::intern("tab");
  return p;
}

// ---------------------------------------------------------------------------
// Goals and frames

namespace {

GoalPtr make_goal(GoalKind k) {
  auto g = std::make_shared<Goal>();
  g->kind = k;
  return g;
}

}  // namespace

GoalPtr Goal::truth() {
  static const GoalPtr g = make_goal(GoalKind::True);
  return g;
}

GoalPtr Goal::failure() {
  static const GoalPtr g = make_goal(GoalKind::Fail);
  return g;
}

GoalPtr Goal::call(Term t) {
  auto g = std::make_shared<Goal>();
  g->kind = GoalKind::Call;
  g->term = std::move(t);
  return g;
}

GoalPtr Goal::conj(GoalPtr l, GoalPtr r) {
  auto g = std::make_shared<Goal>();
  g->kind = GoalKind::Conj;
  g->left = std::move(l);
  g->right = std::move(r);
  return g;
}

GoalPtr Goal::disj(GoalPtr l, GoalPtr r) {
  auto g = std::make_shared<Goal>();
  g->kind = GoalKind::Disj;
  g->left = std::move(l);
  g->right = std::move(r);
  return g;
}

GoalPtr Goal::seq(std::span<const GoalPtr> goals) {
  if (goals.empty()) return truth();
  GoalPtr out = goals.back();
  for (std::size_t i = goals.size() - 1; i-- > 0;) out = conj(goals[i], std::move(out));
  return out;
}

GoalPtr Goal::shift(Prompt p, Term signal) {
  auto g = std::make_shared<Goal>();
  g->kind = GoalKind::Shift;
  g->prompt = p;
  g->term = std::move(signal);
  return g;
}

GoalPtr Goal::reset(Prompt p, GoalPtr body, std::shared_ptr<Handler> h) {
  auto g = std::make_shared<Goal>();
  g->kind = GoalKind::Reset;
  g->prompt = p;
  g->left = std::move(body);
  g->handler = std::move(h);
  return g;
}

GoalPtr Goal::marker(Prompt p, std::shared_ptr<Handler> h) {
  auto g = std::make_shared<Goal>();
  g->kind = GoalKind::Marker;
  g->prompt = p;
  g->handler = std::move(h);
  return g;
}

GoalPtr Goal::native_frame(std::shared_ptr<const NativeFrame> n) {
  auto g = std::make_shared<Goal>();
  g->kind = GoalKind::Native;
  g->native = std::move(n);
  return g;
}

Frame::~Frame() {
  // Unlink uniquely owned successors one at a time so that long stacks do
  // not recurse.
  Frames n = std::move(next);
  while (n && n.use_count() == 1) {
    Frames after = std::move(n->next);
    n.reset();
    n = std::move(after);
  }
}

std::size_t Segment::size() const {
  std::size_t n = 0;
  for (const Frame* f = top.get(); f != stop; f = f->next.get()) ++n;
  return n;
}

namespace {

bool is_true_atom(const Term& t) { return t.is_atom() && t.name() == sym::true_(); }

// Copy of `g` with `f` applied to every term. Returns nullptr for goals that
// have nothing left to do.
GoalPtr map_goal(const GoalPtr& g, const TermMap& f) {
  switch (g->kind) {
    case GoalKind::True: return nullptr;
    case GoalKind::Fail:
    case GoalKind::Marker: return g;
    case GoalKind::Call: {
      if (g->term.ground()) return is_true_atom(g->term) ? nullptr : g;
      Term t = f(g->term);
      if (is_true_atom(t)) return nullptr;
      return Goal::call(std::move(t));
    }
    case GoalKind::Conj: {
      GoalPtr l = map_goal(g->left, f);
      GoalPtr r = map_goal(g->right, f);
      if (!l) return r;
      if (!r) return l;
      return Goal::conj(std::move(l), std::move(r));
    }
    case GoalKind::Disj: {
      GoalPtr l = map_goal(g->left, f);
      GoalPtr r = map_goal(g->right, f);
      return Goal::disj(l ? l : Goal::truth(), r ? r : Goal::truth());
    }
    case GoalKind::Shift: return Goal::shift(g->prompt, f(g->term));
    case GoalKind::Reset: {
      GoalPtr body = map_goal(g->left, f);
      return Goal::reset(g->prompt, body ? body : Goal::truth(), g->handler);
    }
    case GoalKind::Native: return Goal::native_frame(g->native->map_terms(f));
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// Machine

Machine::Machine(const Database* db) : db_(db) {}

Machine::~Machine() {
  choices_.clear();
  frames_.reset();
}

void Machine::start(GoalPtr goal) {
  choices_.clear();
  bindings_.undo_to(0);
  frames_ = std::make_shared<const Frame>(std::move(goal), nullptr);
  need_backtrack_ = false;
  started_ = true;
}

bool Machine::next() {
  if (!started_) return false;
  if (need_backtrack_) {
    need_backtrack_ = false;
    if (!backtrack()) {
      started_ = false;
      return false;
    }
  }
  if (run()) {
    need_backtrack_ = true;
    return true;
  }
  started_ = false;
  return false;
}

void Machine::tick() {
  ++steps_;
  if (budget_ != 0 && steps_ > budget_) throw StepBudgetExceeded(budget_);
}

void Machine::push(GoalPtr g) {
  frames_ = std::make_shared<const Frame>(std::move(g), std::move(frames_));
}

void Machine::push_segment(const Segment& seg) {
  std::vector<GoalPtr> goals;
  for (const Frame* f = seg.top.get(); f != seg.stop; f = f->next.get()) goals.push_back(f->goal);
  for (auto it = goals.rbegin(); it != goals.rend(); ++it) push(*it);
}

void Machine::push_alternatives(std::shared_ptr<Generator> gen) {
  choices_.push_back(ChoicePoint{bindings_.checkpoint(), frames_, GenChoice{std::move(gen)}});
}

bool Machine::run() {
  for (;;) {
    if (!frames_) return true;
    GoalPtr g = frames_->goal;
    frames_ = frames_->next;
    tick();
    if (!step(g) && !backtrack()) return false;
  }
}

bool Machine::step(const GoalPtr& g) {
  switch (g->kind) {
    case GoalKind::True:
    case GoalKind::Marker: return true;
    case GoalKind::Fail: return false;
    case GoalKind::Call: return call(g->term);
    case GoalKind::Conj:
      push(g->right);
      push(g->left);
      return true;
    case GoalKind::Disj:
      choices_.push_back(ChoicePoint{bindings_.checkpoint(), frames_, GoalChoice{g->right}});
      push(g->left);
      return true;
    case GoalKind::Shift: return shift(g->prompt, g->term);
    case GoalKind::Reset:
      push(Goal::marker(g->prompt, g->handler));
      push(g->left);
      return true;
    case GoalKind::Native: return g->native->run(*this);
  }
  return false;
}

bool Machine::call(const Term& t) {
  Term d = deref(t);
  switch (d.kind()) {
    case TermKind::Var: throw InstantiationError("call: unbound goal");
    case TermKind::Atom:
    case TermKind::Struct: break;
    default: throw TypeError("call: callable expected, got " + to_string(d));
  }
  Symbol f = d.name();
  auto arity = static_cast<std::uint32_t>(d.arity());
  if (arity == 2 && f == sym::comma()) {
    push(Goal::call(d.arg(1)));
    push(Goal::call(d.arg(0)));
    return true;
  }
  if (arity == 2 && f == sym::semicolon()) {
    choices_.push_back(
        ChoicePoint{bindings_.checkpoint(), frames_, GoalChoice{Goal::call(d.arg(1))}});
    push(Goal::call(d.arg(0)));
    return true;
  }
  if (arity == 0) {
    if (f == sym::true_()) return true;
    if (f == sym::fail()) return false;
  }
  if (arity == 1 && f == sym::tabled_call()) return shift(tab_prompt(), d.arg(0));
  if (BuiltinFn fn = find_builtin(f, arity)) return fn(*this, d.args());
  return call_user(d);
}

bool Machine::call_user(const Term& t) {
  auto arity = static_cast<std::uint32_t>(t.arity());
  const Predicate* pred = db_ ? db_->find(t.name(), arity) : nullptr;
  if (!pred) throw UnknownPredicate("unknown predicate " + to_string(PredicateId{t.name(), arity}));
  std::span<const std::uint32_t> cands =
      arity == 0 ? pred->candidates(t) : pred->candidates(deref(t.arg(0)));
  if (cands.empty()) return false;
  if (cands.size() > 1)
    choices_.push_back(
        ChoicePoint{bindings_.checkpoint(), frames_, ClauseChoice{pred, cands, 1, t}});
  return try_clause(*pred, cands[0], t);
}

bool Machine::try_clause(const Predicate& pred, std::uint32_t index, const Term& goal) {
  const Clause& c = pred.clauses()[index];
  env_.assign(c.nvars, Term());
  if (!unify_head(c.head, goal, env_, bindings_)) return false;
  if (!is_true_atom(c.body)) push(Goal::call(instantiate(c.body, env_, bindings_)));
  return true;
}

bool Machine::shift(Prompt p, const Term& signal) {
  const Frame* f = frames_.get();
  while (f && !(f->goal->kind == GoalKind::Marker && f->goal->prompt == p)) f = f->next.get();
  if (!f) throw UnhandledShift("shift to prompt " + std::string(p.name()) + " outside any reset");
  Segment seg{frames_, f};
  GoalPtr marker = f->goal;
  frames_ = f->next;
  return marker->handler->on_shift(*this, marker, signal, seg);
}

bool Machine::backtrack() {
  while (!choices_.empty()) {
    tick();
    ChoicePoint& cp = choices_.back();
    bindings_.undo_to(cp.mark);
    frames_ = cp.frames;
    if (auto* c = std::get_if<ClauseChoice>(&cp.alt)) {
      const Predicate* pred = c->pred;
      std::uint32_t index = c->candidates[c->next++];
      Term goal = c->goal;
      if (c->next >= c->candidates.size()) choices_.pop_back();
      if (try_clause(*pred, index, goal)) return true;
      continue;
    }
    if (auto* g = std::get_if<GoalChoice>(&cp.alt)) {
      GoalPtr goal = std::move(g->goal);
      choices_.pop_back();
      push(std::move(goal));
      return true;
    }
    auto gen = std::get<GenChoice>(cp.alt).gen;
    std::size_t depth = choices_.size();
    if (gen->exhausted() || !gen->next(*this)) {
      choices_.erase(choices_.begin() + static_cast<std::ptrdiff_t>(depth - 1));
      continue;
    }
    if (gen->exhausted()) choices_.erase(choices_.begin() + static_cast<std::ptrdiff_t>(depth - 1));
    return true;
  }
  return false;
}

ContinuationPtr Machine::capture(const Segment& seg, std::vector<Term> params) {
  auto k = std::make_shared<Continuation>();
  TermMap snap = [](const Term& t) { return resolve(t); };
  for (const Frame* f = seg.top.get(); f != seg.stop; f = f->next.get())
    if (GoalPtr g = map_goal(f->goal, snap)) k->frames.push_back(std::move(g));
  for (Term& p : params) p = resolve(p);
  k->params = std::move(params);
  ++stats_.captures;
  stats_.cont_frames_total += k->frames.size();
  if (k->frames.size() > stats_.max_cont_frames) stats_.max_cont_frames = k->frames.size();
  return k;
}

ContinuationPtr Machine::detach(const Continuation& k) {
  auto out = std::make_shared<Continuation>();
  Renamer r(bindings_);
  TermMap f = [&r](const Term& t) { return r(t); };
  out->frames.reserve(k.frames.size());
  for (const GoalPtr& g : k.frames)
    if (GoalPtr m = map_goal(g, f)) out->frames.push_back(std::move(m));
  out->params.reserve(k.params.size());
  for (const Term& p : k.params) out->params.push_back(r(p));
  return out;
}

GoalPtr Machine::resume(const Continuation& k, std::span<const Term> args) {
  if (args.size() != k.params.size())
    throw ArityMismatch("resume: continuation has " + std::to_string(k.params.size()) +
                        " parameter slots, got " + std::to_string(args.size()));
  ++stats_.resumes;
  VarMap seed;
  std::vector<std::size_t> repeated;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Term p = deref(k.params[i]);
    if (p.is_var() && seed.try_emplace(p.var_id(), args[i]).second) continue;
    repeated.push_back(i);
  }
  Renamer r(bindings_, std::move(seed));
  TermMap f = [&r](const Term& t) { return r(t); };
  std::vector<GoalPtr> goals;
  goals.reserve(repeated.size() + k.frames.size());
  for (std::size_t i : repeated)
    goals.push_back(Goal::call(Term::compound("=", {r(k.params[i]), args[i]})));
  for (const GoalPtr& g : k.frames)
    if (GoalPtr m = map_goal(g, f)) goals.push_back(std::move(m));
  return Goal::seq(goals);
}

// ---------------------------------------------------------------------------
// Streams

SolutionStream::SolutionStream(std::shared_ptr<Machine> m, std::vector<Term> vars)
    : machine_(std::move(m)), vars_(std::move(vars)) {}

std::optional<std::vector<Term>> SolutionStream::next() {
  if (!machine_->next()) return std::nullopt;
  std::vector<Term> out;
  out.reserve(vars_.size());
  for (const Term& v : vars_) out.push_back(resolve(v));
  return out;
}

SolutionStream solve(std::shared_ptr<Machine> m, const Term& query) {
  std::vector<Term> vars = term_variables(query);
  m->start(Goal::call(query));
  return SolutionStream(std::move(m), std::move(vars));
}

struct ResetRun::State {
  std::optional<ResetResult> pending;
  ResetResult last;
};

namespace {

class RecordingHandler final : public Handler {
 public:
  explicit RecordingHandler(std::shared_ptr<void> state, std::optional<ResetResult>* slot)
      : state_(std::move(state)), slot_(slot) {}

  bool on_shift(Machine& m, const GoalPtr&, const Term& signal, const Segment& seg) override {
    *slot_ = ResetResult{ResetResult::Kind::Susp, signal, m.capture(seg, {})};
    return true;
  }

 private:
  std::shared_ptr<void> state_;
  std::optional<ResetResult>* slot_;
};

class ReportFrame final : public NativeFrame {
 public:
  ReportFrame(std::optional<ResetResult>* pending, ResetResult* last)
      : pending_(pending), last_(last) {}

  bool run(Machine&) const override {
    *last_ = pending_->has_value() ? std::move(**pending_) : ResetResult{};
    pending_->reset();
    return true;
  }
  std::shared_ptr<const NativeFrame> map_terms(const TermMap&) const override {
    return std::make_shared<ReportFrame>(pending_, last_);
  }

 private:
  std::optional<ResetResult>* pending_;
  ResetResult* last_;
};

}  // namespace

ResetRun::ResetRun(std::shared_ptr<Machine> m, Prompt p, GoalPtr goal)
    : machine_(std::move(m)), state_(std::make_shared<State>()) {
  auto h = std::make_shared<RecordingHandler>(state_, &state_->pending);
  auto report = std::make_shared<ReportFrame>(&state_->pending, &state_->last);
  std::vector<GoalPtr> seq{Goal::reset(p, std::move(goal), std::move(h)),
                           Goal::native_frame(std::move(report))};
  machine_->start(Goal::seq(seq));
}

std::optional<ResetResult> ResetRun::next() {
  if (!machine_->next()) return std::nullopt;
  return state_->last;
}

}  // namespace tabkit
