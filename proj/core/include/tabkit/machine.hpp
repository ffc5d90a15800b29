#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tabkit/database.hpp"
#include "tabkit/term.hpp"

namespace tabkit {

class Machine;
class Handler;
class NativeFrame;
struct Goal;

using GoalPtr = std::shared_ptr<const Goal>;
using TermMap = std::function<Term(const Term&)>;

/// Delimiter name. Prompts compare by symbol.
using Prompt = Symbol;

enum class GoalKind : std::uint8_t {
  True,
  Fail,
  Call,
  Conj,
  Disj,
  Shift,
  Reset,
  /// Pushed by Reset; popping it normally is the Done outcome.
  Marker,
  Native,
};

struct Goal {
  GoalKind kind = GoalKind::True;
  Term term;  // Call: the goal; Shift: the signal
  Prompt prompt;
  GoalPtr left;   // Conj/Disj left, Reset body
  GoalPtr right;  // Conj/Disj right
  std::shared_ptr<Handler> handler;
  std::shared_ptr<const NativeFrame> native;

  static GoalPtr truth();
  static GoalPtr failure();
  static GoalPtr call(Term t);
  static GoalPtr conj(GoalPtr l, GoalPtr r);
  static GoalPtr disj(GoalPtr l, GoalPtr r);
  /// Right-nested conjunction; empty gives True.
  static GoalPtr seq(std::span<const GoalPtr> goals);
  static GoalPtr shift(Prompt p, Term signal);
  static GoalPtr reset(Prompt p, GoalPtr body, std::shared_ptr<Handler> h);
  static GoalPtr marker(Prompt p, std::shared_ptr<Handler> h);
  static GoalPtr native_frame(std::shared_ptr<const NativeFrame> n);
};

/// Persistent goal stack. Nodes are shared between the machine and its
/// choice points.
struct Frame {
  Frame(GoalPtr g, std::shared_ptr<const Frame> n) : goal(std::move(g)), next(std::move(n)) {}
  ~Frame();
  Frame(const Frame&) = delete;
  Frame& operator=(const Frame&) = delete;

  GoalPtr goal;
  mutable std::shared_ptr<const Frame> next;
};
using Frames = std::shared_ptr<const Frame>;

/// The frames between a shift and its marker: `top` down to, excluding,
/// `stop`.
struct Segment {
  Frames top;
  const Frame* stop = nullptr;

  std::size_t size() const;
};

/// Host-implemented goal. `run` returning false fails the current branch.
class NativeFrame {
 public:
  virtual ~NativeFrame() = default;
  virtual bool run(Machine& m) const = 0;
  /// Copy with every embedded term replaced by `f(term)`. Used when the frame
  /// is captured into a continuation and when that continuation is resumed.
  virtual std::shared_ptr<const NativeFrame> map_terms(const TermMap& f) const = 0;
};

/// Receives shifts aimed at the marker it was installed with.
class Handler {
 public:
  virtual ~Handler() = default;
  /// The segment and the marker have already been removed: the machine's
  /// frames are those below the marker. Returning false fails the branch.
  virtual bool on_shift(Machine& m, const GoalPtr& marker, const Term& signal,
                        const Segment& segment) = 0;
};

/// Source of alternatives for a choice point. The machine restores the trail
/// and frames saved at push time before every call to `next`.
class Generator {
 public:
  virtual ~Generator() = default;
  /// Installs the next alternative and returns true, or returns false when
  /// there is none left.
  virtual bool next(Machine& m) = 0;
  /// True when a further `next` would certainly return false.
  virtual bool exhausted() const { return false; }
};

/// Multiply-resumable snapshot of a delimited segment. Terms are resolved
/// against the bindings in force at capture time; `params` are the slots
/// bound by `Machine::resume`.
struct Continuation {
  std::vector<GoalPtr> frames;  // top first
  std::vector<Term> params;
};
using ContinuationPtr = std::shared_ptr<const Continuation>;

struct ResetResult {
  enum class Kind { Done, Susp };
  Kind kind = Kind::Done;
  Term signal;
  ContinuationPtr cont;
};

struct MachineStats {
  std::uint64_t captures = 0;
  std::uint64_t cont_frames_total = 0;
  std::uint64_t max_cont_frames = 0;
  std::uint64_t resumes = 0;
};

/// Nondeterministic goal interpreter: depth-first, left-to-right, clause
/// order, with trail-based backtracking and multi-prompt reset/shift.
class Machine {
 public:
  explicit Machine(const Database* db = nullptr);
  ~Machine();
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  Bindings& bindings() noexcept { return bindings_; }
  const Database* database() const noexcept { return db_; }

  /// 0 disables the budget.
  void set_step_budget(std::uint64_t max_steps) noexcept { budget_ = max_steps; }
  std::uint64_t steps() const noexcept { return steps_; }
  const MachineStats& stats() const noexcept { return stats_; }

  /// Discards any previous run and schedules `goal`. An empty goal stack is
  /// a solution.
  void start(GoalPtr goal);
  /// Runs to the next solution. Returns false once the search space is
  /// exhausted. Each call after a solution backtracks into it first.
  bool next();

  // Interface for handlers, native frames and generators.
  const Frames& frames() const noexcept { return frames_; }
  void push(GoalPtr g);
  void push_segment(const Segment& seg);
  /// Adds a choice point over `gen`. Callers usually return false right
  /// after, so that the machine immediately backtracks into the first
  /// alternative.
  void push_alternatives(std::shared_ptr<Generator> gen);
  /// Snapshot of `seg`. Free variables stay shared with the live computation.
  ContinuationPtr capture(const Segment& seg, std::vector<Term> params);
  /// Consistent fresh renaming of every variable of `k`, parameters included.
  ContinuationPtr detach(const Continuation& k);
  /// Fresh copy of `k` with parameter slots replaced by `args`. Never binds
  /// variables. Throws ArityMismatch when the counts differ.
  GoalPtr resume(const Continuation& k, std::span<const Term> args);

 private:
  struct ClauseChoice {
    const Predicate* pred;
    std::span<const std::uint32_t> candidates;
    std::size_t next;
    Term goal;
  };
  struct GoalChoice {
    GoalPtr goal;
  };
  struct GenChoice {
    std::shared_ptr<Generator> gen;
  };
  struct ChoicePoint {
    Bindings::Checkpoint mark;
    Frames frames;
    std::variant<ClauseChoice, GoalChoice, GenChoice> alt;
  };

  bool run();
  bool step(const GoalPtr& g);
  bool call(const Term& t);
  bool call_user(const Term& t);
  bool try_clause(const Predicate& pred, std::uint32_t index, const Term& goal);
  bool shift(Prompt p, const Term& signal);
  bool backtrack();
  void tick();

  const Database* db_;
  Bindings bindings_;
  Frames frames_;
  std::vector<ChoicePoint> choices_;
  std::uint64_t budget_ = 0;
  std::uint64_t steps_ = 0;
  MachineStats stats_;
  bool started_ = false;
  bool need_backtrack_ = false;
  std::vector<Term> env_;
};

/// Pull-based stream of query answers. Each element holds the values of the
/// query variables (in `term_variables` order) with bindings resolved in.
class SolutionStream {
 public:
  SolutionStream(std::shared_ptr<Machine> m, std::vector<Term> vars);

  std::optional<std::vector<Term>> next();
  Machine& machine() noexcept { return *machine_; }
  const std::vector<Term>& variables() const noexcept { return vars_; }

 private:
  std::shared_ptr<Machine> machine_;
  std::vector<Term> vars_;
};

/// Plain SLD resolution of `query`, whose variables must come from
/// `m->bindings()`.
SolutionStream solve(std::shared_ptr<Machine> m, const Term& query);

/// Runs reset(p, goal) and reports each outcome: Done for every success that
/// leaves the marker, Susp for every shift to `p`.
class ResetRun {
 public:
  ResetRun(std::shared_ptr<Machine> m, Prompt p, GoalPtr goal);
  std::optional<ResetResult> next();

 private:
  struct State;
  std::shared_ptr<Machine> machine_;
  std::shared_ptr<State> state_;
};

/// Prompt used by the tabling layer.
Prompt tab_prompt();

}  // namespace tabkit
