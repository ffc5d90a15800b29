#include "tabkit/tabling.hpp"

#include "tabkit/program.hpp"

namespace tabkit {

// ---------------------------------------------------------------------------
// TableStore

TableEntry* TableStore::find(const VariantKey& key) {
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : it->second.get();
}

const TableEntry* TableStore::find(const VariantKey& key) const {
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : it->second.get();
}

const TableEntry* TableStore::find_call(const Term& call) const { return find(table_key(call)); }

TableEntry& TableStore::create(const VariantKey& key) {
  auto [it, inserted] = map_.try_emplace(key);
  if (inserted) {
    it->second = std::make_unique<TableEntry>();
    it->second->key = key;
    order_.push_back(it->second.get());
  }
  return *it->second;
}

VariantKey table_key(const Term& call) {
  Term d = deref(call);
  if (d.is_callable()) {
    Symbol user = strip_worker_name(d.name());
    if (user != d.name()) {
      d = d.is_atom() ? Term::atom(user)
                      : Term::compound(user, std::vector<Term>(d.args().begin(), d.args().end()));
    }
  }
  return variant_key(d);
}

std::unordered_map<VariantKey, TableSummary, VariantKeyHash> table_dump(const TableStore& store) {
  std::unordered_map<VariantKey, TableSummary, VariantKeyHash> out;
  for (const TableEntry* e : store.entries())
    out.emplace(e->key, TableSummary{e->answers.size(), e->continuation_count()});
  return out;
}

// ---------------------------------------------------------------------------
// Run state and handler

struct TabledRun::State {
  TableStore store;
  std::vector<Term> ans;
  VariantKey query_key;
  Metrics metrics;
  std::uint64_t ordinal = 0;
  bool keep_events = false;
  std::vector<AnswerEvent> events;
  std::function<void(const AnswerEvent&)> listener;

  void emit(EventKind kind, const VariantKey& key, Term tuple = Term()) {
    AnswerEvent e{kind, key, std::move(tuple), ++ordinal};
    record(e, metrics);
    if (listener) listener(e);
    if (keep_events) events.push_back(std::move(e));
  }
};

namespace {

using State = TabledRun::State;

Term tuple_of(std::vector<Term> items) { return Term::compound(sym::tuple(), std::move(items)); }

std::vector<Term> tuple_items(const Term& t) {
  if (!t.is_struct()) return {};
  return std::vector<Term>(t.args().begin(), t.args().end());
}

// Feeds a new consumer the answers present when it registered.
class ConsumerAnswers final : public Generator {
 public:
  ConsumerAnswers(const TableEntry* entry, std::size_t count, Term ytuple, Segment seg,
                  GoalPtr marker)
      : entry_(entry), count_(count), ytuple_(std::move(ytuple)), seg_(std::move(seg)),
        marker_(std::move(marker)) {}

  bool next(Machine& m) override {
    while (next_ < count_) {
      const VariantKey& answer = entry_->answers[next_++];
      if (!unify(ytuple_, from_variant_key(answer, m.bindings()), m.bindings())) continue;
      m.push(marker_);
      m.push_segment(seg_);
      return true;
    }
    return false;
  }
  bool exhausted() const override { return next_ >= count_; }

 private:
  const TableEntry* entry_;
  std::size_t count_;
  std::size_t next_ = 0;
  Term ytuple_;
  Segment seg_;
  GoalPtr marker_;
};

// Sends one new answer to the continuation list, producer first.
class Dispatch final : public Generator {
 public:
  Dispatch(const TableEntry* entry, std::vector<Term> args, std::size_t consumers)
      : entry_(entry), args_(std::move(args)), consumers_(consumers) {}

  bool next(Machine& m) override {
    if (next_ > consumers_) return false;
    std::size_t i = next_++;
    const Continuation& k = i == 0 ? *entry_->producer : *entry_->consumers[consumers_ - i];
    m.push(m.resume(k, args_));
    return true;
  }
  bool exhausted() const override { return next_ > consumers_; }

 private:
  const TableEntry* entry_;
  std::vector<Term> args_;  // answer values, then the query variables
  std::size_t consumers_;
  std::size_t next_ = 0;
};

// Runs after each success of a producer's clauses.
class ProducerAfter final : public NativeFrame {
 public:
  ProducerAfter(TableEntry* entry, Term ytuple, State* state)
      : entry_(entry), ytuple_(std::move(ytuple)), state_(state) {}

  bool run(Machine& m) const override {
    Term tuple = resolve(ytuple_);
    VariantKey answer = variant_key(tuple);
    if (!entry_->answer_set.insert(answer).second) {
      state_->emit(EventKind::AnswerDuplicate, entry_->key, answer.term());
      return false;
    }
    entry_->answers.push_back(answer);
    state_->emit(EventKind::AnswerInserted, entry_->key, answer.term());
    std::vector<Term> args = tuple_items(tuple);
    args.insert(args.end(), state_->ans.begin(), state_->ans.end());
    m.push_alternatives(std::make_shared<Dispatch>(entry_, std::move(args), entry_->consumers.size()));
    return false;
  }

  std::shared_ptr<const NativeFrame> map_terms(const TermMap& f) const override {
    return std::make_shared<ProducerAfter>(entry_, f(ytuple_), state_);
  }

 private:
  TableEntry* entry_;
  Term ytuple_;
  State* state_;
};

class TablingHandler final : public Handler {
 public:
  explicit TablingHandler(State* state) : state_(state) {}

  bool on_shift(Machine& m, const GoalPtr& marker, const Term& signal,
                const Segment& seg) override {
    Term head = resolve(signal);
    VariantKey key = table_key(head);
    std::vector<Term> y = term_variables(head);
    std::vector<Term> params = y;
    params.insert(params.end(), state_->ans.begin(), state_->ans.end());
    ContinuationPtr k = m.detach(*m.capture(seg, std::move(params)));

    if (TableEntry* entry = state_->store.find(key)) {
      entry->consumers.push_back(std::move(k));
      state_->emit(EventKind::ConsumerRegistered, key);
      std::size_t count = entry->answers.size();
      if (count == 0) return false;
      m.push_alternatives(
          std::make_shared<ConsumerAnswers>(entry, count, tuple_of(std::move(y)), seg, marker));
      return false;
    }

    TableEntry& entry = state_->store.create(key);
    entry.producer = std::move(k);
    state_->emit(EventKind::ProducerStarted, key);
    Term work = rename_fresh(head, {}, m.bindings()).first;
    Term ytuple = tuple_of(term_variables(work));
    m.push(marker);
    m.push(Goal::native_frame(std::make_shared<ProducerAfter>(&entry, std::move(ytuple), state_)));
    m.push(Goal::call(std::move(work)));
    return true;
  }

 private:
  State* state_;
};

class EmitFrame final : public NativeFrame {
 public:
  explicit EmitFrame(State* state) : state_(state) {}

  bool run(Machine&) const override {
    state_->emit(EventKind::AnswerEmitted, state_->query_key,
                 variant_key(tuple_of(state_->ans)).term());
    return true;
  }
  std::shared_ptr<const NativeFrame> map_terms(const TermMap&) const override {
    return std::make_shared<EmitFrame>(state_);
  }

 private:
  State* state_;
};

}  // namespace

// ---------------------------------------------------------------------------
// TabledRun

TabledRun::TabledRun(std::shared_ptr<Machine> m, const Term& query, TabledOptions opts)
    : machine_(std::move(m)), state_(std::make_shared<State>()) {
  state_->ans = term_variables(query);
  state_->query_key = table_key(query);
  state_->keep_events = opts.keep_events;
  state_->listener = std::move(opts.listener);
  auto handler = std::make_shared<TablingHandler>(state_.get());
  std::vector<GoalPtr> seq{Goal::reset(tab_prompt(), Goal::call(query), std::move(handler)),
                           Goal::native_frame(std::make_shared<EmitFrame>(state_.get()))};
  machine_->start(Goal::seq(seq));
}

TabledRun::~TabledRun() {
  // Frames and choice points point into the state; drop them first.
  if (machine_) machine_->start(Goal::truth());
}

TabledRun::TabledRun(TabledRun&&) noexcept = default;
TabledRun& TabledRun::operator=(TabledRun&&) noexcept = default;

std::optional<std::vector<Term>> TabledRun::next() {
  if (!machine_->next()) return std::nullopt;
  std::vector<Term> out;
  out.reserve(state_->ans.size());
  for (const Term& v : state_->ans) out.push_back(resolve(v));
  return out;
}

Machine& TabledRun::machine() noexcept { return *machine_; }
const TableStore& TabledRun::store() const noexcept { return state_->store; }
const std::vector<AnswerEvent>& TabledRun::events() const noexcept { return state_->events; }
const std::vector<Term>& TabledRun::variables() const noexcept { return state_->ans; }

Metrics TabledRun::metrics() const {
  Metrics m = state_->metrics;
  absorb(machine_->stats(), m);
  return m;
}

TabledRun run_tabled(std::shared_ptr<Machine> m, const Term& query, TabledOptions opts) {
  return TabledRun(std::move(m), query, std::move(opts));
}

}  // namespace tabkit
