#include "control.hpp"

namespace oracle {

namespace {

struct Outcome {
  bool shifted = false;
  int prompt = 0;
  int signal = 0;
  Trace trace;
};

std::vector<Outcome> eval(const NodePtr& n) {
  using K = Node::Kind;
  switch (n->kind) {
    case K::True: return {Outcome{}};
    case K::Fail: return {};
    case K::Shift: return {Outcome{true, n->prompt, n->signal, {}}};
    case K::Disj: {
      auto a = eval(n->left);
      auto b = eval(n->right);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    case K::Conj: {
      std::vector<Outcome> out;
      auto rest = eval(n->right);
      for (const Outcome& a : eval(n->left)) {
        if (a.shifted) {
          out.push_back(a);
          continue;
        }
        for (Outcome b : rest) {
          b.trace.insert(a.trace.begin(), a.trace.end());
          out.push_back(std::move(b));
        }
      }
      return out;
    }
    case K::Reset: {
      std::vector<Outcome> out;
      for (Outcome o : eval(n->left)) {
        if (o.shifted && o.prompt == n->prompt) {
          o.shifted = false;
          o.trace[n->id] = o.signal;
        }
        out.push_back(std::move(o));
      }
      return out;
    }
  }
  return {};
}

NodePtr make(Node::Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

class CatchHandler final : public tabkit::Handler {
 public:
  explicit CatchHandler(tabkit::Term slot) : slot_(std::move(slot)) {}
  bool on_shift(tabkit::Machine& m, const tabkit::GoalPtr&, const tabkit::Term& signal,
                const tabkit::Segment&) override {
    return tabkit::unify(slot_, signal, m.bindings());
  }

 private:
  tabkit::Term slot_;
};

tabkit::Prompt prompt_symbol(int p) { return tabkit::Symbol::intern(p == 0 ? "p" : "q"); }

}  // namespace

NodePtr random_control(std::mt19937_64& rng, int depth, int& resets) {
  using K = Node::Kind;
  auto roll = [&](int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); };
  int r = depth <= 0 ? roll(3) : roll(9);
  NodePtr n;
  if (r <= 1) {
    n = make(K::True);
  } else if (r == 2) {
    n = make(roll(3) == 0 ? K::Fail : K::True);
  } else if (r == 3) {
    n = make(K::Shift);
    n->prompt = roll(1);
    n->signal = roll(4);
  } else if (r <= 5) {
    n = make(K::Conj);
    n->left = random_control(rng, depth - 1, resets);
    n->right = random_control(rng, depth - 1, resets);
  } else if (r == 6) {
    n = make(K::Disj);
    n->left = random_control(rng, depth - 1, resets);
    n->right = random_control(rng, depth - 1, resets);
  } else {
    n = make(K::Reset);
    n->prompt = roll(1);
    n->id = resets++;
    n->left = random_control(rng, depth - 1, resets);
  }
  return n;
}

Expected reference_run(const NodePtr& root) {
  Expected e;
  for (Outcome& o : eval(root)) {
    if (o.shifted) {
      e.unhandled = true;
      break;
    }
    e.solutions.push_back(std::move(o.trace));
  }
  return e;
}

std::string describe(const NodePtr& n) {
  using K = Node::Kind;
  switch (n->kind) {
    case K::True: return "true";
    case K::Fail: return "fail";
    case K::Shift: return "shift(" + std::string(n->prompt ? "q" : "p") + ",s" + std::to_string(n->signal) + ")";
    case K::Conj: return "(" + describe(n->left) + ", " + describe(n->right) + ")";
    case K::Disj: return "(" + describe(n->left) + " ; " + describe(n->right) + ")";
    case K::Reset:
      return "reset#" + std::to_string(n->id) + "(" + std::string(n->prompt ? "q" : "p") + ", " +
             describe(n->left) + ")";
  }
  return "?";
}

tabkit::GoalPtr build_goal(const NodePtr& n, const std::vector<tabkit::Term>& catches) {
  using K = Node::Kind;
  using tabkit::Goal;
  switch (n->kind) {
    case K::True: return Goal::truth();
    case K::Fail: return Goal::failure();
    case K::Shift:
      return Goal::shift(prompt_symbol(n->prompt), tabkit::Term::atom("s" + std::to_string(n->signal)));
    case K::Conj: return Goal::conj(build_goal(n->left, catches), build_goal(n->right, catches));
    case K::Disj: return Goal::disj(build_goal(n->left, catches), build_goal(n->right, catches));
    case K::Reset:
      return Goal::reset(prompt_symbol(n->prompt), build_goal(n->left, catches),
                         std::make_shared<CatchHandler>(catches.at(std::size_t(n->id))));
  }
  return Goal::failure();
}

}  // namespace oracle
