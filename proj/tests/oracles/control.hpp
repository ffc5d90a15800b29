#pragma once

// Random nested reset/shift programs over two prompts, with a reference
// semantics that is independent of the machine: every run is a list of
// outcomes, and a reset turns a matching shift outcome into a normal one.

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tabkit/machine.hpp"

namespace oracle {

struct Node {
  enum class Kind { True, Fail, Shift, Conj, Disj, Reset } kind = Kind::True;
  int prompt = 0;  // Shift, Reset: 0 or 1
  int signal = 0;  // Shift
  int id = 0;      // Reset
  std::shared_ptr<Node> left, right;  // Conj, Disj; Reset body in left
};
using NodePtr = std::shared_ptr<Node>;

/// `resets` receives the number of reset nodes (ids 0..resets-1).
NodePtr random_control(std::mt19937_64& rng, int depth, int& resets);

/// One success path: the signal caught by each reset on that path.
using Trace = std::map<int, int>;

struct Expected {
  std::vector<Trace> solutions;
  /// A shift escaped every reset after the listed solutions.
  bool unhandled = false;
};

Expected reference_run(const NodePtr& root);

std::string describe(const NodePtr& n);

/// Machine goal for `root`. Reset i binds catches[i] to its signal atom
/// `s<k>` and continues after the reset.
tabkit::GoalPtr build_goal(const NodePtr& root, const std::vector<tabkit::Term>& catches);

}  // namespace oracle
