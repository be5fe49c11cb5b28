#pragma once

#include <vector>

#include "owa/planner.hpp"
#include "owa/symbolic.hpp"

namespace owa {

// Finite-state shaping automaton derived from a plan: state k advances to
// k+1 when the current symbolic state entails the plan's expected state at
// boundary k+1, paying step_bonus per advance and terminal_bonus on
// reaching the final state. The index never decreases within an episode.
class RewardMachine {
 public:
  RewardMachine() = default;
  RewardMachine(std::vector<AtomSet> boundaries, double step_bonus,
                double terminal_bonus);

  static RewardMachine from_plan(const Plan& plan, double step_bonus = 0.1,
                                 double terminal_bonus = 1.0);

  void reset() { current_ = 0; }

  // Advances as far as the state allows and returns the collected bonus.
  double advance(const SymbolicState& state);

  int current() const { return current_; }
  int state_count() const { return static_cast<int>(boundaries_.size()) + 1; }
  bool terminal() const {
    return current_ == static_cast<int>(boundaries_.size());
  }

 private:
  std::vector<AtomSet> boundaries_;  // boundaries_[k]: predicate to leave state k
  double step_bonus_ = 0.1;
  double terminal_bonus_ = 1.0;
  int current_ = 0;
};

}  // namespace owa
