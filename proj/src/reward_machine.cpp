#include "owa/reward_machine.hpp"

namespace owa {

RewardMachine::RewardMachine(std::vector<AtomSet> boundaries, double step_bonus,
                             double terminal_bonus)
    : boundaries_(std::move(boundaries)),
      step_bonus_(step_bonus),
      terminal_bonus_(terminal_bonus) {}

RewardMachine RewardMachine::from_plan(const Plan& plan, double step_bonus,
                                       double terminal_bonus) {
  std::vector<AtomSet> boundaries;
  for (size_t i = 1; i < plan.expected_states.size(); ++i)
    boundaries.push_back(plan.expected_states[i].atoms);
  return RewardMachine(std::move(boundaries), step_bonus, terminal_bonus);
}

double RewardMachine::advance(const SymbolicState& state) {
  double reward = 0.0;
  while (current_ < static_cast<int>(boundaries_.size()) &&
         state.entails(boundaries_[current_])) {
    ++current_;
    reward += terminal() ? terminal_bonus_ : step_bonus_;
  }
  return reward;
}

}  // namespace owa
