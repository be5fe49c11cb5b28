#pragma once

#include <optional>
#include <string>
#include <vector>

#include "owa/symbolic.hpp"

namespace owa {

enum class SearchMode { UniformCost, AStarGoalCount, GreedyGoalCount };

struct SearchConfig {
  SearchMode mode = SearchMode::UniformCost;
  int max_expansions = 200000;
};

// A plan is the operator sequence plus the symbolic state expected at every
// step boundary; expected_states[0] is the initial state and the last state
// entails the goal.
struct Plan {
  std::vector<GroundOperator> steps;
  std::vector<SymbolicState> expected_states;
};

enum class PlanStatus { Found, NoPlanFound, BudgetExhausted };

struct PlanResult {
  PlanStatus status = PlanStatus::NoPlanFound;
  std::optional<Plan> plan;

  bool found() const { return status == PlanStatus::Found; }
};

// Forward search over ground operators. Deterministic: FIFO tie-breaking on
// equal priority, successors generated in the order `ops` is given. In
// uniform-cost mode a returned plan has minimal step count.
PlanResult plan(const PlanningTask& task, const std::vector<GroundOperator>& ops,
                const SearchConfig& config);

// Recomputes the state chain from scratch and checks every invariant:
// stored expected states, applicability of each step, goal entailment.
bool validate(const Plan& plan, const PlanningTask& task);

// Number of goal atoms missing from the state.
int goal_count_heuristic(const SymbolicState& state, const AtomSet& goal);

// Ordered JSON array of {operator, binding} records.
std::string plan_to_json(const Plan& plan);

}  // namespace owa
