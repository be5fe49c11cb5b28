#include "owa/planner.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>

#include "json.hpp"

namespace owa {

int goal_count_heuristic(const SymbolicState& state, const AtomSet& goal) {
  int missing = 0;
  for (const auto& a : goal)
    if (!state.contains(a)) ++missing;
  return missing;
}

namespace {

struct QueueEntry {
  long long priority;
  long long seq;  // FIFO among equal priorities
  size_t node;

  bool operator>(const QueueEntry& other) const {
    return std::tie(priority, seq) > std::tie(other.priority, other.seq);
  }
};

struct Node {
  SymbolicState state;
  int g = 0;
  size_t parent = SIZE_MAX;
  size_t via_op = SIZE_MAX;
  bool closed = false;
};

}  // namespace

PlanResult plan(const PlanningTask& task, const std::vector<GroundOperator>& ops,
                const SearchConfig& config) {
  const AtomSet& goal = task.goal;

  std::vector<Node> nodes;
  std::map<std::string, size_t> seen;  // canonical state key -> node index
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>>
      open;
  long long seq = 0;

  auto priority_of = [&](const Node& n) -> long long {
    switch (config.mode) {
      case SearchMode::UniformCost:
        return n.g;
      case SearchMode::AStarGoalCount:
        return n.g + goal_count_heuristic(n.state, goal);
      case SearchMode::GreedyGoalCount:
        return goal_count_heuristic(n.state, goal);
    }
    return n.g;
  };

  nodes.push_back({task.initial, 0, SIZE_MAX, SIZE_MAX, false});
  seen[task.initial.key()] = 0;
  open.push({priority_of(nodes[0]), seq++, 0});

  auto build_plan = [&](size_t idx) {
    Plan p;
    std::vector<size_t> chain;
    for (size_t n = idx; n != SIZE_MAX; n = nodes[n].parent) chain.push_back(n);
    std::reverse(chain.begin(), chain.end());
    for (size_t n : chain) {
      p.expected_states.push_back(nodes[n].state);
      if (nodes[n].via_op != SIZE_MAX) p.steps.push_back(ops[nodes[n].via_op]);
    }
    // expected_states currently has one entry per node along the chain,
    // which is already |steps| + 1.
    return p;
  };

  int expansions = 0;
  while (!open.empty()) {
    QueueEntry top = open.top();
    open.pop();
    if (nodes[top.node].closed) continue;
    nodes[top.node].closed = true;

    // Copies: nodes may reallocate while successors are generated.
    const SymbolicState cur_state = nodes[top.node].state;
    const int cur_g = nodes[top.node].g;

    if (cur_state.entails(goal)) {
      PlanResult r;
      r.status = PlanStatus::Found;
      r.plan = build_plan(top.node);
      return r;
    }

    if (++expansions > config.max_expansions)
      return {PlanStatus::BudgetExhausted, std::nullopt};

    for (size_t oi = 0; oi < ops.size(); ++oi) {
      if (!applicable(cur_state, ops[oi])) continue;
      SymbolicState next = apply(cur_state, ops[oi]);
      std::string key = next.key();
      auto it = seen.find(key);
      int g2 = cur_g + 1;
      if (it == seen.end()) {
        nodes.push_back({std::move(next), g2, top.node, oi, false});
        seen[key] = nodes.size() - 1;
        open.push({priority_of(nodes.back()), seq++, nodes.size() - 1});
      } else if (config.mode != SearchMode::GreedyGoalCount &&
                 g2 < nodes[it->second].g && !nodes[it->second].closed) {
        Node& n2 = nodes[it->second];
        n2.g = g2;
        n2.parent = top.node;
        n2.via_op = oi;
        open.push({priority_of(n2), seq++, it->second});
      }
    }
  }
  return {PlanStatus::NoPlanFound, std::nullopt};
}

bool validate(const Plan& plan, const PlanningTask& task) {
  if (plan.expected_states.size() != plan.steps.size() + 1) return false;
  SymbolicState cur = task.initial;
  if (!(plan.expected_states[0] == cur)) return false;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    if (!applicable(cur, plan.steps[i])) return false;
    cur = apply(cur, plan.steps[i]);
    if (!(plan.expected_states[i + 1] == cur)) return false;
  }
  return cur.entails(task.goal);
}

std::string plan_to_json(const Plan& plan) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& step : plan.steps) {
    nlohmann::json rec;
    rec["operator"] = step.schema;
    nlohmann::json binding = nlohmann::json::object();
    for (const auto& [var, ent] : step.binding) binding[var] = ent;
    rec["binding"] = binding;
    arr.push_back(rec);
  }
  return arr.dump();
}

}  // namespace owa
