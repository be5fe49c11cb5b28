#pragma once

// Shared helpers for the test suites: fixture access, random domain/problem
// generation, and an independent breadth-first search oracle over ground
// operators (kept deliberately separate from the planner implementation).

#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "owa/parser.hpp"
#include "owa/rng.hpp"
#include "owa/symbolic.hpp"

namespace owa::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(OWA_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Domain load_fixture_domain() {
  return parse_domain(read_file(fixture_path("gridcan-domain.pddl")));
}

inline PlanningTask load_fixture_problem(const Domain& d) {
  return parse_problem(read_file(fixture_path("gridcan-problem.pddl")), d);
}

// Random typed domain: every type has at least one entity, operator
// preconditions/effects are well-typed over the parameters and constants.
inline Domain random_domain(Rng& rng) {
  Domain d;
  d.name = "rand";
  int n_types = 1 + static_cast<int>(rng.uniform_int(2));
  for (int t = 0; t < n_types; ++t) d.types.insert("t" + std::to_string(t));
  int n_entities = n_types + static_cast<int>(rng.uniform_int(3));
  for (int e = 0; e < n_entities; ++e) {
    std::string type = "t" + std::to_string(e < n_types ? e : rng.uniform_int(n_types));
    d.entities["e" + std::to_string(e)] = type;
  }
  int n_preds = 1 + static_cast<int>(rng.uniform_int(4));
  for (int p = 0; p < n_preds; ++p) {
    int arity = static_cast<int>(rng.uniform_int(3));
    std::vector<std::string> types;
    for (int a = 0; a < arity; ++a)
      types.push_back("t" + std::to_string(rng.uniform_int(n_types)));
    d.predicates["p" + std::to_string(p)] = types;
  }

  auto random_atom = [&](const std::vector<TypedParam>& params) -> std::optional<Atom> {
    std::vector<std::string> names;
    for (const auto& [name, types] : d.predicates) names.push_back(name);
    const std::string& pred = names[rng.uniform_int(names.size())];
    Atom a;
    a.predicate = pred;
    for (const auto& type : d.predicates[pred]) {
      // Prefer a parameter of the right type, fall back to a constant.
      std::vector<std::string> vars;
      for (const auto& p : params)
        if (p.type == type) vars.push_back(p.var);
      if (!vars.empty() && rng.chance(0.7)) {
        a.args.push_back(vars[rng.uniform_int(vars.size())]);
      } else {
        auto ents = d.entities_of_type(type);
        if (ents.empty()) return std::nullopt;
        a.args.push_back(ents[rng.uniform_int(ents.size())]);
      }
    }
    return a;
  };

  int n_ops = 1 + static_cast<int>(rng.uniform_int(4));
  for (int o = 0; o < n_ops; ++o) {
    LiftedOperator op;
    op.name = "op" + std::to_string(o);
    int n_params = static_cast<int>(rng.uniform_int(3));
    for (int p = 0; p < n_params; ++p)
      op.params.push_back({"?v" + std::to_string(p),
                           "t" + std::to_string(rng.uniform_int(n_types))});
    int n_pre = static_cast<int>(rng.uniform_int(3));
    for (int i = 0; i < n_pre; ++i)
      if (auto a = random_atom(op.params)) op.preconditions.insert(*a);
    int n_add = 1 + static_cast<int>(rng.uniform_int(2));
    for (int i = 0; i < n_add; ++i)
      if (auto a = random_atom(op.params)) op.add_effects.insert(*a);
    int n_del = static_cast<int>(rng.uniform_int(2));
    for (int i = 0; i < n_del; ++i)
      if (auto a = random_atom(op.params)) {
        if (!op.add_effects.count(*a)) op.delete_effects.insert(*a);
      }
    d.operators.push_back(op);
  }
  std::sort(d.operators.begin(), d.operators.end(),
            [](const LiftedOperator& a, const LiftedOperator& b) {
              return a.name < b.name;
            });
  return d;
}

inline std::vector<Atom> all_ground_atoms(const Domain& d) {
  std::vector<Atom> out;
  for (const auto& [pred, types] : d.predicates) {
    std::vector<std::vector<std::string>> cands;
    bool empty = false;
    for (const auto& t : types) {
      cands.push_back(d.entities_of_type(t));
      if (cands.back().empty()) empty = true;
    }
    if (empty) continue;
    std::vector<size_t> idx(types.size(), 0);
    bool done = false;
    while (!done) {
      Atom a;
      a.predicate = pred;
      for (size_t i = 0; i < idx.size(); ++i) a.args.push_back(cands[i][idx[i]]);
      out.push_back(a);
      if (idx.empty()) break;
      size_t i = idx.size();
      while (true) {
        if (i == 0) {
          done = true;
          break;
        }
        --i;
        if (++idx[i] < cands[i].size()) break;
        idx[i] = 0;
      }
    }
  }
  return out;
}

inline SymbolicState random_state(Rng& rng, const Domain& d, double density = 0.3) {
  SymbolicState s;
  for (const auto& a : all_ground_atoms(d))
    if (rng.chance(density)) s.atoms.insert(a);
  return s;
}

// Random solvable task: random initial state plus a goal sampled from the
// state reached by a short random walk of applicable operators.
inline std::optional<PlanningTask> random_solvable_task(Rng& rng, const Domain& d) {
  auto ops = ground_operators(d);
  if (ops.empty()) return std::nullopt;
  PlanningTask task;
  task.name = "rand";
  task.domain = d;
  task.initial = random_state(rng, d);
  SymbolicState cur = task.initial;
  int walk = 1 + static_cast<int>(rng.uniform_int(6));
  for (int i = 0; i < walk; ++i) {
    std::vector<const GroundOperator*> applicable_ops;
    for (const auto& op : ops)
      if (applicable(cur, op)) applicable_ops.push_back(&op);
    if (applicable_ops.empty()) break;
    cur = apply(cur, *applicable_ops[rng.uniform_int(applicable_ops.size())]);
  }
  if (cur.atoms.empty()) return std::nullopt;
  for (const auto& a : cur.atoms)
    if (rng.chance(0.4)) task.goal.insert(a);
  if (task.goal.empty()) task.goal.insert(*cur.atoms.begin());
  return task;
}

// Independent BFS oracle: shortest plan length and reachable-state count.
struct BfsOracle {
  std::optional<int> shortest;
  size_t reachable = 0;
  bool capped = false;
};

inline BfsOracle bfs_oracle(const PlanningTask& task,
                            const std::vector<GroundOperator>& ops,
                            size_t state_cap = 20000) {
  BfsOracle result;
  std::map<std::string, int> dist;
  std::deque<SymbolicState> queue;
  dist[task.initial.key()] = 0;
  queue.push_back(task.initial);
  if (task.initial.entails(task.goal)) {
    result.shortest = 0;
    result.reachable = 1;
    return result;
  }
  while (!queue.empty()) {
    SymbolicState cur = queue.front();
    queue.pop_front();
    int cd = dist[cur.key()];
    for (const auto& op : ops) {
      if (!applicable(cur, op)) continue;
      SymbolicState next = apply(cur, op);
      auto [it, inserted] = dist.emplace(next.key(), cd + 1);
      if (!inserted) continue;
      if (!result.shortest && next.entails(task.goal)) result.shortest = cd + 1;
      if (dist.size() > state_cap) {
        result.capped = true;
        result.reachable = dist.size();
        return result;
      }
      queue.push_back(next);
    }
    if (result.shortest) break;  // BFS: first hit is shortest; keep counting? no
  }
  result.reachable = dist.size();
  return result;
}

// Full reachability (no early exit), for reachable-state counting.
inline BfsOracle bfs_oracle_full(const PlanningTask& task,
                                 const std::vector<GroundOperator>& ops,
                                 size_t state_cap = 20000) {
  BfsOracle result;
  std::map<std::string, int> dist;
  std::deque<SymbolicState> queue;
  dist[task.initial.key()] = 0;
  queue.push_back(task.initial);
  while (!queue.empty()) {
    SymbolicState cur = queue.front();
    queue.pop_front();
    int cd = dist[cur.key()];
    if (!result.shortest && cur.entails(task.goal)) result.shortest = cd;
    for (const auto& op : ops) {
      if (!applicable(cur, op)) continue;
      SymbolicState next = apply(cur, op);
      auto [it, inserted] = dist.emplace(next.key(), cd + 1);
      if (!inserted) continue;
      if (dist.size() > state_cap) {
        result.capped = true;
        result.reachable = dist.size();
        return result;
      }
      queue.push_back(next);
    }
  }
  result.reachable = dist.size();
  return result;
}

}  // namespace owa::test
