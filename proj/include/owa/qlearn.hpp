#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "owa/env.hpp"
#include "owa/rng.hpp"
#include "owa/symbolic.hpp"

namespace owa {

// An element of the symbolic goal space G: satisfied when a state entails
// every atom.
struct SymbolicGoal {
  AtomSet atoms;

  bool satisfied_by(const SymbolicState& s) const { return s.entails(atoms); }
  std::string key() const { return atom_set_str(atoms); }

  auto operator<=>(const SymbolicGoal&) const = default;
};

// Quantizes an observation into a stable table key.
using ObsKeyFn = std::function<std::string(const Observation&)>;

// Goal-conditioned transition, the HER relabeling currency.
struct Transition {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  Observation next_obs;
  bool done = false;
  SymbolicGoal goal;
};

// Tabular action values keyed by (quantized observation, goal). Rows are
// created lazily and initialized to zero. Greedy ties break to the lowest
// action index.
class QTable {
 public:
  explicit QTable(int n_actions = 1) : n_actions_(n_actions) {}

  int n_actions() const { return n_actions_; }

  const std::vector<double>& row(const std::string& obs_key,
                                 const std::string& goal_key) const;
  std::vector<double>& mutable_row(const std::string& obs_key,
                                   const std::string& goal_key);

  int greedy(const std::string& obs_key, const std::string& goal_key) const;
  // Greedy restricted to allowed actions (all-false mask returns 0).
  int greedy_masked(const std::string& obs_key, const std::string& goal_key,
                    const std::vector<bool>& allowed) const;
  double max_value(const std::string& obs_key, const std::string& goal_key) const;

  size_t size() const { return table_.size(); }

  // Policy artifact: magic bytes, action count, row count, then sorted
  // rows as (key length, key bytes, n_actions little-endian 64-bit reals).
  std::vector<uint8_t> serialize() const;
  static QTable deserialize(const std::vector<uint8_t>& bytes);
  void save(const std::string& path) const;
  static QTable load(const std::string& path);

 private:
  int n_actions_;
  std::map<std::string, std::vector<double>> table_;
  static const std::vector<double>& zero_row(int n);
};

// One Q-learning backup on the addressed cell:
//   Q(s,a,g) += alpha * (r + gamma * max_a' Q(s',a',g) * (1 - done) - Q(s,a,g))
void q_update(QTable& q, const ObsKeyFn& obs_key, const Transition& t,
              double gamma, double alpha);

enum class HerStrategy { Final, FutureK };

// Emits the original episode followed by relabeled copies whose goal is an
// achieved goal (detected and restricted to goal_predicates). Relabeled
// rewards are the entailment indicator recomputed from the trace; done is
// aligned with the relabeled reward. Originals are never modified.
// Relabelings whose restricted goal is empty are skipped.
std::vector<Transition> her_relabel(const std::vector<Transition>& episode,
                                    const Detector& detector,
                                    HerStrategy strategy,
                                    const std::set<std::string>& goal_predicates,
                                    int k, Rng& rng);

}  // namespace owa
