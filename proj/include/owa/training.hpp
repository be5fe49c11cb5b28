#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "owa/curiosity.hpp"
#include "owa/executor.hpp"
#include "owa/qlearn.hpp"
#include "owa/reward_machine.hpp"

namespace owa {

struct EpsSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.5;  // linear decay over this share of the budget

  double at(long step, long budget) const {
    if (budget <= 0) return end;
    double horizon = decay_fraction * static_cast<double>(budget);
    if (horizon <= 0) return end;
    double f = static_cast<double>(step) / horizon;
    if (f >= 1.0) return end;
    return start + (end - start) * f;
  }
};

// Brings the environment to the training context at the start of an
// episode (reset plus any plan-prefix replay). Returns false when the
// context could not be established.
using ContextFn =
    std::function<bool(Environment&, Observation&, const StepHook&)>;

struct TrainingSpec {
  std::string executor_id;
  std::string op_key;    // operator the trained executor realizes
  AtomSet initiation;    // I of the produced executor
  SymbolicGoal goal;     // beta = entails(goal)
  std::vector<SymbolicGoal> goal_pool;  // episode goals; empty = {goal}
  RewardMachine reward_machine;         // plan-derived shaping, may be empty

  EpsSchedule exploration;
  double gamma = 0.95;
  double alpha = 0.5;
  long max_env_steps = 30000;
  int episode_cap = 200;
  long eval_every = 1000;
  int eval_episodes = 20;
  double convergence_threshold = 0.8;

  bool her = true;
  HerStrategy her_strategy = HerStrategy::Final;
  int her_k = 4;

  bool eval_over_pool = false;  // evaluate mean success over goal_pool
  int executor_budget = 200;
};

struct TrainResult {
  ExecutorPtr executor;
  std::vector<std::pair<long, double>> curve;  // (env step, eval success rate)
  bool converged = false;
  long steps_used = 0;
  std::shared_ptr<const QTable> table;
};

// Greedy policy over a frozen table, conditioned on a fixed goal key.
class TabularGreedyPolicy : public ControlPolicy {
 public:
  TabularGreedyPolicy(std::shared_ptr<const QTable> table, std::string goal_key,
                      ObsKeyFn obs_key, std::string artifact);
  std::optional<int> next_action(const Observation& obs) override;
  std::string artifact() const override { return artifact_; }

 private:
  std::shared_ptr<const QTable> table_;
  std::string goal_key_;
  ObsKeyFn obs_key_;
  std::string artifact_;
};

// Greedy option selection over a frozen table; nullopt when nothing valid.
class TabularOptionSelector : public OptionSelector {
 public:
  TabularOptionSelector(std::shared_ptr<const QTable> table, std::string goal_key,
                        ObsKeyFn obs_key, std::string artifact);
  std::optional<size_t> next_option(const Observation& obs,
                                    const std::vector<bool>& valid) override;
  std::string artifact() const override { return artifact_; }

 private:
  std::shared_ptr<const QTable> table_;
  std::string goal_key_;
  ObsKeyFn obs_key_;
  std::string artifact_;
};

// Episodic epsilon-greedy goal-conditioned Q-learning over primitive
// actions. Per-step reward is reward-machine shaping plus the goal
// indicator plus intrinsic reward when a curiosity model is supplied (the
// model is trained online). HER relabeling runs after each episode.
// Training steps (context included) are reported through `hook`;
// evaluation rollouts run on clones and are side-effect-free.
TrainResult train_control_executor(const TrainingSpec& spec, Environment& env,
                                   const Detector& detector,
                                   const ObsKeyFn& obs_key,
                                   const ContextFn& context,
                                   CuriosityModel* curiosity, uint64_t seed,
                                   const StepHook& hook = nullptr);

// SMDP Q-learning over an option set: each decision runs an option to its
// own termination; rewards accumulate with per-primitive-step gamma
// discounting and the backup discounts the bootstrap by gamma^tau.
TrainResult train_skill_executor(const TrainingSpec& spec, Environment& env,
                                 const Detector& detector,
                                 const ObsKeyFn& obs_key,
                                 const std::vector<ExecutorPtr>& options,
                                 const ContextFn& context,
                                 CuriosityModel* curiosity, uint64_t seed,
                                 const StepHook& hook = nullptr);

// Curiosity-driven exploration: epsilon-greedy over a Q-function trained on
// intrinsic reward only (uniform random when curiosity_driven is false).
// Persistent across rounds so later rounds keep earlier dynamics knowledge.
class ExplorationAgent {
 public:
  ExplorationAgent(int obs_size, int n_actions, bool curiosity_driven,
                   uint64_t seed);

  // Steps episodes until `stop` fires or max_steps elapse. Returns steps
  // taken in this call; `stop` sees (pre, post, record) for every step.
  using StopFn = std::function<bool(const SymbolicState&, const SymbolicState&,
                                    const StepRecord&)>;
  long run(Environment& env, const Detector& detector, const ObsKeyFn& obs_key,
           long max_steps, int episode_cap, const StopFn& stop,
           const StepHook& hook = nullptr);

  long total_steps() const { return total_steps_; }

 private:
  bool curiosity_driven_;
  QTable q_;
  std::optional<CuriosityModel> icm_;
  EpsSchedule eps_{1.0, 0.2, 0.5};
  Rng rng_;
  long total_steps_ = 0;
  uint64_t episode_counter_ = 0;
};

// Benchmarks backing the directional claims.

// Multi-goal region navigation: a single goal-conditioned policy trained
// over all four at-agent goals, evaluated round-robin. Returns the first
// environment step at which mean eval success reaches the threshold.
std::optional<long> goto_benchmark_steps_to_threshold(bool her, uint64_t seed,
                                                      long max_steps = 60000,
                                                      double threshold = 0.8);

// Exploration steps until the door-opening toggle transition is first
// discovered under the door scenario (cap on failure).
long door_discovery_steps(bool curiosity_driven, uint64_t seed, long cap = 40000);

}  // namespace owa
