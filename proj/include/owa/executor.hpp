#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "owa/env.hpp"
#include "owa/planner.hpp"
#include "owa/symbolic.hpp"

namespace owa {

// One primitive environment transition, as observed by executor runs.
struct StepRecord {
  Observation obs_before;
  int action = 0;
  double extrinsic_reward = 0.0;
  Observation obs_after;
  bool terminated = false;
  bool truncated = false;
};

// Invoked on every primitive step an executor takes. Used for global step
// accounting, reward shaping during training, and transition logging.
using StepHook = std::function<void(const StepRecord&)>;

// A control policy emits primitive actions. nullopt means the policy has
// nothing further to try.
class ControlPolicy {
 public:
  virtual ~ControlPolicy() = default;
  virtual void begin_run() {}
  virtual std::optional<int> next_action(const Observation& obs) = 0;
  // Persistence descriptor: "scripted:...", "primitive:3", "table:<path>".
  virtual std::string artifact() const = 0;
};

// A skill selector picks among options at SMDP decision points.
class OptionSelector {
 public:
  virtual ~OptionSelector() = default;
  virtual void begin_run() {}
  virtual std::optional<size_t> next_option(const Observation& obs,
                                            const std::vector<bool>& valid) = 0;
  virtual std::string artifact() const = 0;
};

enum class ExecutorKind { Control, Skill };

// x = <I, pi, beta>. Success means the termination atoms hold; initiation
// atoms must hold before the run starts. Primitive one-step options carry
// beta_never (they have no symbolic success condition).
struct Executor {
  std::string id;
  ExecutorKind kind = ExecutorKind::Control;
  std::string op_key;  // ground operator key, empty for primitives
  AtomSet initiation;
  AtomSet termination;
  bool beta_never = false;
  int step_budget = 200;

  std::shared_ptr<ControlPolicy> policy;  // control executors
  std::vector<std::shared_ptr<const Executor>> options;  // skill executors
  std::shared_ptr<OptionSelector> selector;

  bool beta_holds(const SymbolicState& s) const {
    return !beta_never && s.entails(termination);
  }
};

using ExecutorPtr = std::shared_ptr<const Executor>;

struct ExecutionOutcome {
  enum class Status { Success, BudgetExhausted, DeadEnd, PreconditionViolation };
  Status status = Status::DeadEnd;
  int steps_used = 0;
  SymbolicState final_symbolic;
  std::vector<StepRecord> trace;

  bool success() const { return status == Status::Success; }
};

const char* to_string(ExecutionOutcome::Status s);

// Trial-ordered executor lists per ground operator, plus the primitive
// one-step options. Single-writer: mutation happens between runs only.
class ExecutorLibrary {
 public:
  void add(ExecutorPtr exec, bool front = false);
  void add_primitive(ExecutorPtr exec);

  // Trial order for an operator; most recently successful first.
  std::vector<ExecutorPtr> select(const std::string& op_key) const;
  void promote(const std::string& op_key, const std::string& exec_id);

  bool covers(const std::string& op_key) const;
  const std::vector<ExecutorPtr>& primitives() const { return primitives_; }

  // All operator executors plus primitives, in deterministic order. This is
  // the default option set for skill learning.
  std::vector<ExecutorPtr> all_options() const;

  std::vector<std::string> ids() const;
  std::string metadata_json() const;  // persisted executor metadata

 private:
  std::map<std::string, std::vector<ExecutorPtr>> by_op_;
  std::vector<ExecutorPtr> primitives_;
};

// The e of the IPT plus everything needed to run plans against reality.
struct IntegratedTask {
  PlanningTask task;
  Environment* environment = nullptr;
  const Detector* detector = nullptr;
  ExecutorLibrary* executor_map = nullptr;

  // Throws ConfigError when detector predicates are not declared in the
  // domain or executor keys do not match any ground operator.
  void validate(const std::vector<GroundOperator>& ground_ops) const;
};

// Steps the environment with the executor's policy until beta holds, the
// budget runs out, the policy gives up, or the episode ends. Skills run
// their chosen option to its own termination (SMDP); beta is checked at
// option boundaries. obs is the current observation, updated in place.
ExecutionOutcome run_executor(const Executor& exec, Environment& env,
                              const Detector& detector, Observation& obs,
                              const StepHook& hook = nullptr,
                              int budget_override = -1);

struct PlanOutcome {
  enum class Reason { None, NoExecutor, ExecutorFailure, BoundaryMismatch };
  bool success = true;
  int failed_step = -1;
  Reason reason = Reason::None;
  std::string failed_op_key;
  ExecutionOutcome last_outcome;
  SymbolicState state_at_failure;
};

// Runs plan operators in trial order, checking after each operator that the
// detected state entails the plan's expected boundary state. Promotes the
// succeeding executor for its operator.
PlanOutcome execute_plan(Environment& env, const Detector& detector,
                         ExecutorLibrary& library, const Plan& plan,
                         Observation& obs, const StepHook& hook = nullptr);

enum class NoveltyClass { Local, Global };

// Local iff a plan from `current` to the goal exists using only operators
// that already have at least one executor (or the goal already holds).
NoveltyClass classify_novelty(const PlanningTask& task_template,
                              const std::vector<GroundOperator>& all_ops,
                              const ExecutorLibrary& library,
                              const SymbolicState& current, const AtomSet& goal,
                              const SearchConfig& config);

// Fixed-sequence skill over the given options. Throws std::invalid_argument
// ("EmptyOptionSet") when options is empty.
Executor compose_skill(const std::string& id,
                       const std::vector<ExecutorPtr>& options,
                       const AtomSet& initiation, const AtomSet& termination,
                       int step_budget);

// Scripted baseline executors for the gridcan fixture: BFS-following
// policies frozen against the baseline dynamics, registered for every
// ground goto/pick/place operator, plus the seven primitive options.
ExecutorLibrary make_gridcan_library(const Domain& domain);

// Filters ground operators to those the library covers.
std::vector<GroundOperator> covered_operators(
    const std::vector<GroundOperator>& ops, const ExecutorLibrary& library);

}  // namespace owa
