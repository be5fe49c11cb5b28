#include "owa/executor.hpp"

#include <algorithm>
#include <deque>
#include <queue>

#include "json.hpp"
#include "owa/errors.hpp"
#include "owa/gridcan.hpp"

namespace owa {

const char* to_string(ExecutionOutcome::Status s) {
  switch (s) {
    case ExecutionOutcome::Status::Success: return "success";
    case ExecutionOutcome::Status::BudgetExhausted: return "budget_exhausted";
    case ExecutionOutcome::Status::DeadEnd: return "dead_end";
    case ExecutionOutcome::Status::PreconditionViolation:
      return "precondition_violation";
  }
  return "?";
}

void ExecutorLibrary::add(ExecutorPtr exec, bool front) {
  auto& list = by_op_[exec->op_key];
  if (front)
    list.insert(list.begin(), std::move(exec));
  else
    list.push_back(std::move(exec));
}

void ExecutorLibrary::add_primitive(ExecutorPtr exec) {
  primitives_.push_back(std::move(exec));
}

std::vector<ExecutorPtr> ExecutorLibrary::select(const std::string& op_key) const {
  auto it = by_op_.find(op_key);
  if (it == by_op_.end()) return {};
  return it->second;
}

void ExecutorLibrary::promote(const std::string& op_key, const std::string& exec_id) {
  auto it = by_op_.find(op_key);
  if (it == by_op_.end()) return;
  auto& list = it->second;
  for (size_t i = 0; i < list.size(); ++i) {
    if (list[i]->id == exec_id) {
      ExecutorPtr e = list[i];
      list.erase(list.begin() + i);
      list.insert(list.begin(), e);
      return;
    }
  }
}

bool ExecutorLibrary::covers(const std::string& op_key) const {
  auto it = by_op_.find(op_key);
  return it != by_op_.end() && !it->second.empty();
}

std::vector<ExecutorPtr> ExecutorLibrary::all_options() const {
  std::vector<ExecutorPtr> out;
  for (const auto& [key, list] : by_op_)
    for (const auto& e : list) out.push_back(e);
  for (const auto& p : primitives_) out.push_back(p);
  return out;
}

std::vector<std::string> ExecutorLibrary::ids() const {
  std::vector<std::string> out;
  for (const auto& e : all_options()) out.push_back(e->id);
  return out;
}

std::string ExecutorLibrary::metadata_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : all_options()) {
    nlohmann::json rec;
    rec["id"] = e->id;
    rec["kind"] = e->kind == ExecutorKind::Control ? "control" : "skill";
    rec["operator"] = e->op_key;
    rec["step_budget"] = e->step_budget;
    if (e->policy) rec["policy"] = e->policy->artifact();
    if (e->selector) {
      rec["policy"] = e->selector->artifact();
      nlohmann::json opts = nlohmann::json::array();
      for (const auto& o : e->options) opts.push_back(o->id);
      rec["options"] = opts;
    }
    arr.push_back(rec);
  }
  return arr.dump(2);
}

void IntegratedTask::validate(const std::vector<GroundOperator>& ground_ops) const {
  if (detector) {
    for (const auto& p : detector->output_predicates())
      if (!task.domain.predicates.count(p))
        throw ConfigError("detector predicate '" + p + "' not in domain");
  }
  if (executor_map) {
    std::set<std::string> keys;
    for (const auto& op : ground_ops) keys.insert(op.key);
    for (const auto& e : executor_map->all_options()) {
      if (e->op_key.empty()) continue;  // primitive option
      if (!keys.count(e->op_key))
        throw ConfigError("executor '" + e->id + "' keyed to unknown operator " +
                          e->op_key);
    }
  }
}

namespace {
constexpr int kMaxOptionInvocations = 50;
}

ExecutionOutcome run_executor(const Executor& exec, Environment& env,
                              const Detector& detector, Observation& obs,
                              const StepHook& hook, int budget_override) {
  ExecutionOutcome out;
  SymbolicState sym = detector.detect(obs);
  out.final_symbolic = sym;

  if (!sym.entails(exec.initiation)) {
    out.status = ExecutionOutcome::Status::PreconditionViolation;
    return out;
  }
  if (exec.beta_holds(sym)) {
    out.status = ExecutionOutcome::Status::Success;
    return out;
  }

  int budget = exec.step_budget;
  if (budget_override >= 0) budget = std::min(budget, budget_override);

  auto finish = [&](ExecutionOutcome::Status st) {
    out.status = st;
    out.final_symbolic = detector.detect(obs);
    return out;
  };

  if (exec.kind == ExecutorKind::Control) {
    if (!exec.policy) return finish(ExecutionOutcome::Status::DeadEnd);
    exec.policy->begin_run();
    while (out.steps_used < budget) {
      if (env.episode_done()) return finish(ExecutionOutcome::Status::DeadEnd);
      std::optional<int> a = exec.policy->next_action(obs);
      if (!a) return finish(ExecutionOutcome::Status::DeadEnd);
      StepResult res = env.step({*a});
      StepRecord rec{obs, *a, res.extrinsic_reward, res.observation,
                     res.terminated, res.truncated};
      out.trace.push_back(rec);
      if (hook) hook(rec);
      obs = res.observation;
      ++out.steps_used;
      sym = detector.detect(obs);
      if (exec.beta_holds(sym)) return finish(ExecutionOutcome::Status::Success);
      if (res.terminated || res.truncated)
        return finish(ExecutionOutcome::Status::DeadEnd);
    }
    return finish(ExecutionOutcome::Status::BudgetExhausted);
  }

  // Skill: run chosen options to their own termination, SMDP style.
  if (!exec.selector) return finish(ExecutionOutcome::Status::DeadEnd);
  exec.selector->begin_run();
  int invocations = 0;
  while (out.steps_used < budget && invocations < kMaxOptionInvocations) {
    if (env.episode_done()) return finish(ExecutionOutcome::Status::DeadEnd);
    sym = detector.detect(obs);
    std::vector<bool> valid(exec.options.size());
    for (size_t i = 0; i < exec.options.size(); ++i)
      valid[i] = sym.entails(exec.options[i]->initiation);
    std::optional<size_t> oi = exec.selector->next_option(obs, valid);
    if (!oi || *oi >= exec.options.size())
      return finish(ExecutionOutcome::Status::DeadEnd);
    ExecutionOutcome sub = run_executor(*exec.options[*oi], env, detector, obs,
                                        hook, budget - out.steps_used);
    out.steps_used += sub.steps_used;
    for (auto& r : sub.trace) out.trace.push_back(std::move(r));
    ++invocations;
    sym = detector.detect(obs);
    if (exec.beta_holds(sym)) return finish(ExecutionOutcome::Status::Success);
    if (env.episode_done()) return finish(ExecutionOutcome::Status::DeadEnd);
  }
  return finish(ExecutionOutcome::Status::BudgetExhausted);
}

PlanOutcome execute_plan(Environment& env, const Detector& detector,
                         ExecutorLibrary& library, const Plan& plan,
                         Observation& obs, const StepHook& hook) {
  PlanOutcome out;
  for (size_t k = 0; k < plan.steps.size(); ++k) {
    const GroundOperator& op = plan.steps[k];
    auto trials = library.select(op.key);
    if (trials.empty()) {
      out.success = false;
      out.failed_step = static_cast<int>(k);
      out.reason = PlanOutcome::Reason::NoExecutor;
      out.failed_op_key = op.key;
      out.state_at_failure = detector.detect(obs);
      return out;
    }
    bool ok = false;
    for (const auto& exec : trials) {
      ExecutionOutcome res = run_executor(*exec, env, detector, obs, hook);
      out.last_outcome = res;
      if (res.success()) {
        library.promote(op.key, exec->id);
        ok = true;
        break;
      }
      if (env.episode_done()) break;  // remaining trials cannot act
    }
    if (!ok) {
      out.success = false;
      out.failed_step = static_cast<int>(k);
      out.reason = PlanOutcome::Reason::ExecutorFailure;
      out.failed_op_key = op.key;
      out.state_at_failure = detector.detect(obs);
      return out;
    }
    SymbolicState now = detector.detect(obs);
    if (!now.entails(plan.expected_states[k + 1].atoms)) {
      out.success = false;
      out.failed_step = static_cast<int>(k);
      out.reason = PlanOutcome::Reason::BoundaryMismatch;
      out.failed_op_key = op.key;
      out.state_at_failure = now;
      return out;
    }
  }
  return out;
}

NoveltyClass classify_novelty(const PlanningTask& task_template,
                              const std::vector<GroundOperator>& all_ops,
                              const ExecutorLibrary& library,
                              const SymbolicState& current, const AtomSet& goal,
                              const SearchConfig& config) {
  if (current.entails(goal)) return NoveltyClass::Local;  // vacuous recovery
  PlanningTask task = task_template;
  task.initial = current;
  task.goal = goal;
  PlanResult r = plan(task, covered_operators(all_ops, library), config);
  return r.found() ? NoveltyClass::Local : NoveltyClass::Global;
}

Executor compose_skill(const std::string& id,
                       const std::vector<ExecutorPtr>& options,
                       const AtomSet& initiation, const AtomSet& termination,
                       int step_budget) {
  if (options.empty()) throw std::invalid_argument("EmptyOptionSet");
  Executor e;
  e.id = id;
  e.kind = ExecutorKind::Skill;
  e.initiation = initiation;
  e.termination = termination;
  e.step_budget = step_budget;
  e.options = options;

  class SequenceSelector : public OptionSelector {
   public:
    explicit SequenceSelector(size_t n) : n_(n) {}
    void begin_run() override { pos_ = 0; }
    std::optional<size_t> next_option(const Observation&,
                                      const std::vector<bool>&) override {
      if (pos_ >= n_) return std::nullopt;
      return pos_++;
    }
    std::string artifact() const override { return "sequence"; }

   private:
    size_t n_;
    size_t pos_ = 0;
  };
  e.selector = std::make_shared<SequenceSelector>(options.size());
  return e;
}

std::vector<GroundOperator> covered_operators(
    const std::vector<GroundOperator>& ops, const ExecutorLibrary& library) {
  std::vector<GroundOperator> out;
  for (const auto& op : ops)
    if (library.covers(op.key)) out.push_back(op);
  return out;
}

// ---------------------------------------------------------------------------
// Scripted gridcan executors.

namespace {

using GC = GridCanLayout;

Cell obs_agent(const Observation& obs) {
  return {static_cast<int>(std::lround(obs[0] * 7)),
          static_cast<int>(std::lround(obs[1] * 7))};
}
Cell obs_can(const Observation& obs) {
  return {static_cast<int>(std::lround(obs[2] * 7)),
          static_cast<int>(std::lround(obs[3] * 7))};
}

// Shortest action sequence under the baseline dynamics, empty when already
// at a target cell. Neighbor order Up, Down, Left, Right.
std::vector<int> baseline_bfs(Cell from, const std::function<bool(Cell)>& is_target) {
  if (is_target(from)) return {};
  constexpr int dx[] = {0, 0, -1, 1};
  constexpr int dy[] = {1, -1, 0, 0};
  std::vector<int> parent_action(GC::kWidth * GC::kHeight, -1);
  std::vector<int> parent_cell(GC::kWidth * GC::kHeight, -1);
  auto idx = [](Cell c) { return c.y * GC::kWidth + c.x; };
  std::deque<Cell> queue{from};
  std::vector<bool> seen(GC::kWidth * GC::kHeight, false);
  seen[idx(from)] = true;
  while (!queue.empty()) {
    Cell cur = queue.front();
    queue.pop_front();
    for (int a = 0; a < 4; ++a) {
      Cell nxt{cur.x + dx[a], cur.y + dy[a]};
      if (!GridCanEnv::baseline_passable(cur, nxt) || seen[idx(nxt)]) continue;
      seen[idx(nxt)] = true;
      parent_action[idx(nxt)] = a;
      parent_cell[idx(nxt)] = idx(cur);
      if (is_target(nxt)) {
        std::vector<int> actions;
        int at = idx(nxt);
        while (at != idx(from)) {
          actions.push_back(parent_action[at]);
          at = parent_cell[at];
        }
        std::reverse(actions.begin(), actions.end());
        return actions;
      }
      queue.push_back(nxt);
    }
  }
  return {};  // unreachable in the baseline model
}

// Navigates to a target (region band, fixed cell, or the can's observed
// cell), then optionally performs one interaction action. The path is
// planned against the frozen baseline model; a move that visibly changes
// nothing triggers one replan, a second consecutive bump gives up.
class ScriptedNavPolicy : public ControlPolicy {
 public:
  enum class Target { Band, FixedCell, CanCell };

  ScriptedNavPolicy(Target target, int band, Cell cell, std::optional<int> then_action)
      : target_(target), band_(band), cell_(cell), then_action_(then_action) {}

  void begin_run() override {
    path_.clear();
    have_prev_ = false;
    replanned_after_bump_ = false;
    then_emitted_ = false;
  }

  std::optional<int> next_action(const Observation& obs) override {
    Cell agent = obs_agent(obs);
    if (have_prev_ && obs == prev_obs_) {
      // Last action had no visible effect.
      if (prev_was_interaction_ || replanned_after_bump_) return std::nullopt;
      replanned_after_bump_ = true;
      path_ = plan_path(agent, obs);
    } else if (have_prev_) {
      replanned_after_bump_ = false;
    }

    if (path_.empty() && !at_target(agent, obs))
      path_ = plan_path(agent, obs);

    std::optional<int> action;
    if (!path_.empty()) {
      action = path_.front();
      path_.erase(path_.begin());
      prev_was_interaction_ = false;
    } else if (at_target(agent, obs) && then_action_ && !then_emitted_) {
      then_emitted_ = true;
      prev_was_interaction_ = true;
      action = *then_action_;
    } else {
      return std::nullopt;
    }
    prev_obs_ = obs;
    have_prev_ = true;
    return action;
  }

  std::string artifact() const override { return "scripted"; }

 private:
  bool at_target(Cell agent, const Observation& obs) const {
    switch (target_) {
      case Target::Band: return GC::region_of(agent) == band_;
      case Target::FixedCell: return agent == cell_;
      case Target::CanCell: return agent == obs_can(obs);
    }
    return false;
  }

  std::vector<int> plan_path(Cell agent, const Observation& obs) const {
    switch (target_) {
      case Target::Band: {
        int band = band_;
        return baseline_bfs(agent, [band](Cell c) { return GC::region_of(c) == band; });
      }
      case Target::FixedCell: {
        Cell cell = cell_;
        return baseline_bfs(agent, [cell](Cell c) { return c == cell; });
      }
      case Target::CanCell: {
        Cell cell = obs_can(obs);
        return baseline_bfs(agent, [cell](Cell c) { return c == cell; });
      }
    }
    return {};
  }

  Target target_;
  int band_;
  Cell cell_;
  std::optional<int> then_action_;

  std::vector<int> path_;
  Observation prev_obs_;
  bool have_prev_ = false;
  bool prev_was_interaction_ = false;
  bool replanned_after_bump_ = false;
  bool then_emitted_ = false;
};

class PrimitivePolicy : public ControlPolicy {
 public:
  explicit PrimitivePolicy(int action) : action_(action) {}
  void begin_run() override { fired_ = false; }
  std::optional<int> next_action(const Observation&) override {
    if (fired_) return std::nullopt;
    fired_ = true;
    return action_;
  }
  std::string artifact() const override {
    return "primitive:" + std::to_string(action_);
  }

 private:
  int action_;
  bool fired_ = false;
};

}  // namespace

ExecutorLibrary make_gridcan_library(const Domain& domain) {
  ExecutorLibrary lib;
  for (const auto& op : ground_operators(domain)) {
    std::shared_ptr<ControlPolicy> policy;
    std::string id = "scripted-" + op.schema;
    for (const auto& p : op.binding) id += "-" + p.second;

    if (op.schema == "goto") {
      int band = op.binding.at("?to")[1] - '0';
      policy = std::make_shared<ScriptedNavPolicy>(ScriptedNavPolicy::Target::Band,
                                                   band, Cell{}, std::nullopt);
    } else if (op.schema == "pick") {
      policy = std::make_shared<ScriptedNavPolicy>(
          ScriptedNavPolicy::Target::CanCell, 0, Cell{},
          static_cast<int>(GridAction::Pick));
    } else if (op.schema == "place") {
      policy = std::make_shared<ScriptedNavPolicy>(
          ScriptedNavPolicy::Target::FixedCell, 0, GC::kBin,
          static_cast<int>(GridAction::Place));
    } else {
      continue;  // no scripted executor for toggle-switch
    }

    auto exec = std::make_shared<Executor>();
    exec->id = id;
    exec->kind = ExecutorKind::Control;
    exec->op_key = op.key;
    exec->initiation = op.pre;
    exec->termination = op.add;
    exec->step_budget = 200;
    exec->policy = policy;
    lib.add(exec);
  }

  static const char* kPrimNames[] = {"up", "down", "left", "right",
                                     "pick", "place", "toggle"};
  for (int a = 0; a < GC::kActions; ++a) {
    auto exec = std::make_shared<Executor>();
    exec->id = std::string("prim-") + kPrimNames[a];
    exec->kind = ExecutorKind::Control;
    exec->beta_never = true;
    exec->step_budget = 1;
    exec->policy = std::make_shared<PrimitivePolicy>(a);
    lib.add_primitive(exec);
  }
  return lib;
}

}  // namespace owa
