#include "owa/training.hpp"

#include <algorithm>
#include <cmath>

#include "owa/gridcan.hpp"

namespace owa {

TabularGreedyPolicy::TabularGreedyPolicy(std::shared_ptr<const QTable> table,
                                         std::string goal_key, ObsKeyFn obs_key,
                                         std::string artifact)
    : table_(std::move(table)),
      goal_key_(std::move(goal_key)),
      obs_key_(std::move(obs_key)),
      artifact_(std::move(artifact)) {}

std::optional<int> TabularGreedyPolicy::next_action(const Observation& obs) {
  return table_->greedy(obs_key_(obs), goal_key_);
}

TabularOptionSelector::TabularOptionSelector(std::shared_ptr<const QTable> table,
                                             std::string goal_key,
                                             ObsKeyFn obs_key,
                                             std::string artifact)
    : table_(std::move(table)),
      goal_key_(std::move(goal_key)),
      obs_key_(std::move(obs_key)),
      artifact_(std::move(artifact)) {}

std::optional<size_t> TabularOptionSelector::next_option(
    const Observation& obs, const std::vector<bool>& valid) {
  bool any = false;
  for (bool v : valid) any = any || v;
  if (!any) return std::nullopt;
  return static_cast<size_t>(table_->greedy_masked(obs_key_(obs), goal_key_, valid));
}

namespace {

std::set<std::string> goal_space_predicates(const TrainingSpec& spec) {
  std::set<std::string> preds;
  for (const auto& a : spec.goal.atoms) preds.insert(a.predicate);
  for (const auto& g : spec.goal_pool)
    for (const auto& a : g.atoms) preds.insert(a.predicate);
  return preds;
}

struct Shaper {
  RewardMachine machine;
  SymbolicGoal goal;
  CuriosityModel* curiosity;

  double step_reward(const StepRecord& rec, const SymbolicState& post) {
    double r = machine.advance(post);
    if (goal.satisfied_by(post)) r += 1.0;
    if (curiosity) {
      r += curiosity->intrinsic_reward(rec.obs_before, rec.action, rec.obs_after);
      curiosity->update({{rec.obs_before, rec.action, rec.obs_after}});
    }
    return r;
  }
};

}  // namespace

TrainResult train_control_executor(const TrainingSpec& spec, Environment& env,
                                   const Detector& detector,
                                   const ObsKeyFn& obs_key,
                                   const ContextFn& context,
                                   CuriosityModel* curiosity, uint64_t seed,
                                   const StepHook& hook) {
  auto q = std::make_shared<QTable>(env.action_count());
  TrainResult result;
  Rng rng(derive_seed(seed, "control-train"));
  Rng her_rng(derive_seed(seed, "her"));
  auto goal_preds = goal_space_predicates(spec);
  std::vector<SymbolicGoal> pool = spec.goal_pool;
  if (pool.empty()) pool.push_back(spec.goal);

  long steps = 0;
  auto counted = [&](const StepRecord& rec) {
    ++steps;
    if (hook) hook(rec);
  };

  auto eval_once = [&](uint64_t eval_seed) {
    int successes = 0;
    for (int e = 0; e < spec.eval_episodes; ++e) {
      auto env2 = env.clone();
      Observation obs;
      if (!context(*env2, obs, nullptr)) continue;
      const SymbolicGoal& g =
          spec.eval_over_pool ? pool[e % pool.size()] : spec.goal;
      (void)eval_seed;
      if (g.satisfied_by(detector.detect(obs))) {
        ++successes;
        continue;
      }
      for (int t = 0; t < spec.episode_cap && !env2->episode_done(); ++t) {
        int a = q->greedy(obs_key(obs), g.key());
        StepResult res = env2->step({a});
        obs = res.observation;
        if (g.satisfied_by(detector.detect(obs))) {
          ++successes;
          break;
        }
      }
    }
    return static_cast<double>(successes) / spec.eval_episodes;
  };

  long next_eval = 0;
  int context_failures = 0;
  uint64_t episode = 0;
  while (steps < spec.max_env_steps && !result.converged) {
    while (next_eval <= steps && !result.converged) {
      double rate = eval_once(derive_seed(seed, 1000 + next_eval));
      result.curve.emplace_back(steps, rate);
      if (rate >= spec.convergence_threshold) result.converged = true;
      next_eval += spec.eval_every;
    }
    if (result.converged) break;

    Observation obs;
    if (!context(env, obs, counted)) {
      if (++context_failures >= 5) break;
      continue;
    }
    context_failures = 0;
    ++episode;

    Shaper shaper{spec.reward_machine, {}, curiosity};
    shaper.machine.reset();
    shaper.machine.advance(detector.detect(obs));
    const SymbolicGoal& goal =
        pool.size() > 1 ? pool[rng.uniform_int(pool.size())] : pool[0];
    shaper.goal = goal;

    std::vector<Transition> buffer;
    if (goal.satisfied_by(detector.detect(obs))) continue;  // nothing to learn

    for (int t = 0; t < spec.episode_cap && steps < spec.max_env_steps &&
                    !env.episode_done();
         ++t) {
      double eps = spec.exploration.at(steps, spec.max_env_steps);
      int a = rng.chance(eps)
                  ? static_cast<int>(rng.uniform_int(env.action_count()))
                  : q->greedy(obs_key(obs), goal.key());
      StepResult res = env.step({a});
      StepRecord rec{obs, a, res.extrinsic_reward, res.observation,
                     res.terminated, res.truncated};
      counted(rec);
      SymbolicState post = detector.detect(res.observation);
      double r = shaper.step_reward(rec, post);
      bool done_learn =
          goal.satisfied_by(post) || res.terminated || res.truncated;
      Transition tr{obs, a, r, res.observation, done_learn, goal};
      q_update(*q, obs_key, tr, spec.gamma, spec.alpha);
      buffer.push_back(std::move(tr));
      obs = res.observation;
      if (done_learn) break;
    }

    if (spec.her && !buffer.empty()) {
      auto relabeled = her_relabel(buffer, detector, spec.her_strategy,
                                   goal_preds, spec.her_k, her_rng);
      for (size_t i = buffer.size(); i < relabeled.size(); ++i)
        q_update(*q, obs_key, relabeled[i], spec.gamma, spec.alpha);
    }
  }

  if (!result.converged && steps > 0 &&
      (result.curve.empty() || result.curve.back().first < steps)) {
    double rate = eval_once(derive_seed(seed, 999));
    result.curve.emplace_back(steps, rate);
    if (rate >= spec.convergence_threshold) result.converged = true;
  }

  result.steps_used = steps;
  result.table = q;
  auto exec = std::make_shared<Executor>();
  exec->id = spec.executor_id;
  exec->kind = ExecutorKind::Control;
  exec->op_key = spec.op_key;
  exec->initiation = spec.initiation;
  exec->termination = spec.goal.atoms;
  exec->step_budget = spec.executor_budget;
  exec->policy = std::make_shared<TabularGreedyPolicy>(
      q, spec.goal.key(), obs_key, "table:" + spec.executor_id + ".qpol");
  result.executor = exec;
  return result;
}

TrainResult train_skill_executor(const TrainingSpec& spec, Environment& env,
                                 const Detector& detector,
                                 const ObsKeyFn& obs_key,
                                 const std::vector<ExecutorPtr>& options,
                                 const ContextFn& context,
                                 CuriosityModel* curiosity, uint64_t seed,
                                 const StepHook& hook) {
  if (options.empty()) throw std::invalid_argument("EmptyOptionSet");
  auto q = std::make_shared<QTable>(static_cast<int>(options.size()));
  TrainResult result;
  Rng rng(derive_seed(seed, "skill-train"));
  Rng her_rng(derive_seed(seed, "skill-her"));
  auto goal_preds = goal_space_predicates(spec);
  constexpr int kDecisionCap = 50;

  long steps = 0;
  auto counted = [&](const StepRecord& rec) {
    ++steps;
    if (hook) hook(rec);
  };

  auto valid_mask = [&](const SymbolicState& sym) {
    std::vector<bool> valid(options.size());
    for (size_t i = 0; i < options.size(); ++i)
      valid[i] = sym.entails(options[i]->initiation) &&
                 !options[i]->beta_holds(sym);
    return valid;
  };

  auto eval_once = [&]() {
    int successes = 0;
    for (int e = 0; e < spec.eval_episodes; ++e) {
      auto env2 = env.clone();
      Observation obs;
      if (!context(*env2, obs, nullptr)) continue;
      if (spec.goal.satisfied_by(detector.detect(obs))) {
        ++successes;
        continue;
      }
      int used = 0;
      for (int d = 0; d < kDecisionCap && used < spec.episode_cap &&
                      !env2->episode_done();
           ++d) {
        SymbolicState sym = detector.detect(obs);
        auto valid = valid_mask(sym);
        bool any = false;
        for (bool v : valid) any = any || v;
        if (!any) break;
        int oi = q->greedy_masked(obs_key(obs), spec.goal.key(), valid);
        auto sub = run_executor(*options[oi], *env2, detector, obs, nullptr,
                                spec.episode_cap - used);
        used += sub.steps_used;
        if (spec.goal.satisfied_by(detector.detect(obs))) {
          ++successes;
          break;
        }
      }
    }
    return static_cast<double>(successes) / spec.eval_episodes;
  };

  long next_eval = 0;
  int context_failures = 0;
  while (steps < spec.max_env_steps && !result.converged) {
    while (next_eval <= steps && !result.converged) {
      double rate = eval_once();
      result.curve.emplace_back(steps, rate);
      if (rate >= spec.convergence_threshold) result.converged = true;
      next_eval += spec.eval_every;
    }
    if (result.converged) break;

    Observation obs;
    if (!context(env, obs, counted)) {
      if (++context_failures >= 5) break;
      continue;
    }
    context_failures = 0;

    Shaper shaper{spec.reward_machine, spec.goal, curiosity};
    shaper.machine.reset();
    shaper.machine.advance(detector.detect(obs));
    if (spec.goal.satisfied_by(detector.detect(obs))) continue;

    std::vector<Transition> buffer;  // option-level, for HER
    int ep_steps = 0;
    for (int d = 0; d < kDecisionCap && ep_steps < spec.episode_cap &&
                    steps < spec.max_env_steps && !env.episode_done();
         ++d) {
      SymbolicState sym = detector.detect(obs);
      auto valid = valid_mask(sym);
      std::vector<size_t> candidates;
      for (size_t i = 0; i < valid.size(); ++i)
        if (valid[i]) candidates.push_back(i);
      if (candidates.empty()) break;

      double eps = spec.exploration.at(steps, spec.max_env_steps);
      size_t oi;
      if (rng.chance(eps))
        oi = candidates[rng.uniform_int(candidates.size())];
      else
        oi = static_cast<size_t>(
            q->greedy_masked(obs_key(obs), spec.goal.key(), valid));

      Observation obs_before = obs;
      double acc_reward = 0.0;
      double disc = 1.0;
      int tau = 0;
      auto option_hook = [&](const StepRecord& rec) {
        counted(rec);
        SymbolicState post = detector.detect(rec.obs_after);
        acc_reward += disc * shaper.step_reward(rec, post);
        disc *= spec.gamma;
        ++tau;
      };
      int remaining = std::min<long>(spec.episode_cap - ep_steps,
                                     spec.max_env_steps - steps);
      run_executor(*options[oi], env, detector, obs, option_hook, remaining);
      ep_steps += tau;

      SymbolicState post = detector.detect(obs);
      bool done_learn =
          spec.goal.satisfied_by(post) || env.episode_done();
      // SMDP backup with duration tau.
      double bootstrap =
          done_learn ? 0.0
                     : std::pow(spec.gamma, std::max(tau, 1)) *
                           q->max_value(obs_key(obs), spec.goal.key());
      auto& row = q->mutable_row(obs_key(obs_before), spec.goal.key());
      row[oi] += spec.alpha * (acc_reward + bootstrap - row[oi]);

      buffer.push_back(Transition{obs_before, static_cast<int>(oi), acc_reward,
                                  obs, done_learn, spec.goal});
      if (done_learn) break;
    }

    if (spec.her && !buffer.empty()) {
      auto relabeled = her_relabel(buffer, detector, spec.her_strategy,
                                   goal_preds, spec.her_k, her_rng);
      for (size_t i = buffer.size(); i < relabeled.size(); ++i) {
        // Option-level one-step backup on the relabeled goal.
        const Transition& t = relabeled[i];
        double boot = t.done ? 0.0
                             : spec.gamma * q->max_value(obs_key(t.next_obs),
                                                         t.goal.key());
        auto& row = q->mutable_row(obs_key(t.obs), t.goal.key());
        row[t.action] += spec.alpha * (t.reward + boot - row[t.action]);
      }
    }
  }

  if (!result.converged && steps > 0 &&
      (result.curve.empty() || result.curve.back().first < steps)) {
    double rate = eval_once();
    result.curve.emplace_back(steps, rate);
    if (rate >= spec.convergence_threshold) result.converged = true;
  }

  result.steps_used = steps;
  result.table = q;
  auto exec = std::make_shared<Executor>();
  exec->id = spec.executor_id;
  exec->kind = ExecutorKind::Skill;
  exec->op_key = spec.op_key;
  exec->initiation = spec.initiation;
  exec->termination = spec.goal.atoms;
  exec->step_budget = std::max(spec.executor_budget, 600);
  exec->options = options;
  exec->selector = std::make_shared<TabularOptionSelector>(
      q, spec.goal.key(), obs_key, "table:" + spec.executor_id + ".qpol");
  result.executor = exec;
  return result;
}

ExplorationAgent::ExplorationAgent(int obs_size, int n_actions,
                                   bool curiosity_driven, uint64_t seed)
    : curiosity_driven_(curiosity_driven),
      q_(n_actions),
      rng_(derive_seed(seed, "explore")) {
  if (curiosity_driven)
    icm_.emplace(CuriosityModel::make_default(obs_size, n_actions,
                                              derive_seed(seed, "icm")));
}

long ExplorationAgent::run(Environment& env, const Detector& detector,
                           const ObsKeyFn& obs_key, long max_steps,
                           int episode_cap, const StopFn& stop,
                           const StepHook& hook) {
  long taken = 0;
  while (taken < max_steps) {
    Observation obs = env.reset(derive_seed(episode_counter_++, "explore-ep"));
    SymbolicState sym = detector.detect(obs);
    for (int t = 0; t < episode_cap && taken < max_steps && !env.episode_done();
         ++t) {
      int n = env.action_count();
      int a;
      if (!curiosity_driven_) {
        a = static_cast<int>(rng_.uniform_int(n));
      } else {
        double eps = eps_.at(total_steps_, std::max(max_steps, total_steps_ + 1));
        a = rng_.chance(eps) ? static_cast<int>(rng_.uniform_int(n))
                             : q_.greedy(obs_key(obs), "explore");
      }
      StepResult res = env.step({a});
      StepRecord rec{obs, a, res.extrinsic_reward, res.observation,
                     res.terminated, res.truncated};
      ++taken;
      ++total_steps_;
      if (hook) hook(rec);
      SymbolicState post = detector.detect(res.observation);

      if (curiosity_driven_) {
        double r = icm_->intrinsic_reward(obs, a, res.observation);
        icm_->update({{obs, a, res.observation}});
        Transition tr{obs, a, r, res.observation,
                      res.terminated || res.truncated, SymbolicGoal{}};
        // Goal key fixed: exploration is not goal-conditioned.
        double boot = tr.done ? 0.0 : 0.95 * q_.max_value(obs_key(tr.next_obs),
                                                          "explore");
        auto& row = q_.mutable_row(obs_key(tr.obs), "explore");
        row[a] += 0.5 * (r + boot - row[a]);
      }

      bool fired = stop && stop(sym, post, rec);
      obs = res.observation;
      sym = post;
      if (fired) return taken;
    }
  }
  return taken;
}

std::optional<long> goto_benchmark_steps_to_threshold(bool her, uint64_t seed,
                                                      long max_steps,
                                                      double threshold) {
  GridCanEnv env;
  GridCanDetector detector;
  TrainingSpec spec;
  spec.executor_id = "goto-benchmark";
  spec.goal = SymbolicGoal{{Atom{"at-agent", {"Q3"}}}};
  for (int k = 0; k < 4; ++k)
    spec.goal_pool.push_back(
        SymbolicGoal{{Atom{"at-agent", {"Q" + std::to_string(k)}}}});
  spec.her = her;
  spec.eval_over_pool = true;
  spec.max_env_steps = max_steps;
  spec.episode_cap = 40;
  spec.eval_every = 500;
  spec.eval_episodes = 20;
  spec.convergence_threshold = threshold;

  ContextFn context = [](Environment& e, Observation& obs, const StepHook&) {
    obs = e.reset(0);
    return true;
  };
  TrainResult r = train_control_executor(spec, env, detector, gridcan_obs_key,
                                         context, nullptr, seed);
  for (const auto& [step, rate] : r.curve)
    if (rate >= threshold) return step;
  return std::nullopt;
}

long door_discovery_steps(bool curiosity_driven, uint64_t seed, long cap) {
  GridCanEnv env;
  env.inject_novelty(NoveltyScenario{"door",
      R"({"boundary_west_x":5,"passage":[6,3],"switch":[5,3]})"});
  GridCanDetector detector;
  ExplorationAgent agent(env.observation_size(), env.action_count(),
                         curiosity_driven, seed);
  Atom door_open{"door-open", {}};
  long taken = agent.run(
      env, detector, gridcan_obs_key, cap, 400,
      [&](const SymbolicState& pre, const SymbolicState& post, const StepRecord&) {
        return !pre.contains(door_open) && post.contains(door_open);
      });
  return taken;
}

}  // namespace owa
