#include "owa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "owa/errors.hpp"
#include "owa/induction.hpp"
#include "owa/parser.hpp"
#include "owa/training.hpp"

namespace owa {

using nlohmann::json;
namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  if (max_adaptation_steps < 0) throw ConfigError("max_adaptation_steps < 0");
  if (max_adaptation_steps > 0 && eval_every > max_adaptation_steps)
    throw ConfigError("eval_every must be <= max_adaptation_steps");
  if (eval_every <= 0) throw ConfigError("eval_every must be positive");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (convergence_threshold <= 0.0 || convergence_threshold > 1.0)
    throw ConfigError("convergence_threshold must be in (0, 1]");
  if (eta <= 0.0) throw ConfigError("eta must be positive");
  if (episode_step_limit <= 0) throw ConfigError("episode_step_limit must be positive");
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("gamma must be in (0, 1]");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
}

namespace {

SearchMode search_mode_from_string(const std::string& s) {
  if (s == "uniform-cost") return SearchMode::UniformCost;
  if (s == "astar-goalcount") return SearchMode::AStarGoalCount;
  if (s == "greedy-goalcount") return SearchMode::GreedyGoalCount;
  throw ConfigError("unknown search mode: " + s);
}

std::string search_mode_to_string(SearchMode m) {
  switch (m) {
    case SearchMode::UniformCost: return "uniform-cost";
    case SearchMode::AStarGoalCount: return "astar-goalcount";
    case SearchMode::GreedyGoalCount: return "greedy-goalcount";
  }
  return "uniform-cost";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  ExperimentConfig c;
  c.domain_path = j.value("domain", c.domain_path);
  c.problem_path = j.value("problem", c.problem_path);
  if (j.contains("scenario") && !j["scenario"].is_null()) {
    if (j["scenario"].is_string()) {
      c.scenario = load_scenario(j["scenario"].get<std::string>(), c.domain_path);
    } else {
      c.scenario = NoveltyScenario::from_json_text(j["scenario"].dump());
    }
  }
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<uint64_t>>();
  c.max_adaptation_steps = j.value("max_adaptation_steps", c.max_adaptation_steps);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
  c.convergence_threshold = j.value("convergence_threshold", c.convergence_threshold);
  c.her = j.value("her", c.her);
  c.curiosity = j.value("curiosity", c.curiosity);
  c.eta = j.value("eta", c.eta);
  c.control_train_budget = j.value("control_train_budget", c.control_train_budget);
  c.skill_train_budget = j.value("skill_train_budget", c.skill_train_budget);
  c.explore_cap = j.value("explore_cap", c.explore_cap);
  c.control_executor_budget =
      j.value("control_executor_budget", c.control_executor_budget);
  c.skill_executor_budget = j.value("skill_executor_budget", c.skill_executor_budget);
  c.episode_step_limit = j.value("episode_step_limit", c.episode_step_limit);
  c.gamma = j.value("gamma", c.gamma);
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("search_mode"))
    c.search_mode = search_mode_from_string(j["search_mode"].get<std::string>());
  c.output_dir = j.value("output_dir", c.output_dir);
  c.dump_trajectories = j.value("dump_trajectories", c.dump_trajectories);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["domain"] = domain_path;
  j["problem"] = problem_path;
  j["scenario"] = scenario ? json::parse(scenario->to_json_text()) : json();
  j["seeds"] = seeds;
  j["max_adaptation_steps"] = max_adaptation_steps;
  j["eval_every"] = eval_every;
  j["eval_episodes"] = eval_episodes;
  j["convergence_threshold"] = convergence_threshold;
  j["her"] = her;
  j["curiosity"] = curiosity;
  j["eta"] = eta;
  j["control_train_budget"] = control_train_budget;
  j["skill_train_budget"] = skill_train_budget;
  j["explore_cap"] = explore_cap;
  j["control_executor_budget"] = control_executor_budget;
  j["skill_executor_budget"] = skill_executor_budget;
  j["episode_step_limit"] = episode_step_limit;
  j["gamma"] = gamma;
  j["alpha"] = alpha;
  j["search_mode"] = search_mode_to_string(search_mode);
  j["output_dir"] = output_dir;
  j["dump_trajectories"] = dump_trajectories;
  return j.dump(2);
}

NoveltyScenario ExperimentConfig::load_scenario(const std::string& name_or_path,
                                                const std::string& domain_path) {
  fs::path p(name_or_path);
  if (!fs::exists(p)) {
    fs::path base = fs::path(domain_path).parent_path() / "scenarios" /
                    (name_or_path + ".json");
    if (!fs::exists(base))
      throw FixtureError("scenario not found: " + name_or_path);
    p = base;
  }
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return NoveltyScenario::from_json_text(ss.str());
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Baseline: return "baseline";
    case Phase::Adapting: return "adapting";
    case Phase::Converged: return "converged";
  }
  return "?";
}

Phase phase_from_string(const std::string& s) {
  if (s == "baseline") return Phase::Baseline;
  if (s == "adapting") return Phase::Adapting;
  if (s == "converged") return Phase::Converged;
  throw ConfigError("unknown phase: " + s);
}

std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  out << "step,success_rate,phase\n";
  for (const auto& r : records) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", r.eval_success_rate);
    out << r.environment_step << ',' << buf << ',' << to_string(r.phase) << "\n";
  }
  return out.str();
}

std::vector<MetricsRecord> metrics_from_csv(const std::string& text) {
  std::vector<MetricsRecord> out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string step, rate, phase;
    std::getline(ls, step, ',');
    std::getline(ls, rate, ',');
    std::getline(ls, phase, ',');
    out.push_back({std::stol(step), std::stod(rate), phase_from_string(phase)});
  }
  return out;
}

std::optional<long> compute_t_adapt(const std::vector<MetricsRecord>& records,
                                    double threshold) {
  for (const auto& r : records)
    if (r.phase != Phase::Baseline && r.eval_success_rate >= threshold)
      return r.environment_step;
  return std::nullopt;
}

std::string RunSummary::to_json_text() const {
  json j;
  j["seed"] = seed;
  j["scenario"] = scenario;
  j["converged"] = converged;
  j["t_adapt"] = t_adapt ? json(*t_adapt) : json();
  j["post_success"] = post_success ? json(*post_success) : json();
  j["steps_used"] = steps_used;
  json execs = json::array();
  for (const auto& e : learned_executors)
    execs.push_back({{"id", e.id}, {"kind", e.kind}});
  j["learned_executors"] = execs;
  j["learned_operators"] = learned_operators;
  return j.dump(2);
}

RunSummary RunSummary::from_json_text(const std::string& text) {
  json j = json::parse(text);
  RunSummary s;
  s.seed = j.at("seed").get<uint64_t>();
  s.scenario = j.at("scenario").get<std::string>();
  s.converged = j.at("converged").get<bool>();
  if (!j.at("t_adapt").is_null()) s.t_adapt = j["t_adapt"].get<long>();
  if (!j.at("post_success").is_null()) s.post_success = j["post_success"].get<double>();
  s.steps_used = j.value("steps_used", 0L);
  for (const auto& e : j.value("learned_executors", json::array()))
    s.learned_executors.push_back(
        {e.at("id").get<std::string>(), e.at("kind").get<std::string>()});
  for (const auto& n : j.value("learned_operators", json::array()))
    s.learned_operators.push_back(n.get<std::string>());
  return s;
}

// ---------------------------------------------------------------------------
// Plan-execution pipeline.

namespace {

struct EpisodeResult {
  bool success = false;
  bool no_plan = false;
  bool had_failure = false;
  PlanOutcome failure;
  Plan failed_plan;
  SymbolicState state_at_end;
  long steps_consumed = 0;
};

// One greedy episode: plan over executor-covered operators, execute, and
// replan from the detected state when execution diverges, until the task
// succeeds, the episode dies, planning fails, or no progress is made
// between consecutive replans.
EpisodeResult pipeline_episode(Environment& env, const Detector& detector,
                               ExecutorLibrary& library, const Domain& domain,
                               const std::vector<GroundOperator>& all_ops,
                               const AtomSet& goal, uint64_t episode_seed,
                               const SearchConfig& search, const StepHook& hook,
                               int max_replans = 8) {
  EpisodeResult result;
  bool env_success = false;
  StepHook watch = [&](const StepRecord& rec) {
    result.steps_consumed += 1;
    if (rec.terminated && rec.extrinsic_reward > 0.5) env_success = true;
    if (hook) hook(rec);
  };

  Observation obs = env.reset(episode_seed);
  PlanningTask task;
  task.domain = domain;
  task.goal = goal;

  std::string prev_failure_key;
  for (int attempt = 0; attempt <= max_replans; ++attempt) {
    SymbolicState sym = detector.detect(obs);
    if (env_success || sym.entails(goal)) {
      result.success = true;
      result.state_at_end = sym;
      return result;
    }
    if (env.episode_done()) break;

    task.initial = sym;
    PlanResult pr = plan(task, covered_operators(all_ops, library), search);
    if (!pr.found()) {
      result.no_plan = !result.had_failure;
      result.state_at_end = sym;
      return result;
    }

    PlanOutcome outcome = execute_plan(env, detector, library, *pr.plan, obs, watch);
    if (env_success || detector.detect(obs).entails(goal)) {
      result.success = true;
      result.state_at_end = detector.detect(obs);
      return result;
    }
    if (outcome.success) break;  // plan ran to completion but goal not reached

    result.had_failure = true;
    result.failure = outcome;
    result.failed_plan = *pr.plan;
    if (env.episode_done()) break;

    std::string key = outcome.state_at_failure.key();
    if (key == prev_failure_key) break;  // stuck: same state after replan
    prev_failure_key = key;
  }
  result.state_at_end = detector.detect(obs);
  return result;
}

}  // namespace

double evaluate(const Environment& env_proto, const Detector& detector,
                const ExecutorLibrary& library, const Domain& domain,
                const AtomSet& goal, int episodes, uint64_t seed,
                const SearchConfig& search) {
  auto all_ops = ground_operators(domain);
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    auto env = env_proto.clone();
    ExecutorLibrary lib_copy = library;  // promotions must not leak out
    EpisodeResult r = pipeline_episode(*env, detector, lib_copy, domain, all_ops,
                                       goal, derive_seed(seed, e), search, nullptr);
    if (r.success) ++successes;
  }
  return static_cast<double>(successes) / episodes;
}

// ---------------------------------------------------------------------------
// The adaptation loop.

namespace {

bool transition_explained(const SymbolicState& pre, const SymbolicState& post,
                          const std::vector<GroundOperator>& ops) {
  for (const auto& op : ops) {
    if (!applicable(pre, op)) continue;
    if (apply(pre, op) == post) return true;
  }
  return false;
}

std::string kind_string(ExecutorKind k) {
  return k == ExecutorKind::Control ? "control" : "skill";
}

}  // namespace

RunSummary run_adaptation(const ExperimentConfig& config, uint64_t seed) {
  config.validate();
  Domain base_domain = load_domain_file(config.domain_path);
  PlanningTask base_task = load_problem_file(config.problem_path, base_domain);

  GridCanEnv env(MdpConfig{config.gamma, config.episode_step_limit});
  if (config.scenario) env.inject_novelty(*config.scenario);
  GridCanDetector detector;
  ObsKeyFn obs_key = gridcan_obs_key;
  SearchConfig search{config.search_mode, 200000};

  ExecutorLibrary library = make_gridcan_library(base_domain);
  Domain domain = base_domain;  // grows as operators are learned
  std::vector<GroundOperator> all_ops = ground_operators(domain);

  IntegratedTask ipt{base_task, &env, &detector, &library};
  ipt.validate(all_ops);

  RunSummary summary;
  summary.seed = seed;
  summary.scenario = config.scenario ? config.scenario->name : "none";
  if (config.max_adaptation_steps == 0) return summary;

  TransitionLog log;
  ExplorationAgent explorer(env.observation_size(), env.action_count(),
                            config.curiosity, derive_seed(seed, "explorer"));
  std::vector<std::pair<std::string, std::vector<std::pair<long, double>>>> curves;
  std::ostringstream trajectory_dump;

  long steps = 0;
  StepHook counter = [&](const StepRecord& rec) {
    ++steps;
    if (config.dump_trajectories) {
      json j;
      j["obs"] = rec.obs_before;
      j["action"] = rec.action;
      j["reward"] = rec.extrinsic_reward;
      j["flags"] = {{"terminated", rec.terminated}, {"truncated", rec.truncated}};
      trajectory_dump << j.dump() << "\n";
    }
  };

  bool converged = false;
  bool aborted = false;
  long next_eval = 0;
  const AtomSet& goal = base_task.goal;

  auto checkpoint = [&]() {
    while (next_eval <= steps && !converged) {
      double rate = evaluate(env, detector, library, domain, goal,
                             config.eval_episodes,
                             derive_seed(seed, 9000 + summary.records.size()),
                             search);
      Phase phase = rate >= config.convergence_threshold ? Phase::Converged
                                                         : Phase::Adapting;
      summary.records.push_back({steps, rate, phase});
      if (phase == Phase::Converged) converged = true;
      next_eval += config.eval_every;
    }
  };

  std::map<std::string, int> train_rounds;  // op key -> times trained
  int novel_counter = 0;
  int explore_round = 0;
  int zero_progress_streak = 0;
  uint64_t episode_counter = 0;

  // Replays a plan prefix to recreate the failure context for training.
  auto make_prefix_context = [&](std::vector<GroundOperator> prefix,
                                 ExecutorLibrary lib_snapshot) -> ContextFn {
    auto counter_state = std::make_shared<uint64_t>(0);
    return [&, prefix = std::move(prefix), lib_snapshot = std::move(lib_snapshot),
            counter_state](Environment& e, Observation& obs,
                           const StepHook& hook) mutable {
      obs = e.reset(derive_seed(seed, 100000 + (*counter_state)++));
      for (const auto& op : prefix) {
        bool ok = false;
        for (const auto& ex : lib_snapshot.select(op.key)) {
          ExecutionOutcome r = run_executor(*ex, e, detector, obs, hook);
          if (r.success()) {
            ok = true;
            break;
          }
          if (e.episode_done()) break;
        }
        if (!ok) return false;
      }
      return true;
    };
  };

  auto register_executor = [&](const TrainResult& result) {
    library.add(result.executor, /*front=*/true);
    summary.learned_executors.push_back(
        {result.executor->id, kind_string(result.executor->kind)});
    curves.emplace_back(result.executor->id, result.curve);
  };

  // Trains a control executor for the first executor-less operator of a
  // full-domain plan. Returns true if training ran.
  auto train_gap_operator = [&](const Plan& full_plan) -> bool {
    int gap_idx = -1;
    for (size_t i = 0; i < full_plan.steps.size(); ++i) {
      if (!library.covers(full_plan.steps[i].key)) {
        gap_idx = static_cast<int>(i);
        break;
      }
    }
    if (gap_idx < 0) return false;
    const GroundOperator& gap = full_plan.steps[gap_idx];

    int round = train_rounds[gap.key]++;
    if (round >= 2) {
      aborted = true;  // retrained once with doubled budget already
      return false;
    }
    long budget = std::min(config.control_train_budget * (round + 1),
                           config.max_adaptation_steps - steps);
    if (budget <= 0) return false;

    TrainingSpec spec;
    spec.executor_id =
        "control-" + std::to_string(summary.learned_executors.size() + 1) + "-" +
        gap.schema;
    spec.op_key = gap.key;
    spec.initiation = gap.pre;
    spec.goal = SymbolicGoal{gap.add};
    spec.reward_machine = RewardMachine::from_plan(full_plan);
    spec.gamma = config.gamma;
    spec.alpha = config.alpha;
    spec.max_env_steps = budget;
    spec.episode_cap = config.control_executor_budget;
    spec.eval_every = 1000;
    spec.eval_episodes = config.eval_episodes;
    spec.convergence_threshold = config.convergence_threshold;
    spec.her = config.her;
    spec.executor_budget = config.control_executor_budget;

    std::vector<GroundOperator> prefix(full_plan.steps.begin(),
                                       full_plan.steps.begin() + gap_idx);
    TrainResult result =
        train_control_executor(spec, env, detector, obs_key,
                               make_prefix_context(prefix, library), nullptr,
                               derive_seed(seed, 200 + steps), counter);
    register_executor(result);
    return true;
  };

  while (!converged && !aborted && steps < config.max_adaptation_steps) {
    checkpoint();
    if (converged || steps >= config.max_adaptation_steps) break;

    long steps_before = steps;
    bool learned_something = false;

    EpisodeResult er = pipeline_episode(env, detector, library, domain, all_ops,
                                        goal, derive_seed(seed, episode_counter++),
                                        search, counter);
    if (er.success) {
      zero_progress_streak = 0;
      continue;  // the next checkpoint confirms convergence
    }

    NoveltyClass cls = classify_novelty(base_task, all_ops, library,
                                        er.state_at_end, goal, search);

    if (cls == NoveltyClass::Local && er.had_failure) {
      const GroundOperator& failed =
          er.failed_plan.steps[er.failure.failed_step];
      bool degenerate = er.state_at_end.entails(goal) ||
                        er.state_at_end.entails(failed.add);
      if (!degenerate) {
        int round = train_rounds[failed.key]++;
        if (round >= 2) {
          aborted = true;
        } else {
          long budget = std::min(config.skill_train_budget * (round + 1),
                                 config.max_adaptation_steps - steps);
          if (budget > 0) {
            TrainingSpec spec;
            spec.executor_id =
                "skill-" + std::to_string(summary.learned_executors.size() + 1) +
                "-" + failed.schema;
            spec.op_key = failed.key;
            spec.initiation = failed.pre;
            spec.goal = SymbolicGoal{failed.add};
            spec.reward_machine = RewardMachine::from_plan(er.failed_plan);
            spec.gamma = config.gamma;
            spec.alpha = config.alpha;
            spec.max_env_steps = budget;
            spec.episode_cap = config.skill_executor_budget;
            spec.eval_every = 1000;
            spec.eval_episodes = config.eval_episodes;
            spec.convergence_threshold = config.convergence_threshold;
            spec.her = config.her;
            spec.executor_budget = config.skill_executor_budget;

            std::vector<GroundOperator> prefix(
                er.failed_plan.steps.begin(),
                er.failed_plan.steps.begin() + er.failure.failed_step);
            TrainResult result = train_skill_executor(
                spec, env, detector, obs_key, library.all_options(),
                make_prefix_context(prefix, library), nullptr,
                derive_seed(seed, 300 + steps), counter);
            register_executor(result);
            learned_something = true;
          }
        }
      }
    } else if (cls == NoveltyClass::Global ||
               (cls == NoveltyClass::Local && !er.had_failure)) {
      // Global path: plan over the full (learned-extended) domain from the
      // episode-initial state; train the gap operator if a plan exists,
      // otherwise explore until a novel transition is induced and merged.
      SymbolicState s0;
      {
        auto probe = env.clone();
        s0 = detector.detect(probe->reset(derive_seed(seed, 555)));
      }
      PlanningTask full_task = base_task;
      full_task.domain = domain;
      full_task.initial = s0;
      PlanResult pr = plan(full_task, all_ops, search);

      if (pr.found() && train_gap_operator(*pr.plan)) {
        learned_something = true;
      } else if (!pr.found()) {
        long cap = std::min(config.explore_cap,
                            config.max_adaptation_steps - steps);
        if (cap > 0) {
          ++explore_round;
          std::string novel_id;
          ExplorationAgent::StopFn stop = [&](const SymbolicState& pre,
                                              const SymbolicState& post,
                                              const StepRecord&) {
            if (pre == post) return false;
            if (transition_explained(pre, post, all_ops)) {
              log.record(pre, post,
                         "explore-bg-" + std::to_string(explore_round));
              return false;
            }
            novel_id = "explore-" + std::to_string(++novel_counter);
            log.record(pre, post, novel_id);
            return true;
          };
          explorer.run(env, detector, obs_key, cap,
                       std::min(400, config.episode_step_limit), stop, counter);
          if (!novel_id.empty()) {
            InduceResult induced = induce_operator(log, novel_id, domain);
            if (induced.ok()) {
              auto expanded = imagine_operators(domain, {*induced.induced});
              Domain merged = merge_into_domain(domain, expanded, 1);
              for (const auto& op : merged.operators)
                if (!domain.find_operator(op.name))
                  summary.learned_operators.push_back(op.name);
              domain = std::move(merged);
              all_ops = ground_operators(domain);
              learned_something = true;
            }
          }
        }
      }
    }

    if (steps == steps_before && !learned_something) {
      if (++zero_progress_streak >= 3) aborted = true;
    } else {
      zero_progress_streak = 0;
    }
  }
  checkpoint();

  summary.converged = converged;
  summary.steps_used = steps;
  summary.t_adapt = compute_t_adapt(summary.records, config.convergence_threshold);
  if (!summary.records.empty())
    summary.post_success = summary.records.back().eval_success_rate;

  if (!config.output_dir.empty()) {
    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    std::ofstream(dir / "metrics.csv") << metrics_to_csv(summary.records);
    std::ofstream(dir / "summary.json") << summary.to_json_text() << "\n";
    std::ofstream(dir / "executors.json") << library.metadata_json() << "\n";
    if (!log.entries().empty()) log.save((dir / "transitions.jsonl").string());
    if (!summary.learned_operators.empty())
      std::ofstream(dir / "learned-domain.pddl") << serialize_domain(domain);
    if (!curves.empty()) {
      fs::create_directories(dir / "curves");
      for (const auto& [id, curve] : curves) {
        std::ofstream out(dir / "curves" / (id + ".csv"));
        out << "step,success_rate\n";
        for (const auto& [step, rate] : curve) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.4f", rate);
          out << step << ',' << buf << "\n";
        }
      }
    }
    if (config.dump_trajectories)
      std::ofstream(dir / "trajectories.jsonl") << trajectory_dump.str();
  }
  return summary;
}

AggregateReport aggregate(const std::vector<RunSummary>& summaries) {
  if (summaries.empty()) throw ConfigError("nothing to aggregate");
  AggregateReport report;
  report.runs = static_cast<int>(summaries.size());
  std::vector<double> t_adapts;
  double post_sum = 0.0;
  int post_count = 0;
  for (const auto& s : summaries) {
    if (s.t_adapt) {
      ++report.converged_runs;
      t_adapts.push_back(static_cast<double>(*s.t_adapt));
    } else {
      ++report.non_converged_runs;
    }
    if (s.post_success) {
      post_sum += *s.post_success;
      ++post_count;
    }
  }
  if (!t_adapts.empty()) {
    double sum = 0.0;
    for (double t : t_adapts) sum += t;
    report.mean_t_adapt = sum / t_adapts.size();
    std::sort(t_adapts.begin(), t_adapts.end());
    size_t n = t_adapts.size();
    report.median_t_adapt =
        n % 2 ? t_adapts[n / 2] : 0.5 * (t_adapts[n / 2 - 1] + t_adapts[n / 2]);
  }
  if (post_count > 0) report.mean_post_success = post_sum / post_count;
  return report;
}

std::string AggregateReport::to_json_text() const {
  json j;
  j["runs"] = runs;
  j["converged_runs"] = converged_runs;
  j["non_converged_runs"] = non_converged_runs;
  j["mean_t_adapt"] = mean_t_adapt ? json(*mean_t_adapt) : json();
  j["median_t_adapt"] = median_t_adapt ? json(*median_t_adapt) : json();
  j["mean_post_success"] = mean_post_success ? json(*mean_post_success) : json();
  return j.dump(2);
}

std::string AggregateReport::format_text() const {
  std::ostringstream out;
  out << "runs: " << runs << "  converged: " << converged_runs
      << "  non-converged: " << non_converged_runs << "\n";
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", *v);
    return std::string(buf);
  };
  out << "T_adapt mean: " << fmt(mean_t_adapt)
      << "  median: " << fmt(median_t_adapt) << "\n";
  out << "post-training success mean: " << fmt(mean_post_success) << "\n";
  return out.str();
}

std::string csv_to_svg(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::vector<std::pair<double, double>> points;
  bool header = true;
  double max_x = 1.0;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    points.emplace_back(std::stod(a), std::stod(b));
    max_x = std::max(max_x, points.back().first);
  }

  const int w = 640, h = 400, m = 40;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m
      << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\""
      << h - m << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << m << "\" y=\"" << h - m + 24
      << "\" font-size=\"12\">0</text>\n";
  svg << "<text x=\"" << w - m - 30 << "\" y=\"" << h - m + 24
      << "\" font-size=\"12\">" << static_cast<long>(max_x) << "</text>\n";
  svg << "<text x=\"" << m - 30 << "\" y=\"" << m << "\" font-size=\"12\">1.0</text>\n";
  if (!points.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : points) {
      double px = m + (w - 2.0 * m) * (x / max_x);
      double py = (h - m) - (h - 2.0 * m) * y;
      svg << px << ',' << py << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace owa
