#pragma once

#include <optional>
#include <string>
#include <vector>

#include "owa/executor.hpp"
#include "owa/gridcan.hpp"
#include "owa/planner.hpp"

namespace owa {

struct ExperimentConfig {
  std::string domain_path = "fixtures/gridcan-domain.pddl";
  std::string problem_path = "fixtures/gridcan-problem.pddl";
  std::optional<NoveltyScenario> scenario;
  std::vector<uint64_t> seeds = {0};

  long max_adaptation_steps = 100000;
  long eval_every = 2000;
  int eval_episodes = 20;
  double convergence_threshold = 0.8;

  bool her = true;
  bool curiosity = true;
  double eta = 0.1;
  long control_train_budget = 30000;
  long skill_train_budget = 30000;
  long explore_cap = 10000;
  int control_executor_budget = 200;
  int skill_executor_budget = 600;

  int episode_step_limit = 1000;
  double gamma = 0.95;
  double alpha = 0.5;
  SearchMode search_mode = SearchMode::UniformCost;

  std::string output_dir;
  bool dump_trajectories = false;

  void validate() const;  // throws ConfigError

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  std::string to_json_text() const;

  // Resolves a scenario name against the domain file's scenarios directory.
  static NoveltyScenario load_scenario(const std::string& name_or_path,
                                       const std::string& domain_path);
};

enum class Phase { Baseline, Adapting, Converged };

const char* to_string(Phase p);
Phase phase_from_string(const std::string& s);

struct MetricsRecord {
  long environment_step = 0;
  double eval_success_rate = 0.0;
  Phase phase = Phase::Adapting;
};

struct LearnedExecutorInfo {
  std::string id;
  std::string kind;  // "control" | "skill"
};

struct RunSummary {
  uint64_t seed = 0;
  std::string scenario = "none";
  bool converged = false;
  std::optional<long> t_adapt;
  std::optional<double> post_success;
  long steps_used = 0;
  std::vector<LearnedExecutorInfo> learned_executors;
  std::vector<std::string> learned_operators;
  std::vector<MetricsRecord> records;

  std::string to_json_text() const;
  static RunSummary from_json_text(const std::string& text);
};

// The full adaptation loop: plan with the current (learned-extended) domain,
// execute, classify failures, learn skill or control executors, explore and
// induce operators on capability gaps; evaluated every eval_every steps.
// Every environment step of execution, training and exploration counts.
RunSummary run_adaptation(const ExperimentConfig& config, uint64_t seed);

// Mean success of the greedy plan-execution pipeline over fresh episodes
// with derived seeds. Side-effect free: runs on clones of env and library.
double evaluate(const Environment& env_proto, const Detector& detector,
                const ExecutorLibrary& library, const Domain& domain,
                const AtomSet& goal, int episodes, uint64_t seed,
                const SearchConfig& search);

// Step of the first non-baseline record at or above the threshold.
std::optional<long> compute_t_adapt(const std::vector<MetricsRecord>& records,
                                    double threshold);

struct AggregateReport {
  int runs = 0;
  int converged_runs = 0;
  int non_converged_runs = 0;
  std::optional<double> mean_t_adapt;    // over converged runs
  std::optional<double> median_t_adapt;  // over converged runs
  std::optional<double> mean_post_success;

  std::string to_json_text() const;
  std::string format_text() const;
};

AggregateReport aggregate(const std::vector<RunSummary>& summaries);

std::string metrics_to_csv(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> metrics_from_csv(const std::string& text);

// Minimal SVG line chart of a step,success_rate CSV.
std::string csv_to_svg(const std::string& csv_text);

}  // namespace owa
