// owa: plan, execute, adapt and evaluate on the gridcan testbed.
//
// Exit codes: 0 success (a non-converged run is still a successful run),
// 1 configuration or fixture error, 2 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "owa/errors.hpp"
#include "owa/harness.hpp"
#include "owa/induction.hpp"
#include "owa/parser.hpp"

namespace fs = std::filesystem;
using namespace owa;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& config_path, std::optional<uint64_t> seed,
            const std::string& scenario, const std::string& out_dir,
            bool dump_trajectories) {
  ExperimentConfig config = ExperimentConfig::load(config_path);
  if (!scenario.empty()) {
    if (scenario == "none")
      config.scenario.reset();
    else
      config.scenario =
          ExperimentConfig::load_scenario(scenario, config.domain_path);
  }
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (dump_trajectories) config.dump_trajectories = true;

  std::vector<uint64_t> seeds = seed ? std::vector<uint64_t>{*seed} : config.seeds;
  std::vector<RunSummary> summaries;
  std::string base_out = config.output_dir;
  for (uint64_t s : seeds) {
    ExperimentConfig c = config;
    if (!base_out.empty())
      c.output_dir = (fs::path(base_out) /
                      (c.scenario ? c.scenario->name : std::string("none")) /
                      ("seed-" + std::to_string(s)))
                         .string();
    RunSummary summary = run_adaptation(c, s);
    summaries.push_back(summary);
    std::cout << "seed " << s << ": "
              << (summary.converged ? "converged" : "not-converged");
    if (summary.t_adapt) std::cout << "  T_adapt " << *summary.t_adapt;
    if (summary.post_success) std::cout << "  post-success " << *summary.post_success;
    std::cout << "\n";
  }
  if (summaries.size() > 1) std::cout << aggregate(summaries).format_text();
  return 0;
}

int cmd_eval(const std::string& config_path, uint64_t seed,
             const std::string& scenario, int episodes) {
  ExperimentConfig config = ExperimentConfig::load(config_path);
  if (!scenario.empty() && scenario != "none")
    config.scenario = ExperimentConfig::load_scenario(scenario, config.domain_path);
  Domain domain = load_domain_file(config.domain_path);
  PlanningTask task = load_problem_file(config.problem_path, domain);
  GridCanEnv env(MdpConfig{config.gamma, config.episode_step_limit});
  if (config.scenario) env.inject_novelty(*config.scenario);
  GridCanDetector detector;
  ExecutorLibrary library = make_gridcan_library(domain);
  double rate = evaluate(env, detector, library, domain, task.goal,
                         episodes > 0 ? episodes : config.eval_episodes, seed,
                         SearchConfig{config.search_mode, 200000});
  std::cout << rate << "\n";
  return 0;
}

int cmd_aggregate(const std::string& dir) {
  std::vector<RunSummary> summaries;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "summary.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    summaries.push_back(RunSummary::from_json_text(read_file(f.string())));
  if (summaries.empty()) throw ConfigError("no summary.json files under " + dir);
  AggregateReport report = aggregate(summaries);
  std::cout << report.format_text();
  std::cout << report.to_json_text() << "\n";
  return 0;
}

int cmd_plot(const std::string& csv_path, std::string out_path) {
  if (out_path.empty()) out_path = csv_path + ".svg";
  std::ofstream(out_path) << csv_to_svg(read_file(csv_path));
  std::cout << out_path << "\n";
  return 0;
}

int cmd_plan(const std::string& domain_path, const std::string& problem_path,
             const std::string& mode) {
  Domain domain = load_domain_file(domain_path);
  PlanningTask task = load_problem_file(problem_path, domain);
  SearchConfig config;
  if (mode == "uniform-cost") config.mode = SearchMode::UniformCost;
  else if (mode == "astar-goalcount") config.mode = SearchMode::AStarGoalCount;
  else if (mode == "greedy-goalcount") config.mode = SearchMode::GreedyGoalCount;
  else throw ConfigError("unknown mode " + mode);

  PlanResult r = plan(task, ground_operators(domain), config);
  if (r.status == PlanStatus::NoPlanFound) {
    std::cout << "no plan found\n";
    return 0;
  }
  if (r.status == PlanStatus::BudgetExhausted) {
    std::cout << "budget exhausted\n";
    return 0;
  }
  std::cout << plan_to_json(*r.plan) << "\n";
  return 0;
}

int cmd_induce(const std::string& log_path, const std::string& executor,
               const std::string& domain_path) {
  Domain domain = load_domain_file(domain_path);
  TransitionLog log = TransitionLog::load(log_path);
  std::vector<std::string> ids;
  if (!executor.empty()) {
    ids.push_back(executor);
  } else {
    std::set<std::string> seen;
    for (const auto& e : log.entries())
      if (seen.insert(e.executor_id).second) ids.push_back(e.executor_id);
  }
  std::vector<InducedOperator> induced;
  for (const auto& id : ids) {
    InduceResult r = induce_operator(log, id, domain);
    if (r.ok()) induced.push_back(*r.induced);
  }
  std::cout << induced_to_pddl(induced);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open-world adaptation harness"};
  app.require_subcommand(1);

  std::string config_path = "fixtures/configs/default.json";
  std::string scenario, out_dir, csv_path, svg_path;
  std::string domain_path = "fixtures/gridcan-domain.pddl";
  std::string problem_path = "fixtures/gridcan-problem.pddl";
  std::string mode = "uniform-cost";
  std::string log_path, executor_id;
  std::optional<uint64_t> seed_opt;
  uint64_t eval_seed = 0;
  int episodes = 0;
  bool dump_traj = false;

  auto* run = app.add_subcommand("run", "run the adaptation loop");
  run->add_option("--config", config_path, "experiment config JSON");
  uint64_t seed_value = 0;
  auto* seed_flag = run->add_option("--seed", seed_value, "single seed override");
  run->add_option("--scenario", scenario, "novelty scenario name or 'none'");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--dump-trajectories", dump_traj, "write JSONL trajectories");

  auto* eval = app.add_subcommand("eval", "evaluate the scripted baseline pipeline");
  eval->add_option("--config", config_path, "experiment config JSON");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--scenario", scenario, "novelty scenario name");
  eval->add_option("--episodes", episodes, "episode count");

  auto* agg = app.add_subcommand("aggregate", "aggregate run summaries");
  std::string agg_dir = "runs";
  agg->add_option("--dir", agg_dir, "directory containing summary.json files");

  auto* plot = app.add_subcommand("plot", "render a metrics CSV as SVG");
  plot->add_option("--csv", csv_path, "input CSV")->required();
  plot->add_option("--out", svg_path, "output SVG path");

  auto* plan_cmd = app.add_subcommand("plan", "run the symbolic planner");
  plan_cmd->add_option("--domain", domain_path, "domain file");
  plan_cmd->add_option("--problem", problem_path, "problem file");
  plan_cmd->add_option("--mode", mode, "uniform-cost | astar-goalcount | greedy-goalcount");

  auto* induce = app.add_subcommand("induce", "induce operators from a transition log");
  induce->add_option("--log", log_path, "transition JSONL")->required();
  induce->add_option("--executor", executor_id, "executor id filter");
  induce->add_option("--domain", domain_path, "domain file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (seed_flag->count() > 0) seed_opt = seed_value;
      return cmd_run(config_path, seed_opt, scenario, out_dir, dump_traj);
    }
    if (eval->parsed()) return cmd_eval(config_path, eval_seed, scenario, episodes);
    if (agg->parsed()) return cmd_aggregate(agg_dir);
    if (plot->parsed()) return cmd_plot(csv_path, svg_path);
    if (plan_cmd->parsed()) return cmd_plan(domain_path, problem_path, mode);
    if (induce->parsed()) return cmd_induce(log_path, executor_id, domain_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const FixtureError& e) {
    std::cerr << "fixture error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
