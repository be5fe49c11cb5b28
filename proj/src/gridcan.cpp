#include "owa/gridcan.hpp"

#include <cmath>

#include "json.hpp"
#include "owa/errors.hpp"

namespace owa {

using nlohmann::json;

NoveltyScenario NoveltyScenario::from_json_text(const std::string& text) {
  json j = json::parse(text);
  NoveltyScenario s;
  s.name = j.at("name").get<std::string>();
  s.parameters_json = j.value("parameters", json::object()).dump();
  return s;
}

std::string NoveltyScenario::to_json_text() const {
  json j;
  j["name"] = name;
  j["parameters"] = json::parse(parameters_json);
  return j.dump();
}

GridCanEnv::GridCanEnv(MdpConfig config) : config_(config) {}

namespace {

Cell cell_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw UnknownScenarioError("cell must be a [x, y] pair");
  Cell c{j[0].get<int>(), j[1].get<int>()};
  if (c.x < 0 || c.x >= GridCanLayout::kWidth || c.y < 0 ||
      c.y >= GridCanLayout::kHeight)
    throw UnknownScenarioError("cell outside the grid");
  return c;
}

std::set<std::pair<int, int>> cells_from_json(const json& j) {
  std::set<std::pair<int, int>> out;
  for (const auto& item : j) {
    Cell c = cell_from_json(item);
    out.insert({c.x, c.y});
  }
  return out;
}

}  // namespace

void GridCanEnv::inject_novelty(const NoveltyScenario& scenario) {
  if (started_ && !episode_done())
    throw UnknownScenarioError("novelty injection is only allowed between episodes");
  json params = json::parse(scenario.parameters_json);
  if (scenario.name == "door") {
    door_active_ = true;
    door_boundary_west_x_ = params.value("boundary_west_x", 5);
    if (params.contains("passage")) door_passage_ = cell_from_json(params["passage"]);
    if (params.contains("switch")) door_switch_ = cell_from_json(params["switch"]);
  } else if (scenario.name == "obstacle") {
    obstacle_cells_ = cells_from_json(params.value("cells", json::array()));
  } else if (scenario.name == "elevated") {
    elevated_active_ = true;
  } else if (scenario.name == "hole") {
    hole_cells_ = cells_from_json(params.value("cells", json::array()));
  } else if (scenario.name == "light-off") {
    lightoff_active_ = true;
    if (params.contains("switch")) light_switch_ = cell_from_json(params["switch"]);
  } else {
    throw UnknownScenarioError("unknown scenario: " + scenario.name);
  }
  scenario_ = scenario;
}

Observation GridCanEnv::reset(uint64_t /*seed*/) {
  // The grid is fully deterministic; the seed is accepted for interface
  // uniformity and so that stochastic environments can slot in later.
  agent_ = GridCanLayout::kAgentStart;
  can_ = GridCanLayout::kCanStart;
  holding_ = false;
  can_in_bin_ = false;
  door_open_ = !door_active_;
  light_on_ = !lightoff_active_;
  steps_ = 0;
  terminated_ = false;
  truncated_ = false;
  started_ = true;
  return current_observation();
}

Observation GridCanEnv::current_observation() const {
  double cx = light_on_ ? can_.x / 7.0 : 0.0;
  double cy = light_on_ ? can_.y / 7.0 : 0.0;
  return {agent_.x / 7.0, agent_.y / 7.0, cx, cy,
          holding_ ? 1.0 : 0.0, door_open_ ? 1.0 : 0.0, light_on_ ? 1.0 : 0.0};
}

bool GridCanEnv::baseline_passable(Cell from, Cell to) {
  (void)from;
  return to.x >= 0 && to.x < GridCanLayout::kWidth && to.y >= 0 &&
         to.y < GridCanLayout::kHeight;
}

bool GridCanEnv::real_passable(Cell from, Cell to) const {
  if (!baseline_passable(from, to)) return false;
  if (obstacle_cells_.count({to.x, to.y})) return false;
  if (door_active_) {
    // The wall seals the boundary between columns boundary_west_x and
    // boundary_west_x+1; the only crossing runs through the passage cell's
    // row and only once the door has been toggled open.
    int wx = door_boundary_west_x_;
    bool crosses = (from.x == wx && to.x == wx + 1) || (from.x == wx + 1 && to.x == wx);
    if (crosses && !(door_open_ && from.y == door_passage_.y && to.y == door_passage_.y))
      return false;
  }
  return true;
}

StepResult GridCanEnv::step(const PrimitiveAction& action) {
  if (!started_ || episode_done())
    throw EpisodeFinishedError("step() after episode end");
  if (action.index < 0 || action.index >= GridCanLayout::kActions)
    throw std::out_of_range("action index out of range");

  ++steps_;
  double reward = 0.0;
  auto act = static_cast<GridAction>(action.index);

  switch (act) {
    case GridAction::Up:
    case GridAction::Down:
    case GridAction::Left:
    case GridAction::Right: {
      Cell to = agent_;
      if (act == GridAction::Up) to.y += 1;
      if (act == GridAction::Down) to.y -= 1;
      if (act == GridAction::Left) to.x -= 1;
      if (act == GridAction::Right) to.x += 1;
      if (real_passable(agent_, to)) {
        agent_ = to;
        if (holding_) can_ = agent_;
        if (hole_cells_.count({agent_.x, agent_.y})) {
          terminated_ = true;  // trap: episode over, no reward
        }
      }
      break;
    }
    case GridAction::Pick: {
      if (!holding_ && !can_in_bin_) {
        bool ok = elevated_active_
                      ? (agent_.x == can_.x && agent_.y == can_.y + 1)
                      : (agent_ == can_);
        if (ok) {
          holding_ = true;
          can_ = agent_;
        }
      }
      break;
    }
    case GridAction::Place: {
      if (holding_ && agent_ == GridCanLayout::kBin) {
        holding_ = false;
        can_ = GridCanLayout::kBin;
        can_in_bin_ = true;
        reward = 1.0;
        terminated_ = true;
      }
      break;
    }
    case GridAction::Toggle: {
      if (door_active_ && agent_ == door_switch_) door_open_ = true;
      if (lightoff_active_ && agent_ == light_switch_ && !light_on_) light_on_ = true;
      break;
    }
  }

  if (!terminated_ && steps_ >= config_.episode_step_limit) truncated_ = true;

  return {current_observation(), reward, terminated_, truncated_};
}

std::unique_ptr<Environment> GridCanEnv::clone() const {
  return std::make_unique<GridCanEnv>(*this);
}

namespace {
int denorm(double v) { return static_cast<int>(std::lround(v * 7.0)); }
}  // namespace

SymbolicState GridCanDetector::detect(const Observation& obs) const {
  SymbolicState s;
  Cell agent{denorm(obs[0]), denorm(obs[1])};
  bool holding = obs[4] > 0.5;
  bool door = obs[5] > 0.5;
  bool light = obs[6] > 0.5;

  auto region = [](Cell c) { return GridCanLayout::region_name(GridCanLayout::region_of(c)); };

  s.atoms.insert({"at-agent", {region(agent)}});
  s.atoms.insert({"container-at", {"bin", region(GridCanLayout::kBin)}});
  s.atoms.insert({"switch-at", {"door-switch", region(GridCanLayout::kDoorSwitch)}});
  s.atoms.insert({"switch-at", {"light-switch", region(GridCanLayout::kLightSwitch)}});
  if (door) s.atoms.insert({"door-open", {}});
  if (light) s.atoms.insert({"light-on", {}});

  if (holding) {
    // Proprioceptive: visible even in the dark.
    s.atoms.insert({"holding", {"can"}});
  } else if (light) {
    Cell can{denorm(obs[2]), denorm(obs[3])};
    if (can == GridCanLayout::kBin)
      s.atoms.insert({"in", {"can", "bin"}});
    else
      s.atoms.insert({"at", {"can", region(can)}});
  }
  return s;
}

std::set<std::string> GridCanDetector::output_predicates() const {
  return {"at-agent", "at", "holding", "in", "container-at", "switch-at",
          "door-open", "light-on"};
}

std::string gridcan_obs_key(const Observation& obs) {
  std::string key;
  for (size_t i = 0; i < obs.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(denorm(obs[i]));
  }
  return key;
}

}  // namespace owa
