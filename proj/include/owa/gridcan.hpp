#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>

#include "owa/env.hpp"

namespace owa {

// 8x8 grid, origin bottom-left, y grows north. Regions are column bands:
// region k covers columns 2k and 2k+1. Observation layout (all in [0,1]):
//   [agent_x/7, agent_y/7, can_x/7, can_y/7, holding, door_open, light_on]
// Can coordinates read 0 while the light is off.
struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class GridAction { Up = 0, Down = 1, Left = 2, Right = 3, Pick = 4, Place = 5, Toggle = 6 };

struct NoveltyScenario {
  std::string name;                 // door | obstacle | elevated | hole | light-off
  std::string parameters_json = "{}";

  static NoveltyScenario from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct GridCanLayout {
  static constexpr int kWidth = 8;
  static constexpr int kHeight = 8;
  static constexpr int kActions = 7;
  static constexpr int kObsSize = 7;
  static constexpr Cell kAgentStart{0, 0};
  static constexpr Cell kCanStart{2, 2};
  static constexpr Cell kBin{6, 6};
  static constexpr Cell kDoorSwitch{5, 3};
  static constexpr Cell kLightSwitch{1, 1};

  static int region_of(Cell c) { return c.x / 2; }
  static std::string region_name(int k) { return "Q" + std::to_string(k); }
};

class GridCanEnv : public Environment {
 public:
  explicit GridCanEnv(MdpConfig config = {});

  // Permanently alters dynamics for subsequent resets. Only valid between
  // episodes. Throws UnknownScenarioError for unrecognized names.
  void inject_novelty(const NoveltyScenario& scenario);

  Observation reset(uint64_t seed) override;
  StepResult step(const PrimitiveAction& action) override;
  int action_count() const override { return GridCanLayout::kActions; }
  int observation_size() const override { return GridCanLayout::kObsSize; }
  const MdpConfig& mdp_config() const override { return config_; }
  bool episode_done() const override { return terminated_ || truncated_; }
  Observation current_observation() const override;
  std::unique_ptr<Environment> clone() const override;

  const std::optional<NoveltyScenario>& scenario() const { return scenario_; }

  // True if a one-cell move between adjacent cells is allowed under the
  // *baseline* dynamics. Scripted executors plan against this model.
  static bool baseline_passable(Cell from, Cell to);

  Cell agent_cell() const { return agent_; }
  Cell can_cell() const { return can_; }

 private:
  bool real_passable(Cell from, Cell to) const;

  MdpConfig config_;
  std::optional<NoveltyScenario> scenario_;

  // Parsed novelty parameters.
  std::set<std::pair<int, int>> obstacle_cells_;
  std::set<std::pair<int, int>> hole_cells_;
  bool door_active_ = false;
  int door_boundary_west_x_ = 5;
  Cell door_passage_{6, 3};
  Cell door_switch_{5, 3};
  bool elevated_active_ = false;
  bool lightoff_active_ = false;
  Cell light_switch_{1, 1};

  // Episode state.
  Cell agent_{0, 0};
  Cell can_{2, 2};
  bool holding_ = false;
  bool can_in_bin_ = false;
  bool door_open_ = true;
  bool light_on_ = true;
  int steps_ = 0;
  bool terminated_ = false;
  bool truncated_ = false;
  bool started_ = false;
};

// Maps observations to symbolic states over the gridcan domain. Emits
// at-agent(Qk) from the agent's column band, the static container/switch
// locations, door-open / light-on flags, and exactly one of holding(can),
// in(can bin), at(can Qk) - the can atoms are omitted entirely while the
// light is off.
class GridCanDetector : public Detector {
 public:
  SymbolicState detect(const Observation& obs) const override;
  std::set<std::string> output_predicates() const override;
};

// Quantizes an observation into a stable table key ("x,y,cx,cy,h,d,l").
std::string gridcan_obs_key(const Observation& obs);

}  // namespace owa
