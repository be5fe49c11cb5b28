#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "owa/symbolic.hpp"

namespace owa {

// Sub-symbolic observation: fixed-length vector of reals.
using Observation = std::vector<double>;

// Discrete primitive action, an index into the environment's action set.
struct PrimitiveAction {
  int index = 0;
};

struct StepResult {
  Observation observation;
  double extrinsic_reward = 0.0;
  bool terminated = false;  // task outcome reached
  bool truncated = false;   // step limit hit
};

struct MdpConfig {
  double gamma = 0.95;
  int episode_step_limit = 1000;
};

// Deterministic, single-owner episodic environment.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation reset(uint64_t seed) = 0;
  virtual StepResult step(const PrimitiveAction& action) = 0;
  virtual int action_count() const = 0;
  virtual int observation_size() const = 0;
  virtual const MdpConfig& mdp_config() const = 0;
  virtual bool episode_done() const = 0;
  virtual Observation current_observation() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// d: Observation -> SymbolicState. Pure and total.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual SymbolicState detect(const Observation& obs) const = 0;
  // Predicates the detector can ever emit, for IPT validation.
  virtual std::set<std::string> output_predicates() const = 0;
};

}  // namespace owa
