#pragma once

#include <utility>
#include <vector>

#include "owa/env.hpp"
#include "owa/net.hpp"

namespace owa {

// Intrinsic curiosity module: a feature encoder phi plus forward and
// inverse dynamics models. The forward model's prediction error supplies
// the intrinsic reward r = (eta / 2) * ||f(phi(s), a) - phi(s')||^2.
class CuriosityModel {
 public:
  enum class Phi { Identity, LearnedLinear };

  CuriosityModel(int obs_size, int n_actions, Phi phi, int feature_size,
                 int hidden, double eta, double learning_rate, uint64_t seed);

  // Smallest configuration that exercises the mechanism: identity encoder,
  // one hidden layer of 32 tanh units, lr 1e-2, eta 0.1.
  static CuriosityModel make_default(int obs_size, int n_actions, uint64_t seed);

  double eta() const { return eta_; }
  void set_eta(double eta) { eta_ = eta; }

  std::vector<double> features(const Observation& obs) const;

  // Prediction error reward; no model update.
  double intrinsic_reward(const Observation& obs, int action,
                          const Observation& next_obs) const;

  struct Sample {
    Observation obs;
    int action = 0;
    Observation next_obs;
  };

  // One gradient step on the forward model (squared error) and the inverse
  // model (cross-entropy over actions). With a learned-linear phi the
  // encoder receives gradients from the inverse loss only. Returns the
  // pre-update (forward_loss, inverse_loss) batch means.
  std::pair<double, double> update(const std::vector<Sample>& batch);

  // Inverse model's argmax action prediction, for diagnostics and tests.
  int predict_action(const Observation& obs, const Observation& next_obs) const;

  const FeedForwardNet& forward_model() const { return forward_; }

 private:
  std::vector<double> forward_input(const std::vector<double>& feat, int action) const;

  int obs_size_;
  int n_actions_;
  Phi phi_mode_;
  int feature_size_;
  double eta_;
  double lr_;
  std::vector<double> phi_matrix_;  // feature_size x obs_size, learned-linear
  FeedForwardNet forward_;
  FeedForwardNet inverse_;
};

}  // namespace owa
