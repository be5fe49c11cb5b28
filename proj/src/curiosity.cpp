#include "owa/curiosity.hpp"

#include <cmath>
#include <stdexcept>

namespace owa {

CuriosityModel::CuriosityModel(int obs_size, int n_actions, Phi phi,
                               int feature_size, int hidden, double eta,
                               double learning_rate, uint64_t seed)
    : obs_size_(obs_size),
      n_actions_(n_actions),
      phi_mode_(phi),
      feature_size_(phi == Phi::Identity ? obs_size : feature_size),
      eta_(eta),
      lr_(learning_rate),
      forward_({feature_size_ + n_actions, hidden, feature_size_},
               derive_seed(seed, 1)),
      inverse_({feature_size_ * 2, hidden, n_actions}, derive_seed(seed, 2)) {
  if (phi_mode_ == Phi::LearnedLinear) {
    Rng rng(derive_seed(seed, 3));
    double scale = 1.0 / std::sqrt(static_cast<double>(obs_size_));
    phi_matrix_.resize(static_cast<size_t>(feature_size_) * obs_size_);
    for (auto& v : phi_matrix_) v = rng.uniform(-scale, scale);
  }
}

CuriosityModel CuriosityModel::make_default(int obs_size, int n_actions,
                                            uint64_t seed) {
  return CuriosityModel(obs_size, n_actions, Phi::Identity, obs_size, 32, 0.1,
                        1e-2, seed);
}

std::vector<double> CuriosityModel::features(const Observation& obs) const {
  if (static_cast<int>(obs.size()) != obs_size_)
    throw std::invalid_argument("ShapeMismatch: observation size");
  if (phi_mode_ == Phi::Identity) return obs;
  std::vector<double> feat(feature_size_, 0.0);
  for (int f = 0; f < feature_size_; ++f) {
    const double* row = &phi_matrix_[static_cast<size_t>(f) * obs_size_];
    for (int i = 0; i < obs_size_; ++i) feat[f] += row[i] * obs[i];
  }
  return feat;
}

std::vector<double> CuriosityModel::forward_input(const std::vector<double>& feat,
                                                  int action) const {
  std::vector<double> in(feat);
  in.resize(feat.size() + n_actions_, 0.0);
  in[feat.size() + action] = 1.0;
  return in;
}

double CuriosityModel::intrinsic_reward(const Observation& obs, int action,
                                        const Observation& next_obs) const {
  auto f1 = features(obs);
  auto f2 = features(next_obs);
  auto pred = forward_.forward(forward_input(f1, action));
  double err2 = 0.0;
  for (int i = 0; i < feature_size_; ++i) {
    double d = pred[i] - f2[i];
    err2 += d * d;
  }
  return 0.5 * eta_ * err2;
}

std::pair<double, double> CuriosityModel::update(const std::vector<Sample>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty curiosity batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  auto fwd_grads = forward_.zero_gradients();
  auto inv_grads = inverse_.zero_gradients();
  std::vector<double> phi_grads(phi_matrix_.size(), 0.0);
  double fwd_loss = 0.0, inv_loss = 0.0;

  for (const auto& s : batch) {
    auto f1 = features(s.obs);
    auto f2 = features(s.next_obs);

    // Forward model, squared error; phi is treated as fixed here.
    FeedForwardNet::Trace ft;
    auto pred = forward_.forward_trace(forward_input(f1, s.action), ft);
    std::vector<double> dpred(feature_size_);
    for (int i = 0; i < feature_size_; ++i) {
      double d = pred[i] - f2[i];
      fwd_loss += 0.5 * d * d * inv_n;
      dpred[i] = d * inv_n;
    }
    FeedForwardNet::accumulate(fwd_grads, forward_.backward(ft, dpred), 1.0);

    // Inverse model, softmax cross-entropy on the taken action.
    std::vector<double> in(f1);
    in.insert(in.end(), f2.begin(), f2.end());
    FeedForwardNet::Trace it;
    auto logits = inverse_.forward_trace(in, it);
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : logits) z += std::exp(v - mx);
    inv_loss += (-(logits[s.action] - mx) + std::log(z)) * inv_n;
    std::vector<double> dlogits(n_actions_);
    for (int a = 0; a < n_actions_; ++a) {
      double p = std::exp(logits[a] - mx) / z;
      dlogits[a] = (p - (a == s.action ? 1.0 : 0.0)) * inv_n;
    }
    std::vector<double> dinput;
    FeedForwardNet::accumulate(inv_grads, inverse_.backward(it, dlogits, &dinput),
                               1.0);

    // The encoder learns from the inverse loss only.
    if (phi_mode_ == Phi::LearnedLinear) {
      for (int f = 0; f < feature_size_; ++f) {
        double g1 = dinput[f];
        double g2 = dinput[feature_size_ + f];
        double* row = &phi_grads[static_cast<size_t>(f) * obs_size_];
        for (int i = 0; i < obs_size_; ++i)
          row[i] += g1 * s.obs[i] + g2 * s.next_obs[i];
      }
    }
  }

  forward_.apply_gradients(fwd_grads, lr_);
  inverse_.apply_gradients(inv_grads, lr_);
  if (phi_mode_ == Phi::LearnedLinear)
    for (size_t i = 0; i < phi_matrix_.size(); ++i)
      phi_matrix_[i] -= lr_ * phi_grads[i];

  return {fwd_loss, inv_loss};
}

int CuriosityModel::predict_action(const Observation& obs,
                                   const Observation& next_obs) const {
  auto f1 = features(obs);
  auto f2 = features(next_obs);
  std::vector<double> in(f1);
  in.insert(in.end(), f2.begin(), f2.end());
  auto logits = inverse_.forward(in);
  int best = 0;
  for (int a = 1; a < n_actions_; ++a)
    if (logits[a] > logits[best]) best = a;
  return best;
}

}  // namespace owa
