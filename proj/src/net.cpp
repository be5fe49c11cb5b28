#include "owa/net.hpp"

#include <cmath>
#include <stdexcept>

namespace owa {

FeedForwardNet::FeedForwardNet(std::vector<int> layer_sizes, uint64_t seed)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("need at least two layers");
  Rng rng(seed);
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    int in = sizes_[l], out = sizes_[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(static_cast<size_t>(in) * out);
    for (auto& v : w) v = rng.uniform(-scale, scale);
    weights_.push_back(std::move(w));
    biases_.emplace_back(out, 0.0);
  }
}

std::vector<double> FeedForwardNet::forward(const std::vector<double>& input) const {
  Trace t;
  return forward_trace(input, t);
}

std::vector<double> FeedForwardNet::forward_trace(const std::vector<double>& input,
                                                  Trace& trace) const {
  if (static_cast<int>(input.size()) != sizes_.front())
    throw std::invalid_argument("ShapeMismatch: input size");
  trace.activations.clear();
  trace.activations.push_back(input);
  std::vector<double> cur = input;
  for (size_t l = 0; l < weights_.size(); ++l) {
    int in = sizes_[l], out = sizes_[l + 1];
    std::vector<double> next(out);
    for (int o = 0; o < out; ++o) {
      double z = biases_[l][o];
      const double* wrow = &weights_[l][static_cast<size_t>(o) * in];
      for (int i = 0; i < in; ++i) z += wrow[i] * cur[i];
      next[o] = (l + 1 == weights_.size()) ? z : std::tanh(z);
    }
    trace.activations.push_back(next);
    cur = std::move(next);
  }
  return cur;
}

FeedForwardNet::Gradients FeedForwardNet::backward(
    const Trace& trace, const std::vector<double>& output_grad,
    std::vector<double>* input_grad) const {
  if (trace.activations.size() != sizes_.size())
    throw std::invalid_argument("ShapeMismatch: trace");
  if (static_cast<int>(output_grad.size()) != sizes_.back())
    throw std::invalid_argument("ShapeMismatch: output gradient");

  Gradients g = zero_gradients();
  std::vector<double> delta = output_grad;  // dL/dz at the output (identity)
  for (size_t l = weights_.size(); l-- > 0;) {
    int in = sizes_[l], out = sizes_[l + 1];
    const auto& a_in = trace.activations[l];
    for (int o = 0; o < out; ++o) {
      g.biases[l][o] += delta[o];
      double* gw = &g.weights[l][static_cast<size_t>(o) * in];
      for (int i = 0; i < in; ++i) gw[i] += delta[o] * a_in[i];
    }
    if (l == 0 && input_grad == nullptr) break;
    std::vector<double> prev(in, 0.0);
    for (int i = 0; i < in; ++i) {
      double acc = 0.0;
      for (int o = 0; o < out; ++o)
        acc += weights_[l][static_cast<size_t>(o) * in + i] * delta[o];
      prev[i] = acc;
    }
    if (l > 0) {
      // Through the tanh of layer l's input activations.
      for (int i = 0; i < in; ++i) {
        double a = trace.activations[l][i];
        prev[i] *= (1.0 - a * a);
      }
    }
    if (l == 0) {
      if (input_grad) *input_grad = prev;
      break;
    }
    delta = std::move(prev);
  }
  return g;
}

void FeedForwardNet::apply_gradients(const Gradients& grads, double lr) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    for (size_t i = 0; i < weights_[l].size(); ++i)
      weights_[l][i] -= lr * grads.weights[l][i];
    for (size_t i = 0; i < biases_[l].size(); ++i)
      biases_[l][i] -= lr * grads.biases[l][i];
  }
}

FeedForwardNet::Gradients FeedForwardNet::zero_gradients() const {
  Gradients g;
  for (size_t l = 0; l < weights_.size(); ++l) {
    g.weights.emplace_back(weights_[l].size(), 0.0);
    g.biases.emplace_back(biases_[l].size(), 0.0);
  }
  return g;
}

void FeedForwardNet::accumulate(Gradients& into, const Gradients& grads,
                                double scale) {
  for (size_t l = 0; l < into.weights.size(); ++l) {
    for (size_t i = 0; i < into.weights[l].size(); ++i)
      into.weights[l][i] += scale * grads.weights[l][i];
    for (size_t i = 0; i < into.biases[l].size(); ++i)
      into.biases[l][i] += scale * grads.biases[l][i];
  }
}

size_t FeedForwardNet::parameter_count() const {
  size_t n = 0;
  for (size_t l = 0; l < weights_.size(); ++l)
    n += weights_[l].size() + biases_[l].size();
  return n;
}

double FeedForwardNet::get_parameter(size_t i) const {
  for (size_t l = 0; l < weights_.size(); ++l) {
    if (i < weights_[l].size()) return weights_[l][i];
    i -= weights_[l].size();
    if (i < biases_[l].size()) return biases_[l][i];
    i -= biases_[l].size();
  }
  throw std::out_of_range("parameter index");
}

void FeedForwardNet::set_parameter(size_t i, double v) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    if (i < weights_[l].size()) {
      weights_[l][i] = v;
      return;
    }
    i -= weights_[l].size();
    if (i < biases_[l].size()) {
      biases_[l][i] = v;
      return;
    }
    i -= biases_[l].size();
  }
  throw std::out_of_range("parameter index");
}

double FeedForwardNet::gradient_entry(const Gradients& g, size_t i) const {
  for (size_t l = 0; l < g.weights.size(); ++l) {
    if (i < g.weights[l].size()) return g.weights[l][i];
    i -= g.weights[l].size();
    if (i < g.biases[l].size()) return g.biases[l][i];
    i -= g.biases[l].size();
  }
  throw std::out_of_range("gradient index");
}

}  // namespace owa
