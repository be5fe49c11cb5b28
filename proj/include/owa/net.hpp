#pragma once

#include <cstdint>
#include <vector>

#include "owa/rng.hpp"

namespace owa {

// Dense feed-forward network, tanh on hidden layers, identity on the
// output. Weights are plain row-major matrices; gradients are computed by
// hand so the whole thing stays dependency-free and bit-reproducible.
class FeedForwardNet {
 public:
  FeedForwardNet() = default;
  FeedForwardNet(std::vector<int> layer_sizes, uint64_t seed);

  std::vector<double> forward(const std::vector<double>& input) const;

  // Activations of every layer (input first), for backprop.
  struct Trace {
    std::vector<std::vector<double>> activations;
  };
  std::vector<double> forward_trace(const std::vector<double>& input,
                                    Trace& trace) const;

  struct Gradients {
    std::vector<std::vector<double>> weights;  // same shapes as weights_
    std::vector<std::vector<double>> biases;
  };

  // Exact backpropagation of dL/d(output) through the trace.
  // input_grad, when non-null, receives dL/d(input).
  Gradients backward(const Trace& trace, const std::vector<double>& output_grad,
                     std::vector<double>* input_grad = nullptr) const;

  void apply_gradients(const Gradients& grads, double learning_rate);

  Gradients zero_gradients() const;
  static void accumulate(Gradients& into, const Gradients& grads, double scale);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  // Flat parameter access, used by the finite-difference tests.
  size_t parameter_count() const;
  double get_parameter(size_t i) const;
  void set_parameter(size_t i, double v);
  double gradient_entry(const Gradients& g, size_t i) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::vector<double>> weights_;  // [layer][out * in_size + in]
  std::vector<std::vector<double>> biases_;   // [layer][out]
};

}  // namespace owa
