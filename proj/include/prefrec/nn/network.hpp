#pragma once

#include <span>
#include <string>
#include <vector>

#include "prefrec/rng.hpp"

namespace prefrec::nn {

enum class Activation { kIdentity, kRectifier, kTanh };

/// Dense parameter set for one fixed-architecture MLP. Parameters are stored
/// as 32-bit floats (the checkpoint unit); all arithmetic on them runs in
/// double and results are rounded back on write.
struct NetworkParams {
  struct Layer {
    int in = 0;
    int out = 0;
    Activation act = Activation::kIdentity;
    std::vector<float> w;  // row-major [out][in]
    std::vector<float> b;  // [out]
  };

  std::vector<Layer> layers;

  int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
  std::size_t parameter_count() const;
  bool finite() const;
};

/// Builds `hidden_layers` rectifier layers of width `hidden_dim` followed by
/// a linear output layer with `output_act`. Weights and biases are fan-in
/// scaled uniform, drawn from `rng`.
NetworkParams make_mlp(int input_dim, int hidden_dim, int hidden_layers, int output_dim,
                       Activation output_act, Rng& rng);

/// Per-layer records of one forward pass, kept for the backward pass.
/// Reusable across calls; buffers are resized once and overwritten.
struct ForwardTrace {
  std::vector<std::vector<double>> inputs;  // inputs[k] = input to layer k
  std::vector<std::vector<double>> preact;  // pre-activation of layer k
  std::vector<double> output;
};

/// Pure forward pass. Throws ConfigError on input shape mismatch.
std::vector<double> forward(const NetworkParams& net, std::span<const double> input);
std::vector<double> forward(const NetworkParams& net, std::span<const float> input);
void forward(const NetworkParams& net, std::span<const double> input, ForwardTrace& trace);
void forward(const NetworkParams& net, std::span<const float> input, ForwardTrace& trace);

/// Partial derivatives shaped like the NetworkParams they were taken from.
struct GradientBundle {
  struct LayerGrad {
    std::vector<double> w;
    std::vector<double> b;
  };
  std::vector<LayerGrad> layers;

  void init_like(const NetworkParams& net);
  void set_zero();
  void scale(double factor);
  void add_scaled(const GradientBundle& other, double factor);
  bool finite() const;
  std::size_t parameter_count() const;
};

/// Accumulates the gradient of <upstream, net(input)> with respect to every
/// parameter into `grads` (which must be init_like the net). When
/// `input_grad` is non-null it receives the gradient w.r.t. the input
/// (overwritten, not accumulated).
void backward(const NetworkParams& net, const ForwardTrace& trace,
              std::span<const double> upstream, GradientBundle& grads,
              std::vector<double>* input_grad = nullptr);

/// Elementwise theta_hat <- (1 - retention) * theta + retention * theta_hat.
void blend_into(const NetworkParams& source, double retention, NetworkParams& target);

}  // namespace prefrec::nn
