#include "prefrec/nn/network.hpp"

#include <cmath>
#include <cstddef>

#include "prefrec/errors.hpp"

namespace prefrec::nn {

namespace {

double apply_activation(Activation act, double z) {
  switch (act) {
    case Activation::kIdentity:
      return z;
    case Activation::kRectifier:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
  }
  return z;
}

// Derivative as a function of the pre-activation. Rectifier subgradient at
// zero is defined as 0.
double activation_grad(Activation act, double z) {
  switch (act) {
    case Activation::kIdentity:
      return 1.0;
    case Activation::kRectifier:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

}  // namespace

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.w.size() + layer.b.size();
  return n;
}

bool NetworkParams::finite() const {
  for (const auto& layer : layers) {
    for (float x : layer.w)
      if (!std::isfinite(x)) return false;
    for (float x : layer.b)
      if (!std::isfinite(x)) return false;
  }
  return true;
}

NetworkParams make_mlp(int input_dim, int hidden_dim, int hidden_layers, int output_dim,
                       Activation output_act, Rng& rng) {
  if (input_dim < 1 || output_dim < 1 || hidden_dim < 1 || hidden_layers < 0)
    throw ConfigError("make_mlp: dimensions must be positive");
  NetworkParams net;
  int in = input_dim;
  for (int k = 0; k < hidden_layers; ++k) {
    NetworkParams::Layer layer;
    layer.in = in;
    layer.out = hidden_dim;
    layer.act = Activation::kRectifier;
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    layer.w.resize(static_cast<std::size_t>(layer.out) * layer.in);
    layer.b.resize(layer.out);
    for (auto& x : layer.w) x = static_cast<float>(rng.uniform(-bound, bound));
    for (auto& x : layer.b) x = static_cast<float>(rng.uniform(-bound, bound));
    net.layers.push_back(std::move(layer));
    in = hidden_dim;
  }
  NetworkParams::Layer out_layer;
  out_layer.in = in;
  out_layer.out = output_dim;
  out_layer.act = output_act;
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  out_layer.w.resize(static_cast<std::size_t>(output_dim) * in);
  out_layer.b.resize(output_dim);
  for (auto& x : out_layer.w) x = static_cast<float>(rng.uniform(-bound, bound));
  for (auto& x : out_layer.b) x = static_cast<float>(rng.uniform(-bound, bound));
  net.layers.push_back(std::move(out_layer));
  return net;
}

void forward(const NetworkParams& net, std::span<const double> input, ForwardTrace& trace) {
  if (net.layers.empty()) throw ConfigError("forward: network has no layers");
  if (static_cast<int>(input.size()) != net.input_dim())
    throw ConfigError("forward: input size " + std::to_string(input.size()) +
                      " does not match layer 0 input dim " + std::to_string(net.input_dim()));

  const std::size_t n_layers = net.layers.size();
  trace.inputs.resize(n_layers);
  trace.preact.resize(n_layers);

  trace.inputs[0].assign(input.begin(), input.end());
  for (std::size_t k = 0; k < n_layers; ++k) {
    const auto& layer = net.layers[k];
    const std::vector<double>& x = trace.inputs[k];
    if (static_cast<int>(x.size()) != layer.in)
      throw ConfigError("forward: layer " + std::to_string(k) + " expects input dim " +
                        std::to_string(layer.in) + ", got " + std::to_string(x.size()));
    auto& z = trace.preact[k];
    z.resize(layer.out);
    for (int i = 0; i < layer.out; ++i) {
      const float* row = layer.w.data() + static_cast<std::size_t>(i) * layer.in;
      double acc = layer.b[i];
      for (int j = 0; j < layer.in; ++j) acc += static_cast<double>(row[j]) * x[j];
      z[i] = acc;
    }
    std::vector<double>& y = (k + 1 < n_layers) ? trace.inputs[k + 1] : trace.output;
    y.resize(layer.out);
    for (int i = 0; i < layer.out; ++i) y[i] = apply_activation(layer.act, z[i]);
  }
}

std::vector<double> forward(const NetworkParams& net, std::span<const double> input) {
  ForwardTrace trace;
  forward(net, input, trace);
  return trace.output;
}

std::vector<double> forward(const NetworkParams& net, std::span<const float> input) {
  std::vector<double> widened(input.begin(), input.end());
  return forward(net, std::span<const double>(widened));
}

void forward(const NetworkParams& net, std::span<const float> input, ForwardTrace& trace) {
  std::vector<double> widened(input.begin(), input.end());
  forward(net, std::span<const double>(widened), trace);
}

void GradientBundle::init_like(const NetworkParams& net) {
  layers.resize(net.layers.size());
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    layers[k].w.assign(net.layers[k].w.size(), 0.0);
    layers[k].b.assign(net.layers[k].b.size(), 0.0);
  }
}

void GradientBundle::set_zero() {
  for (auto& layer : layers) {
    std::fill(layer.w.begin(), layer.w.end(), 0.0);
    std::fill(layer.b.begin(), layer.b.end(), 0.0);
  }
}

void GradientBundle::scale(double factor) {
  for (auto& layer : layers) {
    for (auto& g : layer.w) g *= factor;
    for (auto& g : layer.b) g *= factor;
  }
}

void GradientBundle::add_scaled(const GradientBundle& other, double factor) {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (std::size_t i = 0; i < layers[k].w.size(); ++i) layers[k].w[i] += factor * other.layers[k].w[i];
    for (std::size_t i = 0; i < layers[k].b.size(); ++i) layers[k].b[i] += factor * other.layers[k].b[i];
  }
}

bool GradientBundle::finite() const {
  for (const auto& layer : layers) {
    for (double g : layer.w)
      if (!std::isfinite(g)) return false;
    for (double g : layer.b)
      if (!std::isfinite(g)) return false;
  }
  return true;
}

std::size_t GradientBundle::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.w.size() + layer.b.size();
  return n;
}

void backward(const NetworkParams& net, const ForwardTrace& trace,
              std::span<const double> upstream, GradientBundle& grads,
              std::vector<double>* input_grad) {
  const std::size_t n_layers = net.layers.size();
  if (grads.layers.size() != n_layers)
    throw ConfigError("backward: gradient bundle shape does not match network");
  if (static_cast<int>(upstream.size()) != net.output_dim())
    throw ConfigError("backward: upstream size " + std::to_string(upstream.size()) +
                      " does not match output dim " + std::to_string(net.output_dim()));

  std::vector<double> delta(upstream.begin(), upstream.end());
  std::vector<double> delta_prev;
  for (std::size_t kk = n_layers; kk-- > 0;) {
    const auto& layer = net.layers[kk];
    const std::vector<double>& x = trace.inputs[kk];
    const std::vector<double>& z = trace.preact[kk];

    // delta through the activation
    for (int i = 0; i < layer.out; ++i) delta[i] *= activation_grad(layer.act, z[i]);

    auto& gw = grads.layers[kk].w;
    auto& gb = grads.layers[kk].b;
    for (int i = 0; i < layer.out; ++i) {
      const double d = delta[i];
      if (d == 0.0) continue;
      double* grow = gw.data() + static_cast<std::size_t>(i) * layer.in;
      for (int j = 0; j < layer.in; ++j) grow[j] += d * x[j];
      gb[i] += d;
    }

    const bool need_input = kk > 0 || input_grad != nullptr;
    if (need_input) {
      delta_prev.assign(layer.in, 0.0);
      for (int i = 0; i < layer.out; ++i) {
        const double d = delta[i];
        if (d == 0.0) continue;
        const float* row = layer.w.data() + static_cast<std::size_t>(i) * layer.in;
        for (int j = 0; j < layer.in; ++j) delta_prev[j] += d * static_cast<double>(row[j]);
      }
      delta.swap(delta_prev);
    }
  }
  if (input_grad != nullptr) *input_grad = delta;
}

void blend_into(const NetworkParams& source, double retention, NetworkParams& target) {
  if (source.layers.size() != target.layers.size())
    throw ConfigError("blend_into: layer count mismatch");
  for (std::size_t k = 0; k < source.layers.size(); ++k) {
    const auto& src = source.layers[k];
    auto& dst = target.layers[k];
    if (src.w.size() != dst.w.size() || src.b.size() != dst.b.size())
      throw ConfigError("blend_into: layer " + std::to_string(k) + " shape mismatch");
    for (std::size_t i = 0; i < src.w.size(); ++i)
      dst.w[i] = static_cast<float>((1.0 - retention) * static_cast<double>(src.w[i]) +
                                    retention * static_cast<double>(dst.w[i]));
    for (std::size_t i = 0; i < src.b.size(); ++i)
      dst.b[i] = static_cast<float>((1.0 - retention) * static_cast<double>(src.b[i]) +
                                    retention * static_cast<double>(dst.b[i]));
  }
}

}  // namespace prefrec::nn
