#include "prefrec/nn/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "prefrec/errors.hpp"

namespace prefrec::nn {

void AdamState::init_like(const NetworkParams& net) {
  layers.clear();
  layers.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    layers[i].mw.assign(l.w.size(), 0.0f);
    layers[i].vw.assign(l.w.size(), 0.0f);
    layers[i].mb.assign(l.b.size(), 0.0f);
    layers[i].vb.assign(l.b.size(), 0.0f);
  }
  step = 0;
}

namespace {

void update_span(std::vector<float>& params, const std::vector<double>& grads,
                 std::vector<float>& m, std::vector<float>& v, const AdamState& st,
                 double lr, double bc1, double bc2) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m_new = st.beta1 * static_cast<double>(m[i]) + (1.0 - st.beta1) * g;
    const double v_new = st.beta2 * static_cast<double>(v[i]) + (1.0 - st.beta2) * g * g;
    m[i] = static_cast<float>(m_new);
    v[i] = static_cast<float>(v_new);
    const double m_hat = m_new / bc1;
    const double v_hat = v_new / bc2;
    const double p = static_cast<double>(params[i]) - lr * m_hat / (std::sqrt(v_hat) + st.eps);
    params[i] = static_cast<float>(p);
  }
}

}  // namespace

void adam_step(NetworkParams& params, const GradientBundle& grads, AdamState& state, double lr) {
  if (!(lr > 0.0)) {
    throw ConfigError("adam_step: learning rate must be positive, got " + std::to_string(lr));
  }
  if (state.layers.size() != params.layers.size()) {
    throw ConfigError("adam_step: optimizer state does not match network shape");
  }
  if (!grads.finite()) {
    throw NumericError("adam_step: non-finite gradient; clipping is disabled so this is fatal");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    auto& layer = params.layers[i];
    auto& mom = state.layers[i];
    const auto& g = grads.layers[i];
    if (g.w.size() != layer.w.size() || g.b.size() != layer.b.size()) {
      throw ConfigError("adam_step: gradient shape mismatch at layer " + std::to_string(i));
    }
    update_span(layer.w, g.w, mom.mw, mom.vw, state, lr, bc1, bc2);
    update_span(layer.b, g.b, mom.mb, mom.vb, state, lr, bc1, bc2);
  }
}

}  // namespace prefrec::nn
