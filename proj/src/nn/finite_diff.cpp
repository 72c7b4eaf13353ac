#include "prefrec/nn/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "prefrec/errors.hpp"

namespace prefrec::nn {

namespace {

struct DoubleNet {
  struct Layer {
    int in = 0, out = 0;
    Activation act = Activation::kIdentity;
    std::vector<double> w, b;
  };
  std::vector<Layer> layers;
};

DoubleNet widen(const NetworkParams& net) {
  DoubleNet d;
  d.layers.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& src = net.layers[i];
    auto& dst = d.layers[i];
    dst.in = src.in;
    dst.out = src.out;
    dst.act = src.act;
    dst.w.assign(src.w.begin(), src.w.end());
    dst.b.assign(src.b.begin(), src.b.end());
  }
  return d;
}

double apply_act(Activation act, double x) {
  switch (act) {
    case Activation::kIdentity: return x;
    case Activation::kRectifier: return x > 0.0 ? x : 0.0;
    case Activation::kTanh: return std::tanh(x);
  }
  return x;
}

double readout(const DoubleNet& net, std::span<const double> input,
               std::span<const double> upstream) {
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (const auto& l : net.layers) {
    next.assign(static_cast<std::size_t>(l.out), 0.0);
    for (int o = 0; o < l.out; ++o) {
      double acc = l.b[static_cast<std::size_t>(o)];
      const double* row = l.w.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(l.in);
      for (int i = 0; i < l.in; ++i) acc += row[i] * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = apply_act(l.act, acc);
    }
    cur.swap(next);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) s += upstream[i] * cur[i];
  return s;
}

double rel_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
  return std::fabs(analytic - numeric) / denom;
}

}  // namespace

FiniteDiffReport finite_diff_check(const NetworkParams& net, std::span<const double> input,
                                   std::span<const double> upstream,
                                   const GradientBundle& analytic, double h) {
  if (analytic.layers.size() != net.layers.size()) {
    throw ConfigError("finite_diff_check: gradient bundle does not match network shape");
  }
  DoubleNet d = widen(net);
  FiniteDiffReport report;
  for (std::size_t li = 0; li < d.layers.size(); ++li) {
    auto& layer = d.layers[li];
    const auto& g = analytic.layers[li];
    for (std::size_t i = 0; i < layer.w.size(); ++i) {
      const double saved = layer.w[i];
      layer.w[i] = saved + h;
      const double up = readout(d, input, upstream);
      layer.w[i] = saved - h;
      const double down = readout(d, input, upstream);
      layer.w[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      report.max_rel_error = std::max(report.max_rel_error, rel_error(g.w[i], numeric));
      report.checked += 1;
    }
    for (std::size_t i = 0; i < layer.b.size(); ++i) {
      const double saved = layer.b[i];
      layer.b[i] = saved + h;
      const double up = readout(d, input, upstream);
      layer.b[i] = saved - h;
      const double down = readout(d, input, upstream);
      layer.b[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      report.max_rel_error = std::max(report.max_rel_error, rel_error(g.b[i], numeric));
      report.checked += 1;
    }
  }
  return report;
}

FiniteDiffReport finite_diff_check_input(const NetworkParams& net, std::span<const double> input,
                                         std::span<const double> upstream,
                                         std::span<const double> analytic_input_grad,
                                         double h) {
  DoubleNet d = widen(net);
  std::vector<double> x(input.begin(), input.end());
  FiniteDiffReport report;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = readout(d, x, upstream);
    x[i] = saved - h;
    const double down = readout(d, x, upstream);
    x[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    report.max_rel_error = std::max(report.max_rel_error, rel_error(analytic_input_grad[i], numeric));
    report.checked += 1;
  }
  return report;
}

}  // namespace prefrec::nn
