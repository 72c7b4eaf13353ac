#pragma once

#include <span>
#include <vector>

#include "prefrec/nn/network.hpp"

namespace prefrec::nn {

/// Result of comparing analytic gradients against central differences.
struct FiniteDiffReport {
  double max_rel_error = 0.0;
  int checked = 0;
};

/// Checks d<upstream, net(x)>/dparams against central differences with the
/// given step. Perturbation and both evaluations run in double on a copy of
/// the parameters so the comparison is not limited by float storage.
FiniteDiffReport finite_diff_check(const NetworkParams& net, std::span<const double> input,
                                   std::span<const double> upstream,
                                   const GradientBundle& analytic, double h = 1e-4);

/// Same check for the gradient with respect to the input vector.
FiniteDiffReport finite_diff_check_input(const NetworkParams& net, std::span<const double> input,
                                         std::span<const double> upstream,
                                         std::span<const double> analytic_input_grad,
                                         double h = 1e-4);

}  // namespace prefrec::nn
