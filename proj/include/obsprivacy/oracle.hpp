#pragma once

// Independent numerical cross-checks. Nothing here touches the gradient
// code paths it is used to verify.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <span>

#include "obsprivacy/gramian.hpp"
#include "obsprivacy/graph.hpp"

namespace obsprivacy {

/// Central differences of privacy_cost, one weight at a time.
inline Eigen::VectorXd finite_difference_gradient(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                                  std::span<const std::size_t> intruders, const CostWindow& window,
                                                  double h = 1e-5) {
  Eigen::VectorXd grad(w.size());
  for (Eigen::Index l = 0; l < w.size(); ++l) {
    Eigen::VectorXd up = w;
    Eigen::VectorXd down = w;
    up[l] += h;
    down[l] -= h;
    grad[l] = (privacy_cost(graph, up, intruders, window) - privacy_cost(graph, down, intruders, window)) / (2.0 * h);
  }
  return grad;
}

/// max_l |a_l - b_l| / ||b||_inf, with an absolute fallback when b vanishes.
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() == 0) return 0.0;
  const double scale = b.cwiseAbs().maxCoeff();
  const double diff = (a - b).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace obsprivacy
