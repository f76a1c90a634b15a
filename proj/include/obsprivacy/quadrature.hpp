#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "obsprivacy/error.hpp"

namespace obsprivacy {

/// Gauss-Legendre rule on [-1, 1]. Nodes are roots of P_n found by Newton
/// iteration from the Chebyshev-like initial guess; weights are
/// 2 / ((1 - x^2) P_n'(x)^2).
class GaussLegendre {
 public:
  explicit GaussLegendre(int order) : nodes_(static_cast<std::size_t>(order)), weights_(nodes_.size()) {
    if (order < 1) throw Error(ErrorCode::InvalidWindow, "quadrature order must be positive");
    const int n = order;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      nodes_[static_cast<std::size_t>(i)] = -z;
      nodes_[static_cast<std::size_t>(n - 1 - i)] = z;
      weights_[static_cast<std::size_t>(i)] = w;
      weights_[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) nodes_[static_cast<std::size_t>(n / 2)] = 0.0;
  }

  int order() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Calls `visit(tau, weight)` for every node of the rule mapped onto
  /// [a, b], split into equal panels no longer than `max_panel`.
  template <class Visit>
  void for_each_node(double a, double b, double max_panel, Visit&& visit) const {
    const double length = b - a;
    const auto panels = static_cast<int>(std::max(1.0, std::ceil(length / max_panel - 1e-12)));
    const double h = length / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * h;
      const double mid = lo + 0.5 * h;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        visit(mid + 0.5 * h * nodes_[i], 0.5 * h * weights_[i]);
      }
    }
  }

  template <class F>
  double integrate(F&& f, double a, double b, double max_panel = 1.0) const {
    double sum = 0.0;
    for_each_node(a, b, max_panel, [&](double x, double w) { sum += w * f(x); });
    return sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace obsprivacy
