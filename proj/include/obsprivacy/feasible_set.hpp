#pragma once

// The weight polytope {w : 1'w = 1, lower <= w <= upper} and projection onto
// it in the norm induced by a symmetric positive definite metric.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "obsprivacy/error.hpp"

namespace obsprivacy {

/// Simplex slice of a box. A single coordinate is the degenerate singleton
/// {1}; the box is not applied there because the sum constraint alone pins
/// the point.
class FeasibleSet {
 public:
  static constexpr double kSumTarget = 1.0;

  static FeasibleSet make(std::size_t dimension, double lower, double upper) {
    if (!(lower > 0.0) || !(lower < upper)) {
      throw Error(ErrorCode::InfeasibleSet,
                  "bounds must satisfy 0 < lower < upper (got " + std::to_string(lower) + ", " +
                      std::to_string(upper) + ")");
    }
    const double m = static_cast<double>(dimension);
    if (dimension >= 2 && (m * lower > kSumTarget || m * upper < kSumTarget)) {
      throw Error(ErrorCode::InfeasibleSet, "M*lower <= 1 <= M*upper violated for M=" +
                                                std::to_string(dimension));
    }
    return FeasibleSet(dimension, lower, upper);
  }

  std::size_t dimension() const noexcept { return dimension_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  bool is_singleton() const noexcept { return dimension_ == 1; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
    if (static_cast<std::size_t>(x.size()) != dimension_) return false;
    if (dimension_ == 0) return true;
    if (std::abs(x.sum() - kSumTarget) > tol) return false;
    if (dimension_ == 1) return true;
    return (x.array() >= lower_ - tol).all() && (x.array() <= upper_ + tol).all();
  }

  Eigen::VectorXd barycenter() const {
    if (dimension_ == 0) return Eigen::VectorXd();
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dimension_),
                                     kSumTarget / static_cast<double>(dimension_));
  }

  /// Upper bound on max ||x - y|| over the set. With d = x - y, sum(d) = 0
  /// and |d_i| <= r = upper - lower, so ||d||^2 <= r * ||d||_1 = 2 r P where
  /// P <= min(1 - M lower, M upper - 1) is the transferable mass. Whenever
  /// P <= r this gives sqrt(2) r, otherwise fall back to the box diagonal.
  double diameter() const {
    if (dimension_ <= 1) return 0.0;
    const double m = static_cast<double>(dimension_);
    const double r = upper_ - lower_;
    const double mass = std::min(kSumTarget - m * lower_, m * upper_ - kSumTarget);
    if (mass <= r) return std::sqrt(2.0) * r;
    return std::sqrt(m) * r;
  }

 private:
  FeasibleSet(std::size_t dimension, double lower, double upper)
      : dimension_(dimension), lower_(lower), upper_(upper) {}

  std::size_t dimension_;
  double lower_;
  double upper_;
};

namespace detail {

inline void check_metric(const Eigen::MatrixXd& metric, Eigen::Index m) {
  if (metric.rows() != m || metric.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "metric must be " + std::to_string(m) + "x" +
                                                  std::to_string(m));
  }
  const double scale = std::max(1.0, metric.cwiseAbs().maxCoeff());
  if ((metric - metric.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::NonSPDMetric, "metric is not symmetric");
  }
  if (m > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(metric);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NonSPDMetric, "metric is not positive definite");
    }
  }
}

// Multiplier of the sum constraint given the gradient and bound status
// (-1 lower, +1 upper, 0 free). With no free coordinates the multiplier is
// only bracketed by the active bounds; the bracket midpoint is returned.
inline double sum_multiplier(const Eigen::VectorXd& grad, const std::vector<int>& status) {
  double free_sum = 0.0;
  int free_count = 0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    const auto s = status[static_cast<std::size_t>(i)];
    if (s == 0) {
      free_sum += grad[i];
      ++free_count;
    } else if (s < 0) {
      lo = std::max(lo, -grad[i]);
    } else {
      hi = std::min(hi, -grad[i]);
    }
  }
  if (free_count > 0) return -free_sum / free_count;
  if (std::isinf(lo)) return hi;
  if (std::isinf(hi)) return lo;
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Stationarity plus primal-feasibility residual of `x` as a minimizer of
/// (y-x)' metric (y-x) over the set.
inline double kkt_residual(const FeasibleSet& set, const Eigen::MatrixXd& metric,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& x,
                           double active_tol = 1e-10) {
  const auto m = static_cast<Eigen::Index>(set.dimension());
  if (x.size() != m || y.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from set dimension");
  }
  if (m == 0) return 0.0;
  double primal = std::abs(x.sum() - FeasibleSet::kSumTarget);
  if (set.is_singleton()) return primal;
  primal = std::max(primal, std::max(0.0, set.lower() - x.minCoeff()));
  primal = std::max(primal, std::max(0.0, x.maxCoeff() - set.upper()));

  const Eigen::VectorXd grad = 2.0 * metric * (x - y);
  std::vector<int> status(static_cast<std::size_t>(m), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (x[i] - set.lower() <= active_tol) status[static_cast<std::size_t>(i)] = -1;
    else if (set.upper() - x[i] <= active_tol) status[static_cast<std::size_t>(i)] = 1;
  }
  const double mu = detail::sum_multiplier(grad, status);
  double dual = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = grad[i] + mu;
    const auto s = status[static_cast<std::size_t>(i)];
    if (s == 0) dual = std::max(dual, std::abs(r));
    else if (s < 0) dual = std::max(dual, std::max(0.0, -r));
    else dual = std::max(dual, std::max(0.0, r));
  }
  return std::max(primal, dual);
}

/// Pairwise coordinate descent: moves mass between the most and least
/// attractive coordinates with an exact line minimization. Converges for any
/// SPD metric; used when the active-set iteration cycles.
inline Eigen::VectorXd project_pairwise(const FeasibleSet& set, const Eigen::MatrixXd& metric,
                                        const Eigen::VectorXd& y, int max_iterations = 200000,
                                        double tol = 1e-13) {
  const auto m = static_cast<Eigen::Index>(set.dimension());
  detail::check_metric(metric, m);
  if (y.size() != m) throw Error(ErrorCode::DimensionMismatch, "y has wrong dimension");
  if (m <= 1) return set.barycenter();

  Eigen::VectorXd x = set.barycenter();
  Eigen::VectorXd grad = 2.0 * metric * (x - y);
  const double lo = set.lower();
  const double hi = set.upper();
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::Index up = -1;
    Eigen::Index down = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (x[i] < hi && (up < 0 || grad[i] < grad[up])) up = i;
      if (x[i] > lo && (down < 0 || grad[i] > grad[down])) down = i;
    }
    if (up < 0 || down < 0 || up == down) break;
    const double gap = grad[down] - grad[up];
    if (gap <= tol * std::max(1.0, grad.cwiseAbs().maxCoeff())) break;
    const double curvature =
        metric(up, up) + metric(down, down) - 2.0 * metric(up, down);
    double t = gap / (2.0 * curvature);
    t = std::min({t, hi - x[up], x[down] - lo});
    if (t <= 0.0) break;
    x[up] += t;
    x[down] -= t;
    grad += 2.0 * t * (metric.col(up) - metric.col(down));
  }
  return x;
}

/// argmin over the set of (y-x)' metric (y-x), by a primal active-set method
/// on the bound constraints started from the barycenter. The working set
/// changes at most a few times per coordinate on these problems, so an
/// iteration cap doubles as the cycling detector.
inline Eigen::VectorXd project(const FeasibleSet& set, const Eigen::MatrixXd& metric,
                               const Eigen::VectorXd& y) {
  const auto m = static_cast<Eigen::Index>(set.dimension());
  detail::check_metric(metric, m);
  if (y.size() != m) throw Error(ErrorCode::DimensionMismatch, "y has wrong dimension");
  if (!y.allFinite()) throw Error(ErrorCode::DimensionMismatch, "y has non-finite entries");
  if (m <= 1) return set.barycenter();
  if (set.contains(y, 1e-14)) return y;

  const double lo = set.lower();
  const double hi = set.upper();
  Eigen::VectorXd x = set.barycenter();
  std::vector<int> status(static_cast<std::size_t>(m), 0);
  const Eigen::VectorXd metric_y = metric * y;
  const double scale = std::max(1.0, metric.cwiseAbs().maxCoeff() * (1.0 + y.cwiseAbs().maxCoeff()));

  const int max_iterations = 20 * static_cast<int>(m) + 50;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<Eigen::Index> free;
    double fixed_mass = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (status[static_cast<std::size_t>(i)] == 0) free.push_back(i);
      else fixed_mass += x[i];
    }
    const auto nf = static_cast<Eigen::Index>(free.size());

    Eigen::VectorXd step = Eigen::VectorXd::Zero(m);
    if (nf > 0) {
      // Bordered KKT system of the equality-constrained subproblem.
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + 1, nf + 1);
      Eigen::VectorXd rhs(nf + 1);
      for (Eigen::Index a = 0; a < nf; ++a) {
        double fixed_term = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
          if (status[static_cast<std::size_t>(j)] != 0) fixed_term += metric(free[a], j) * x[j];
        }
        for (Eigen::Index b = 0; b < nf; ++b) kkt(a, b) = 2.0 * metric(free[a], free[b]);
        kkt(a, nf) = 1.0;
        kkt(nf, a) = 1.0;
        rhs[a] = 2.0 * (metric_y[free[a]] - fixed_term);
      }
      rhs[nf] = FeasibleSet::kSumTarget - fixed_mass;
      const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
      for (Eigen::Index a = 0; a < nf; ++a) step[free[a]] = sol[a] - x[free[a]];
    }

    if (step.cwiseAbs().maxCoeff() <= 1e-15) {
      const Eigen::VectorXd grad = 2.0 * metric * (x - y);
      const double mu = detail::sum_multiplier(grad, status);
      Eigen::Index release = -1;
      double worst = -1e-14 * scale;
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto s = status[static_cast<std::size_t>(i)];
        if (s == 0) continue;
        const double lambda = s < 0 ? grad[i] + mu : -(grad[i] + mu);
        if (lambda < worst) {
          worst = lambda;
          release = i;
        }
      }
      if (release < 0) return x;
      status[static_cast<std::size_t>(release)] = 0;
      continue;
    }

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    int blocking_side = 0;
    for (const auto i : free) {
      if (step[i] < 0.0) {
        const double a = (lo - x[i]) / step[i];
        if (a < alpha) {
          alpha = a;
          blocking = i;
          blocking_side = -1;
        }
      } else if (step[i] > 0.0) {
        const double a = (hi - x[i]) / step[i];
        if (a < alpha) {
          alpha = a;
          blocking = i;
          blocking_side = 1;
        }
      }
    }
    alpha = std::max(alpha, 0.0);
    x += alpha * step;
    if (blocking >= 0) {
      x[blocking] = blocking_side < 0 ? lo : hi;
      status[static_cast<std::size_t>(blocking)] = blocking_side;
    }
  }
  return project_pairwise(set, metric, y);
}

}  // namespace obsprivacy
