#pragma once

// Observability-Gramian privacy cost of the network seen from measured
// nodes, its gradients, and the oracles used to cross-check them.
//
// For symmetric A the output energy of state perturbations measured at node
// k over a window is  f = int_t^{t+delta} [e^{2 A tau}]_{kk} dtau,  and the
// cost for several measured nodes is the sum of the single-node costs.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "obsprivacy/error.hpp"
#include "obsprivacy/graph.hpp"
#include "obsprivacy/quadrature.hpp"

namespace obsprivacy {

/// Eigendecomposition A(w) = U diag(lambda) U' evaluated once per weight
/// vector; every e^{2 A tau} needed by a quadrature window comes from it.
class SpectralCache {
 public:
  SpectralCache(const NetworkGraph& graph, const Eigen::VectorXd& weights) : weights_(weights) {
    const Eigen::MatrixXd a = assemble_system_matrix(graph, weights);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    eigenvalues_ = eig.eigenvalues();
    eigenvectors_ = eig.eigenvectors();
  }

  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
  const Eigen::VectorXd& source_weights() const noexcept { return weights_; }
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }

  bool built_from(const Eigen::VectorXd& weights) const {
    return weights.size() == weights_.size() && weights == weights_;
  }

  /// Column k of e^{2 A tau}.
  Eigen::VectorXd exp_column(std::size_t k, double tau) const {
    check_node(k);
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::VectorXd decay = (2.0 * tau * eigenvalues_.array()).exp().matrix();
    return eigenvectors_ * decay.cwiseProduct(eigenvectors_.row(kk).transpose());
  }

  /// e^{scale * A}.
  Eigen::MatrixXd exp_matrix(double scale) const {
    const Eigen::VectorXd decay = (scale * eigenvalues_.array()).exp().matrix();
    return eigenvectors_ * decay.asDiagonal() * eigenvectors_.transpose();
  }

  void check_node(std::size_t k) const {
    if (k >= node_count()) {
      throw Error(ErrorCode::IndexOutOfRange, "node " + std::to_string(k) + " outside N=" +
                                                  std::to_string(node_count()));
    }
  }

 private:
  Eigen::VectorXd weights_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// Integration window [t_start, t_start + delta] and its Gauss-Legendre
/// order. Windows longer than one time unit are split into unit panels.
struct CostWindow {
  double t_start = 0.0;
  double delta = 0.5;
  int quadrature_order = 16;

  static constexpr double kMaxPanel = 1.0;

  double t_end() const noexcept { return t_start + delta; }

  void validate() const {
    if (t_start < 0.0) throw Error(ErrorCode::NegativeTime, "window starts before t=0");
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidWindow, "window length must be positive");
    if (quadrature_order < 2) throw Error(ErrorCode::InvalidWindow, "quadrature order must be >= 2");
  }
};

inline void check_time(double tau) {
  if (tau < 0.0) throw Error(ErrorCode::NegativeTime, "tau must be nonnegative");
}

/// phi(w, tau) = [e^{2 A(w) tau}]_{kk} = sum_i U_ki^2 e^{2 lambda_i tau}.
inline double matrix_exponential_diag_entry(const SpectralCache& cache, std::size_t k, double tau) {
  cache.check_node(k);
  check_time(tau);
  if (tau == 0.0) return 1.0;
  const auto kk = static_cast<Eigen::Index>(k);
  const Eigen::ArrayXd u2 = cache.eigenvectors().row(kk).transpose().array().square();
  return (u2 * (2.0 * tau * cache.eigenvalues().array()).exp()).sum();
}

namespace detail {

inline void check_nodes(const SpectralCache& cache, std::span<const std::size_t> nodes) {
  for (const auto k : nodes) cache.check_node(k);
}

}  // namespace detail

inline double privacy_cost(const SpectralCache& cache, std::span<const std::size_t> intruders,
                           const CostWindow& window) {
  window.validate();
  detail::check_nodes(cache, intruders);
  const GaussLegendre rule(window.quadrature_order);
  double total = 0.0;
  for (const auto k : intruders) {
    total += rule.integrate([&](double tau) { return matrix_exponential_diag_entry(cache, k, tau); },
                            window.t_start, window.t_end(), CostWindow::kMaxPanel);
  }
  return total;
}

inline double privacy_cost(const NetworkGraph& graph, const Eigen::VectorXd& w,
                           std::span<const std::size_t> intruders, const CostWindow& window) {
  return privacy_cost(SpectralCache(graph, w), intruders, window);
}

inline double privacy_cost(const NetworkGraph& graph, const Eigen::VectorXd& w,
                           const IntruderSet& intruders, const CostWindow& window) {
  return privacy_cost(graph, w, std::span<const std::size_t>(intruders.nodes()), window);
}

/// Pointwise closed-form gradient -2 tau diag(E' e^{2 A tau} e_k e_k' E).
/// Only edges incident to k contribute since e_k' e_ij vanishes otherwise.
inline Eigen::VectorXd phi_gradient_closed_form(const NetworkGraph& graph, const SpectralCache& cache,
                                                std::size_t k, double tau) {
  check_time(tau);
  const Eigen::VectorXd col = cache.exp_column(k, tau);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.edge_count()));
  for (std::size_t l = 0; l < graph.edge_count(); ++l) {
    const auto& e = graph.edges()[l];
    const double ek = (e.first == k ? 1.0 : 0.0) - (e.second == k ? 1.0 : 0.0);
    if (ek == 0.0) continue;
    const auto i = static_cast<Eigen::Index>(e.first);
    const auto j = static_cast<Eigen::Index>(e.second);
    grad[static_cast<Eigen::Index>(l)] = -2.0 * tau * (col[i] - col[j]) * ek;
  }
  return grad;
}

/// Window-integrated closed-form gradient. This formula is the exact
/// derivative only when A(w) commutes with every A_l.
inline Eigen::VectorXd closed_form_gradient(const NetworkGraph& graph, const SpectralCache& cache,
                                      std::span<const std::size_t> intruders, const CostWindow& window) {
  window.validate();
  detail::check_nodes(cache, intruders);
  if (static_cast<std::size_t>(cache.source_weights().size()) != graph.edge_count()) {
    throw Error(ErrorCode::StaleCache, "cache was built for a different graph");
  }
  const GaussLegendre rule(window.quadrature_order);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.edge_count()));
  rule.for_each_node(window.t_start, window.t_end(), CostWindow::kMaxPanel, [&](double tau, double wq) {
    for (const auto k : intruders) grad += wq * phi_gradient_closed_form(graph, cache, k, tau);
  });
  return grad;
}

/// Same as above, rejecting a cache that was not built from `w`.
inline Eigen::VectorXd closed_form_gradient(const NetworkGraph& graph, const SpectralCache& cache,
                                      const Eigen::VectorXd& w, std::span<const std::size_t> intruders,
                                      const CostWindow& window) {
  if (!cache.built_from(w)) throw Error(ErrorCode::StaleCache, "cache weights differ from w");
  return closed_form_gradient(graph, cache, intruders, window);
}

/// Frechet derivative of the matrix exponential, L(X, E) = d/dh e^{X + hE}
/// at h = 0, read off the top-right block of exp([[X, E], [0, X]]).
inline Eigen::MatrixXd frechet_exp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& direction) {
  const auto n = x.rows();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = x;
  block.topRightCorner(n, n) = direction;
  block.bottomRightCorner(n, n) = x;
  const Eigen::MatrixXd expd = block.exp();
  return expd.topRightCorner(n, n);
}

/// Pointwise exact gradient of sum_k [e^{2 A tau}]_{kk}, one block
/// exponential per edge direction 2 tau A_l.
inline Eigen::VectorXd phi_gradient_exact_per_edge(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                                   std::span<const std::size_t> intruders, double tau) {
  check_time(tau);
  const Eigen::MatrixXd x = 2.0 * tau * assemble_system_matrix(graph, w);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.edge_count()));
  for (std::size_t l = 0; l < graph.edge_count(); ++l) {
    const Eigen::MatrixXd d = frechet_exp(x, 2.0 * tau * edge_direction(graph, l));
    double s = 0.0;
    for (const auto k : intruders) s += d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    grad[static_cast<Eigen::Index>(l)] = s;
  }
  return grad;
}

/// Pointwise exact gradient via the adjoint identity
/// <P, L(X, E)> = <L(X', P), E>: with P = sum_k e_k e_k' a single block
/// exponential G = L(X, P) serves every edge, and
/// d/dw_l = 2 tau <G, A_l> = -2 tau (G_ii + G_jj - 2 G_ij).
inline Eigen::VectorXd phi_gradient_exact(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                          std::span<const std::size_t> intruders, double tau) {
  check_time(tau);
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.edge_count()));
  if (intruders.empty() || graph.edge_count() == 0) return grad;
  const Eigen::MatrixXd x = 2.0 * tau * assemble_system_matrix(graph, w);
  Eigen::MatrixXd selector = Eigen::MatrixXd::Zero(n, n);
  for (const auto k : intruders) {
    if (k >= graph.node_count()) throw Error(ErrorCode::IndexOutOfRange, "intruder node out of range");
    selector(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += 1.0;
  }
  const Eigen::MatrixXd g = frechet_exp(x, selector);
  for (std::size_t l = 0; l < graph.edge_count(); ++l) {
    const auto i = static_cast<Eigen::Index>(graph.edges()[l].first);
    const auto j = static_cast<Eigen::Index>(graph.edges()[l].second);
    grad[static_cast<Eigen::Index>(l)] = -2.0 * tau * (g(i, i) + g(j, j) - g(i, j) - g(j, i));
  }
  return grad;
}

inline Eigen::VectorXd exact_gradient(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                      std::span<const std::size_t> intruders, const CostWindow& window) {
  window.validate();
  check_weight_dimension(graph, w);
  const GaussLegendre rule(window.quadrature_order);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.edge_count()));
  rule.for_each_node(window.t_start, window.t_end(), CostWindow::kMaxPanel, [&](double tau, double wq) {
    grad += wq * phi_gradient_exact(graph, w, intruders, tau);
  });
  return grad;
}

inline Eigen::VectorXd exact_gradient(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                      const IntruderSet& intruders, const CostWindow& window) {
  return exact_gradient(graph, w, std::span<const std::size_t>(intruders.nodes()), window);
}

enum class GradientMode { Exact, ClosedForm };

inline Eigen::VectorXd cost_gradient(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                     std::span<const std::size_t> intruders, const CostWindow& window,
                                     GradientMode mode) {
  if (mode == GradientMode::ClosedForm) return closed_form_gradient(graph, SpectralCache(graph, w), intruders, window);
  return exact_gradient(graph, w, intruders, window);
}

/// Empirical observability Gramian trace: 2N perturbed trajectories of
/// x' = A(w) x from +-eps e_i (fixed-step RK4), with the output energy
/// (1 / 4 eps^2) int sum_i ||y+i - y-i||^2 accumulated by the trapezoidal rule.
inline double empirical_gramian_trace(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                      std::span<const std::size_t> intruders, double eps, double t_final,
                                      double step) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositivePerturbation, "perturbation must be positive");
  if (!(t_final > 0.0)) throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
  if (!(step > 0.0)) throw Error(ErrorCode::NonPositiveStep, "integration step must be positive");
  for (const auto k : intruders) {
    if (k >= graph.node_count()) throw Error(ErrorCode::IndexOutOfRange, "intruder node out of range");
  }
  const Eigen::MatrixXd a = assemble_system_matrix(graph, w);
  const auto n = a.rows();
  const auto steps = static_cast<long>(std::max(1.0, std::round(t_final / step)));
  const double h = t_final / static_cast<double>(steps);

  auto rk4 = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd k1 = a * x;
    const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = a * (x + h * k3);
    return Eigen::VectorXd(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  auto output_energy = [&](const Eigen::VectorXd& plus, const Eigen::VectorXd& minus) {
    double s = 0.0;
    for (const auto k : intruders) {
      const auto kk = static_cast<Eigen::Index>(k);
      const double d = plus[kk] - minus[kk];
      s += d * d;
    }
    return s;
  };

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd plus = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd minus = Eigen::VectorXd::Zero(n);
    plus[i] = eps;
    minus[i] = -eps;
    double previous = output_energy(plus, minus);
    double integral = 0.0;
    for (long s = 0; s < steps; ++s) {
      plus = rk4(plus);
      minus = rk4(minus);
      const double current = output_energy(plus, minus);
      integral += 0.5 * h * (previous + current);
      previous = current;
    }
    total += integral;
  }
  return total / (4.0 * eps * eps);
}

struct InequalityReport {
  bool holds;
  double min_eigenvalue;
};

/// e^Z >= I + Z in the Loewner order, with e^Z from Pade scaling and
/// squaring so the check does not reuse the spectral route.
inline InequalityReport check_exponential_inequality(const Eigen::MatrixXd& z) {
  check_symmetric(z, "Z");
  const auto n = z.rows();
  if (n == 0) return {true, 0.0};
  Eigen::MatrixXd gap = Eigen::MatrixXd(z.exp()) - Eigen::MatrixXd::Identity(n, n) - z;
  gap = 0.5 * (gap + gap.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gap, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return {lmin >= -1e-10, lmin};
}

struct ConvexityReport {
  bool holds;
  double midpoint_value;
  double chord_value;
};

/// Midpoint convexity of w -> [e^{2 A(w) tau}]_{kk} between two points.
inline ConvexityReport check_diag_convexity(const NetworkGraph& graph, std::size_t k, double tau,
                                            const Eigen::VectorXd& w_a, const Eigen::VectorXd& w_b) {
  check_weight_dimension(graph, w_a);
  check_weight_dimension(graph, w_b);
  const double fa = matrix_exponential_diag_entry(SpectralCache(graph, w_a), k, tau);
  const double fb = matrix_exponential_diag_entry(SpectralCache(graph, w_b), k, tau);
  const double fm = matrix_exponential_diag_entry(SpectralCache(graph, 0.5 * (w_a + w_b)), k, tau);
  const double chord = 0.5 * fa + 0.5 * fb;
  return {fm <= chord + 1e-10, fm, chord};
}

}  // namespace obsprivacy
