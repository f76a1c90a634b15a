#pragma once

// Online Newton Step and Online Gradient Descent over the weight polytope,
// the offline best-fixed-point solver, and regret accounting.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "obsprivacy/error.hpp"
#include "obsprivacy/feasible_set.hpp"
#include "obsprivacy/gramian.hpp"
#include "obsprivacy/graph.hpp"

namespace obsprivacy {

/// One revealed loss: the privacy cost of `intruders` over `window`.
/// An empty intruder list is the zero loss.
struct CostTerm {
  std::vector<std::size_t> intruders;
  CostWindow window;
};

struct ProblemConstants {
  double gradient_bound = 0.0;  // G
  double diameter = 0.0;        // D
};

/// Exponential draws normalized to the simplex, then projected onto the box
/// slice in the Euclidean norm.
inline Eigen::VectorXd random_feasible_point(const FeasibleSet& set, std::mt19937_64& rng) {
  const auto m = static_cast<Eigen::Index>(set.dimension());
  if (m <= 1) return set.barycenter();
  std::exponential_distribution<double> draw(1.0);
  Eigen::VectorXd x(m);
  for (Eigen::Index i = 0; i < m; ++i) x[i] = draw(rng);
  x /= x.sum();
  return project(set, Eigen::MatrixXd::Identity(m, m), x);
}

/// D from the polytope geometry; G as `safety` times the largest gradient
/// norm seen over the barycenter plus `samples - 1` random feasible points
/// and every cost term.
inline ProblemConstants estimate_constants(const NetworkGraph& graph, const FeasibleSet& set,
                                           std::span<const CostTerm> terms, int samples, double safety,
                                           std::uint64_t seed = 0,
                                           GradientMode mode = GradientMode::Exact) {
  if (graph.edge_count() == 0) throw Error(ErrorCode::EmptyEdgeSet, "no edge weights to bound");
  if (samples < 1) throw Error(ErrorCode::ValidationError, "samples must be >= 1");
  if (!(safety >= 1.0)) throw Error(ErrorCode::ValidationError, "safety factor must be >= 1");
  ProblemConstants out;
  out.diameter = set.diameter();
  std::mt19937_64 rng(seed);
  double largest = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd w = s == 0 ? set.barycenter() : random_feasible_point(set, rng);
    for (const auto& term : terms) {
      if (term.intruders.empty()) continue;
      largest = std::max(largest, cost_gradient(graph, w, term.intruders, term.window, mode).norm());
    }
  }
  // A zero gradient everywhere is bounded by any positive G.
  out.gradient_bound = largest > 0.0 ? safety * largest : 1.0;
  return out;
}

class OnlineLearnerState {
 public:
  /// beta = 1 / (8 G D), eps = 1 / (beta^2 D^2), accumulator = eps I. A
  /// singleton set (D = 0) leaves beta and eps at zero and never moves.
  static OnlineLearnerState start(const FeasibleSet& set, Eigen::VectorXd initial_point,
                                  const ProblemConstants& constants) {
    const auto m = static_cast<Eigen::Index>(set.dimension());
    if (initial_point.size() != m) throw Error(ErrorCode::DimensionMismatch, "initial point dimension");
    if (!set.contains(initial_point, 1e-10)) {
      throw Error(ErrorCode::InfeasibleSet, "initial point is not feasible");
    }
    if (!set.is_singleton() && m > 0 && !(constants.diameter > 0.0 && constants.gradient_bound > 0.0)) {
      throw Error(ErrorCode::ValidationError, "G and D must be positive");
    }
    OnlineLearnerState st(set, std::move(initial_point), constants);
    if (st.degenerate()) {
      st.accumulator_ = Eigen::MatrixXd::Identity(m, m);
    } else {
      st.beta_ = 1.0 / (8.0 * constants.gradient_bound * constants.diameter);
      st.epsilon_reg_ = 1.0 / (st.beta_ * st.beta_ * constants.diameter * constants.diameter);
      st.accumulator_ = st.epsilon_reg_ * Eigen::MatrixXd::Identity(m, m);
    }
    st.factor_.compute(st.accumulator_);
    return st;
  }

  const FeasibleSet& set() const noexcept { return set_; }
  int iteration() const noexcept { return iteration_; }
  const Eigen::VectorXd& point() const noexcept { return point_; }
  const Eigen::MatrixXd& accumulator() const noexcept { return accumulator_; }
  double gradient_bound() const noexcept { return constants_.gradient_bound; }
  double diameter() const noexcept { return constants_.diameter; }
  double beta() const noexcept { return beta_; }
  double epsilon_reg() const noexcept { return epsilon_reg_; }
  bool degenerate() const noexcept { return set_.dimension() <= 1; }

  double log_det_accumulator() const {
    return 2.0 * factor_.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

 private:
  OnlineLearnerState(const FeasibleSet& set, Eigen::VectorXd point, const ProblemConstants& c)
      : set_(set), point_(std::move(point)), constants_(c) {}

  friend OnlineLearnerState ons_step(const OnlineLearnerState&, const Eigen::VectorXd&);
  friend OnlineLearnerState ogd_step(const OnlineLearnerState&, const Eigen::VectorXd&,
                                     const std::function<double(const OnlineLearnerState&)>&);

  FeasibleSet set_;
  int iteration_ = 1;
  Eigen::VectorXd point_;
  Eigen::MatrixXd accumulator_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  ProblemConstants constants_;
  double beta_ = 0.0;
  double epsilon_reg_ = 0.0;
};

namespace detail {

inline void check_gradient(const OnlineLearnerState& state, const Eigen::VectorXd& g) {
  if (static_cast<std::size_t>(g.size()) != state.set().dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "gradient dimension differs from M");
  }
  if (!g.allFinite()) throw Error(ErrorCode::DimensionMismatch, "gradient has non-finite entries");
}

}  // namespace detail

/// w - (1/beta) metric^{-1} g, projected onto the set in the metric norm.
inline Eigen::VectorXd newton_step(const FeasibleSet& set, const Eigen::MatrixXd& metric,
                                   const Eigen::VectorXd& point, const Eigen::VectorXd& g, double beta) {
  const Eigen::VectorXd direction = metric.llt().solve(g);
  return project(set, metric, point - direction / beta);
}

/// One Online Newton Step. The accumulator absorbs g g' before it is used,
/// and its Cholesky factor is rank-one updated rather than refactored.
inline OnlineLearnerState ons_step(const OnlineLearnerState& state, const Eigen::VectorXd& g) {
  detail::check_gradient(state, g);
  OnlineLearnerState next = state;
  ++next.iteration_;
  if (state.degenerate()) return next;
  next.accumulator_.noalias() += g * g.transpose();
  next.factor_.rankUpdate(g, 1.0);
  if (next.factor_.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularAccumulator, "accumulator lost positive definiteness");
  }
  const Eigen::VectorXd direction = next.factor_.solve(g);
  next.point_ = project(state.set_, next.accumulator_, state.point_ - direction / state.beta_);
  return next;
}

/// eta_s = D / (G sqrt(s)).
inline double default_ogd_step_size(const OnlineLearnerState& state) {
  return state.diameter() / (state.gradient_bound() * std::sqrt(static_cast<double>(state.iteration())));
}

inline OnlineLearnerState ogd_step(
    const OnlineLearnerState& state, const Eigen::VectorXd& g,
    const std::function<double(const OnlineLearnerState&)>& step_size = default_ogd_step_size) {
  detail::check_gradient(state, g);
  OnlineLearnerState next = state;
  ++next.iteration_;
  if (state.degenerate()) return next;
  const auto m = static_cast<Eigen::Index>(state.set_.dimension());
  next.point_ = project(state.set_, Eigen::MatrixXd::Identity(m, m), state.point_ - step_size(state) * g);
  return next;
}

struct HindsightOptions {
  double tolerance = 1e-8;  // on the unit-step gradient-mapping norm
  int max_iterations = 5000;
};

struct HindsightResult {
  Eigen::VectorXd point;
  double value = 0.0;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;  // false means MaxIterationsExceeded; point is the best found
};

inline double total_cost(const NetworkGraph& graph, const Eigen::VectorXd& w, std::span<const CostTerm> terms) {
  const SpectralCache cache(graph, w);
  double sum = 0.0;
  for (const auto& t : terms) {
    if (!t.intruders.empty()) sum += privacy_cost(cache, t.intruders, t.window);
  }
  return sum;
}

inline Eigen::VectorXd total_gradient(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                      std::span<const CostTerm> terms) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
  for (const auto& t : terms) {
    if (!t.intruders.empty()) g += exact_gradient(graph, w, t.intruders, t.window);
  }
  return g;
}

/// Best fixed weights for the summed cost sequence: projected gradient
/// descent from the barycenter with Barzilai-Borwein trial steps and
/// backtracking on the projection arc.
inline HindsightResult hindsight_optimum(const NetworkGraph& graph, const FeasibleSet& set,
                                         std::span<const CostTerm> terms, const HindsightOptions& options = {}) {
  if (terms.empty()) throw Error(ErrorCode::ValidationError, "cost sequence is empty");
  const auto m = static_cast<Eigen::Index>(set.dimension());
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(m, m);
  HindsightResult out;
  Eigen::VectorXd x = set.barycenter();
  double fx = total_cost(graph, x, terms);
  if (m <= 1) {
    out.point = x;
    out.value = fx;
    out.converged = true;
    return out;
  }
  Eigen::VectorXd g = total_gradient(graph, x, terms);
  double step = g.norm() > 0.0 ? 0.1 / g.norm() : 1.0;

  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it;
    const Eigen::VectorXd mapped = project(set, identity, x - g);
    out.projected_gradient_norm = (x - mapped).norm();
    if (out.projected_gradient_norm <= options.tolerance) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = project(set, identity, x - step * g);
      const Eigen::VectorXd s = x_new - x;
      f_new = total_cost(graph, x_new, terms);
      if (f_new <= fx + g.dot(s) + s.squaredNorm() / (2.0 * step) + 1e-15 * std::abs(fx)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd g_new = total_gradient(graph, x_new, terms);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * step;
    step = std::clamp(step, 1e-12, 1e12);
    x = x_new;
    fx = f_new;
    g = g_new;
  }
  out.point = x;
  out.value = fx;
  return out;
}

struct RegretLedger {
  std::vector<double> per_step_costs;             // f_t(w_t)
  std::vector<double> per_step_hindsight_costs;   // f_t(w*) for the full-horizon w*
  std::vector<double> prefix_hindsight_minima;    // min_w sum_{t<=T} f_t(w), optional
  std::optional<double> hindsight_cost;           // sum_t f_t(w*)
};

enum class RegretBaseline { FullHorizon, Prefix };

struct RegretPoint {
  int horizon;
  double regret;
};

inline std::vector<RegretPoint> regret_curve(const RegretLedger& ledger,
                                             RegretBaseline baseline = RegretBaseline::FullHorizon) {
  const auto n = ledger.per_step_costs.size();
  std::vector<RegretPoint> curve;
  curve.reserve(n);
  double cumulative = 0.0;
  if (baseline == RegretBaseline::FullHorizon) {
    if (ledger.per_step_hindsight_costs.size() != n) {
      throw Error(ErrorCode::MissingHindsight, "per-step hindsight costs missing");
    }
    double baseline_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      cumulative += ledger.per_step_costs[t];
      baseline_sum += ledger.per_step_hindsight_costs[t];
      curve.push_back({static_cast<int>(t + 1), cumulative - baseline_sum});
    }
  } else {
    if (ledger.prefix_hindsight_minima.size() != n) {
      throw Error(ErrorCode::MissingHindsight, "prefix hindsight minima missing");
    }
    for (std::size_t t = 0; t < n; ++t) {
      cumulative += ledger.per_step_costs[t];
      curve.push_back({static_cast<int>(t + 1), cumulative - ledger.prefix_hindsight_minima[t]});
    }
  }
  return curve;
}

struct LogFit {
  double coefficient;         // c in R_T ~ c log T
  double r_squared;           // 1 - SS_res / sum R_T^2 (no-intercept convention)
  double r_squared_centered;  // 1 - SS_res / sum (R_T - mean)^2
};

/// Least squares through the origin of R_T against log T.
inline LogFit fit_log_regret(std::span<const RegretPoint> curve) {
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double mean = 0.0;
  for (const auto& p : curve) {
    const double x = std::log(static_cast<double>(p.horizon));
    sxy += x * p.regret;
    sxx += x * x;
    syy += p.regret * p.regret;
    mean += p.regret;
  }
  if (curve.empty() || sxx == 0.0) return {0.0, 0.0, 0.0};
  mean /= static_cast<double>(curve.size());
  const double c = sxy / sxx;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (const auto& p : curve) {
    const double r = p.regret - c * std::log(static_cast<double>(p.horizon));
    ss_res += r * r;
    ss_tot += (p.regret - mean) * (p.regret - mean);
  }
  auto ratio = [&](double total) { return total > 0.0 ? 1.0 - ss_res / total : (ss_res == 0.0 ? 1.0 : 0.0); };
  return {c, ratio(syy), ratio(ss_tot)};
}

}  // namespace obsprivacy
