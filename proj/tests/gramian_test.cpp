#include "obsprivacy/gramian.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "obsprivacy/oracle.hpp"
#include "obsprivacy/quadrature.hpp"
#include "test_support.hpp"

namespace obsprivacy {
namespace {

using testing::one_node_graph;
using testing::path3_graph;
using testing::two_node_graph;

const std::vector<std::size_t> kNode0{0};
const std::vector<std::size_t> kNode1{1};

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

// Closed form for the two-node graph: eigenvalues {-1, -1 - 2w} with
// eigenvectors (1, 1)/sqrt 2 and (1, -1)/sqrt 2.
double two_node_phi(double w, double tau) { return 0.5 * (std::exp(-2.0 * tau) + std::exp(-2.0 * (1.0 + 2.0 * w) * tau)); }

TEST(GaussLegendre, NodesAndExactness) {
  const GaussLegendre two(2);
  EXPECT_NEAR(two.nodes()[0], -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(two.nodes()[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(two.weights()[0], 1.0, 1e-15);

  // Order n integrates degree 2n - 1 exactly.
  for (int n : {3, 8, 16}) {
    const GaussLegendre rule(n);
    const int degree = 2 * n - 1;
    const double exact = (std::pow(2.0, degree + 1) - std::pow(-1.0, degree + 1)) / (degree + 1);
    EXPECT_NEAR(rule.integrate([&](double x) { return std::pow(x, degree); }, -1.0, 2.0), exact, 1e-10 * std::abs(exact));
    double sum = 0.0;
    for (double w : rule.weights()) sum += w;
    EXPECT_NEAR(sum, 2.0, 1e-14);
  }
}

TEST(SpectralCache, ReconstructsSystemMatrix) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_graph(rng, 10, 20);
    const Eigen::VectorXd w = testing::random_weights(g, rng);
    const SpectralCache cache(g, w);
    const auto& u = cache.eigenvectors();
    const auto n = u.rows();
    EXPECT_LT((u * u.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((u * cache.eigenvalues().asDiagonal() * u.transpose() - assemble_system_matrix(g, w)).cwiseAbs().maxCoeff(),
              1e-10);
    EXPECT_LE(cache.eigenvalues().maxCoeff(), -1.0 + 1e-10);
  }
}

TEST(DiagEntry, Examples) {
  const auto g1 = one_node_graph();
  const SpectralCache c1(g1, Eigen::VectorXd());
  EXPECT_NEAR(matrix_exponential_diag_entry(c1, 0, 0.5), std::exp(-1.0), 1e-15);

  const auto g2 = two_node_graph();
  const SpectralCache c2(g2, scalar(0.5));
  EXPECT_NEAR(matrix_exponential_diag_entry(c2, 0, 0.5), 0.2516073622040275, 1e-15);
  EXPECT_EQ(matrix_exponential_diag_entry(c2, 1, 0.0), 1.0);

  EXPECT_THROW(matrix_exponential_diag_entry(c2, 2, 0.5), Error);
  EXPECT_THROW(matrix_exponential_diag_entry(c2, 0, -0.1), Error);
}

TEST(DiagEntry, BoundedByScalarDecay) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> tau_dist(0.01, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testing::random_graph(rng, 9, 18);
    const SpectralCache cache(g, testing::random_weights(g, rng));
    const double tau = tau_dist(rng);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      const double phi = matrix_exponential_diag_entry(cache, k, tau);
      EXPECT_GT(phi, 0.0);
      EXPECT_LE(phi, std::exp(-2.0 * tau) * (1.0 + 1e-12));
    }
  }
}

TEST(PrivacyCost, ClosedFormExamples) {
  const auto g1 = one_node_graph();
  EXPECT_NEAR(privacy_cost(g1, Eigen::VectorXd(), kNode0, {0.0, 1.0, 16}), 0.43233235838169365, 1e-10);

  const auto g2 = two_node_graph();
  // int_0^inf phi = 1/4 + 1/(4 (1 + 2w)) = 0.375 at w = 0.5; the tail beyond 20 is ~e^-40.
  EXPECT_NEAR(privacy_cost(g2, scalar(0.5), kNode0, {0.0, 20.0, 16}), 0.375, 1e-6);

  const std::vector<std::size_t> both{0, 1};
  const CostWindow window{0.5, 0.5, 16};
  EXPECT_NEAR(privacy_cost(g2, scalar(0.3), both, window), 2.0 * privacy_cost(g2, scalar(0.3), kNode0, window), 1e-15);
}

TEST(PrivacyCost, WindowValidation) {
  const auto g2 = two_node_graph();
  EXPECT_THROW(privacy_cost(g2, scalar(0.5), kNode0, {-1.0, 0.5, 16}), Error);
  EXPECT_THROW(privacy_cost(g2, scalar(0.5), kNode0, {0.0, 0.0, 16}), Error);
  EXPECT_THROW(privacy_cost(g2, scalar(0.5), kNode0, {0.0, 0.5, 1}), Error);
  const std::vector<std::size_t> bad{4};
  EXPECT_THROW(privacy_cost(g2, scalar(0.5), bad, {0.0, 0.5, 16}), Error);
}

TEST(PrivacyCost, DecreasesWithStartTimeAndConvergesInOrder) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_graph(rng, 8, 14);
    const Eigen::VectorXd w = testing::random_weights(g, rng);
    const std::vector<std::size_t> k{static_cast<std::size_t>(trial) % g.node_count()};
    double previous = std::numeric_limits<double>::infinity();
    for (double t = 0.0; t < 5.0; t += 0.5) {
      const double c = privacy_cost(g, w, k, {t, 0.5, 16});
      EXPECT_GT(c, 0.0);
      EXPECT_LT(c, previous);
      previous = c;
      const double fine = privacy_cost(g, w, k, {t, 0.5, 32});
      EXPECT_NEAR(c, fine, 1e-9 * fine);
    }
  }
}

TEST(PrivacyCost, TwoNodeCostDecreasesInWeight) {
  const auto g2 = two_node_graph();
  double previous = std::numeric_limits<double>::infinity();
  for (double w = 0.01; w <= 0.99 + 1e-12; w += 0.02) {
    const double c = privacy_cost(g2, scalar(w), kNode0, {0.5, 0.5, 16});
    EXPECT_LT(c, previous);
    previous = c;
  }
}

TEST(ClosedFormGradient, Examples) {
  const auto g2 = two_node_graph();
  const SpectralCache c2(g2, scalar(0.5));
  // Analytic d/dw of two_node_phi at tau = 0.5: -2 tau e^{-2(1+2w) tau} = -e^{-2}.
  const Eigen::VectorXd pointwise = phi_gradient_closed_form(g2, c2, 0, 0.5);
  EXPECT_NEAR(pointwise[0], -std::exp(-2.0), 1e-15);
  EXPECT_EQ(phi_gradient_closed_form(g2, c2, 0, 0.0)[0], 0.0);
  EXPECT_NEAR(phi_gradient_closed_form(g2, c2, 0, 1e-9)[0], 0.0, 1e-8);

  const auto g1 = one_node_graph();
  const SpectralCache c1(g1, Eigen::VectorXd());
  EXPECT_EQ(closed_form_gradient(g1, c1, kNode0, {0.0, 0.5, 16}).size(), 0);

  EXPECT_THROW(closed_form_gradient(g2, c2, scalar(0.4), kNode0, {0.0, 0.5, 16}), Error);
  try {
    closed_form_gradient(g2, c2, scalar(0.4), kNode0, {0.0, 0.5, 16});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StaleCache);
  }
}

TEST(FrechetExp, ScalarAndCommutingCases) {
  Eigen::MatrixXd x(1, 1), e(1, 1);
  x << -0.7;
  e << 2.0;
  EXPECT_NEAR(frechet_exp(x, e)(0, 0), 2.0 * std::exp(-0.7), 1e-14);

  // Commuting direction: L(X, X) = X e^X.
  Eigen::Matrix3d s;
  s << -2, 0.5, 0.1, 0.5, -1.5, 0.2, 0.1, 0.2, -1.0;
  const Eigen::MatrixXd expected = s * Eigen::MatrixXd(s.exp());
  EXPECT_LT((frechet_exp(s, s) - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(ExactGradient, MatchesFiniteDifferences) {
  const auto g2 = two_node_graph();
  const CostWindow unit{0.0, 1.0, 16};
  const Eigen::VectorXd e2 = exact_gradient(g2, scalar(0.5), kNode0, unit);
  const Eigen::VectorXd f2 = finite_difference_gradient(g2, scalar(0.5), kNode0, unit);
  EXPECT_LE(std::abs(e2[0] - f2[0]) / std::abs(f2[0]), 1e-7);

  const auto p3 = path3_graph();
  const Eigen::Vector2d w3(0.4, 0.6);
  const Eigen::VectorXd e3 = exact_gradient(p3, w3, kNode1, unit);
  const Eigen::VectorXd f3 = finite_difference_gradient(p3, w3, kNode1, unit);
  EXPECT_LE(max_relative_error(e3, f3), 1e-6);
}

TEST(ExactGradient, EqualsClosedFormWhenDirectionsCommute) {
  const auto g2 = two_node_graph();
  for (double w : {0.01, 0.3, 0.5, 0.99}) {
    for (std::size_t k : {0u, 1u}) {
      const std::vector<std::size_t> nodes{k};
      const CostWindow window{0.5, 0.5, 16};
      const Eigen::VectorXd exact = exact_gradient(g2, scalar(w), nodes, window);
      const Eigen::VectorXd closed = closed_form_gradient(g2, SpectralCache(g2, scalar(w)), nodes, window);
      EXPECT_NEAR(exact[0], closed[0], 1e-9);
    }
  }
}

TEST(ExactGradient, AdjointFormMatchesPerEdgeBlocks) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> tau_dist(0.05, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_graph(rng, 7, 12);
    const Eigen::VectorXd w = testing::random_weights(g, rng);
    const std::vector<std::size_t> nodes{0, g.node_count() - 1};
    const double tau = tau_dist(rng);
    const Eigen::VectorXd adjoint = phi_gradient_exact(g, w, nodes, tau);
    const Eigen::VectorXd per_edge = phi_gradient_exact_per_edge(g, w, nodes, tau);
    EXPECT_LT((adjoint - per_edge).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(ExactGradient, RandomGraphsAgainstFiniteDifferences) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> start(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testing::random_graph(rng, 10, 20);
    const Eigen::VectorXd w = testing::random_weights(g, rng);
    const std::vector<std::size_t> nodes{static_cast<std::size_t>(trial) % g.node_count()};
    const CostWindow window{start(rng), 0.5, 16};
    EXPECT_LE(max_relative_error(exact_gradient(g, w, nodes, window), finite_difference_gradient(g, w, nodes, window)),
              1e-6);
  }
}

TEST(EmpiricalGramian, Examples) {
  const auto g1 = one_node_graph();
  EXPECT_NEAR(empirical_gramian_trace(g1, Eigen::VectorXd(), kNode0, 0.01, 10.0, 1e-3), 0.5 * (1.0 - std::exp(-20.0)),
              1e-4);

  const auto g2 = two_node_graph();
  EXPECT_NEAR(empirical_gramian_trace(g2, scalar(0.5), kNode0, 0.01, 20.0, 1e-3), 0.375, 1e-4);
}

TEST(EmpiricalGramian, IndependentOfPerturbationSize) {
  const auto p3 = path3_graph();
  const Eigen::Vector2d w(0.4, 0.6);
  const double a = empirical_gramian_trace(p3, w, kNode1, 1e-1, 5.0, 1e-3);
  for (double eps : {1e-2, 1e-3}) {
    const double b = empirical_gramian_trace(p3, w, kNode1, eps, 5.0, 1e-3);
    EXPECT_LT(std::abs(a - b) / a, 1e-8);
  }
}

TEST(EmpiricalGramian, RejectsBadArguments) {
  const auto g2 = two_node_graph();
  auto code = [&](double eps, double tf, double step) {
    try {
      empirical_gramian_trace(g2, scalar(0.5), kNode0, eps, tf, step);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code(0.0, 1.0, 1e-3), ErrorCode::NonPositivePerturbation);
  EXPECT_EQ(code(0.1, -1.0, 1e-3), ErrorCode::NonPositiveHorizon);
  EXPECT_EQ(code(0.1, 1.0, 0.0), ErrorCode::NonPositiveStep);
}

TEST(ExponentialInequality, Examples) {
  const auto zero = check_exponential_inequality(Eigen::MatrixXd::Zero(4, 4));
  EXPECT_TRUE(zero.holds);
  EXPECT_EQ(zero.min_eigenvalue, 0.0);

  Eigen::Matrix2d d;
  d << 1, 0, 0, -1;
  const auto diag = check_exponential_inequality(d);
  EXPECT_TRUE(diag.holds);
  EXPECT_NEAR(diag.min_eigenvalue, std::min(std::exp(1.0) - 2.0, std::exp(-1.0)), 1e-14);

  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    EXPECT_TRUE(check_exponential_inequality(testing::random_symmetric(rng, 5, 3.0)).holds);
  }

  Eigen::Matrix2d asym;
  asym << 0, 1, 0, 0;
  EXPECT_THROW(check_exponential_inequality(asym), Error);
}

TEST(DiagConvexity, Examples) {
  const auto p3 = path3_graph();
  const Eigen::Vector2d w(0.3, 0.7);
  const auto same = check_diag_convexity(p3, 0, 1.0, w, w);
  EXPECT_TRUE(same.holds);
  EXPECT_NEAR(same.midpoint_value, same.chord_value, 1e-15);

  const auto g2 = two_node_graph();
  const auto r = check_diag_convexity(g2, 0, 1.0, scalar(0.2), scalar(0.8));
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.midpoint_value, two_node_phi(0.5, 1.0), 1e-14);
  EXPECT_NEAR(r.chord_value, 0.5 * (two_node_phi(0.2, 1.0) + two_node_phi(0.8, 1.0)), 1e-14);
  EXPECT_LT(r.midpoint_value, r.chord_value);
}

}  // namespace
}  // namespace obsprivacy
