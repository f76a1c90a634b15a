// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "obsprivacy/obsprivacy.hpp"
#include "../test_support.hpp"

#ifndef OBSPRIVACY_SCENARIO_DIR
#define OBSPRIVACY_SCENARIO_DIR "scenarios"
#endif

namespace obsprivacy {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

fs::path scenario_path(const std::string& name) { return fs::path(OBSPRIVACY_SCENARIO_DIR) / name; }

std::vector<std::size_t> random_nodes(std::mt19937_64& rng, std::size_t n, std::size_t max_count) {
  std::uniform_int_distribution<std::size_t> count(1, std::min(n, max_count));
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(count(rng));
  std::sort(all.begin(), all.end());
  return all;
}

// --- criteria ---------------------------------------------------------------

Outcome gradient_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> start(0.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testing::random_graph(rng, 10, 20);
    const Eigen::VectorXd w = testing::random_weights(g, rng);
    const auto nodes = random_nodes(rng, g.node_count(), 3);
    const CostWindow window{start(rng), 0.5, 16};
    const double err = max_relative_error(exact_gradient(g, w, nodes, window),
                                          finite_difference_gradient(g, w, nodes, window, 1e-5));
    worst = std::max(worst, err);
  }
  return {worst <= 1e-6, "50 graphs, max relative error " + num(worst) + " (limit 1e-6)"};
}

// d/dw int_a^b 0.5 (e^{-2 tau} + e^{-c tau}) dtau with c = 2 (1 + 2 w).
double two_node_cost_derivative(double w, double a, double b) {
  const double c = 2.0 * (1.0 + 2.0 * w);
  auto antiderivative = [&](double t) { return std::exp(-c * t) * (t / c + 1.0 / (c * c)); };
  return 2.0 * (antiderivative(b) - antiderivative(a));
}

Outcome closed_form_commuting() {
  const auto g2 = testing::two_node_graph();
  double worst = 0.0;
  for (double w : {0.01, 0.1, 0.25, 0.5, 0.75, 0.99, 1.0}) {
    const Eigen::VectorXd wv = Eigen::VectorXd::Constant(1, w);
    const SpectralCache cache(g2, wv);
    for (std::size_t k : {0u, 1u}) {
      const std::vector<std::size_t> nodes{k};
      for (double t0 : {0.0, 0.5, 1.5, 4.0}) {
        const CostWindow window{t0, 0.5, 16};
        const double exact = exact_gradient(g2, wv, nodes, window)[0];
        const double closed = closed_form_gradient(g2, cache, nodes, window)[0];
        const double analytic = two_node_cost_derivative(w, t0, t0 + 0.5);
        worst = std::max({worst, std::abs(exact - closed), std::abs(closed - analytic)});
      }
    }
  }
  // Divergence on graphs whose edge directions do not commute; reported only.
  std::mt19937_64 rng(102);
  double divergence = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_graph(rng, 8, 14, 3);
    const Eigen::VectorXd w = testing::random_weights(g, rng);
    const auto nodes = random_nodes(rng, g.node_count(), 2);
    const CostWindow window{0.5, 0.5, 16};
    divergence = std::max(divergence, max_relative_error(closed_form_gradient(g, SpectralCache(g, w), nodes, window),
                                                         exact_gradient(g, w, nodes, window)));
  }
  return {worst <= 1e-9, "single-edge max |closed - exact|, |closed - analytic| = " + num(worst) +
                             " (limit 1e-9); non-commuting max relative divergence " + num(divergence)};
}

Outcome gramian_equivalence() {
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testing::random_graph(rng, 6, 10);
    const Eigen::VectorXd w = testing::random_weights(g, rng);
    const auto nodes = random_nodes(rng, g.node_count(), 2);
    const double cost = privacy_cost(g, w, nodes, {0.0, 20.0, 16});
    const double empirical = empirical_gramian_trace(g, w, nodes, 0.01, 20.0, 1e-3);
    worst = std::max(worst, std::abs(empirical - cost) / cost);
  }
  const auto g2 = testing::two_node_graph();
  const double two = empirical_gramian_trace(g2, Eigen::VectorXd::Constant(1, 0.5), std::vector<std::size_t>{0}, 0.01, 20.0, 1e-3);
  const double two_err = std::abs(two - 0.375) / 0.375;
  return {worst <= 1e-4 && two_err <= 1e-4,
          "10 graphs max relative error " + num(worst) + "; 2-node value " + num(two) + " vs 0.375 (rel " +
              num(two_err) + ", limit 1e-4)"};
}

Outcome exponential_inequality() {
  std::mt19937_64 rng(104);
  std::uniform_int_distribution<int> size(1, 8);
  double lowest = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto report = check_exponential_inequality(testing::random_symmetric(rng, size(rng), 1.0));
    lowest = std::min(lowest, report.min_eigenvalue);
    if (report.min_eigenvalue < -1e-10) ++failures;
  }
  return {failures == 0, "1000 matrices, min eigenvalue of e^Z - I - Z = " + num(lowest) + " (limit -1e-10)"};
}

Outcome convexity() {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> tau_dist(0.01, 3.0);
  int failures = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  std::string witness;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = testing::random_graph(rng, 8, 16);
    const Eigen::VectorXd wa = testing::random_weights(g, rng);
    const Eigen::VectorXd wb = testing::random_weights(g, rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, g.node_count() - 1)(rng);
    const double tau = tau_dist(rng);
    const auto r = check_diag_convexity(g, k, tau, wa, wb);
    const double gap = r.midpoint_value - r.chord_value;
    if (gap > worst_gap) worst_gap = gap;
    if (!r.holds) {
      ++failures;
      if (witness.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << "; first witness: N=" << g.node_count() << " M=" << g.edge_count() << " k=" << k + 1 << " tau=" << tau
           << " gap=" << gap;
        witness = os.str();
      }
    }
  }
  return {failures == 0, "1000 samples, " + std::to_string(failures) + " violations, max midpoint - chord " +
                             num(worst_gap) + " (limit 1e-10)" + witness};
}

Outcome projection() {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  const double h = 1e-4;
  double worst_grid = 0.0;
  for (const auto& [m, lo, hi] : std::vector<std::tuple<int, double, double>>{
           {2, 0.01, 0.99}, {2, 0.2, 0.9}, {3, 0.01, 0.99}, {3, 0.05, 0.6}, {3, 0.2, 0.45}}) {
    const auto set = FeasibleSet::make(static_cast<std::size_t>(m), lo, hi);
    for (int trial = 0; trial < 2; ++trial) {
      Eigen::VectorXd y(m);
      for (int i = 0; i < m; ++i) y[i] = u(rng);
      const Eigen::VectorXd x = project(set, Eigen::MatrixXd::Identity(m, m), y);
      Eigen::VectorXd best = set.barycenter();
      double best_value = std::numeric_limits<double>::infinity();
      const long steps = std::lround((hi - lo) / h);
      for (long i = 0; i <= steps; ++i) {
        const double a = lo + i * h;
        if (m == 2) {
          const double b = 1.0 - a;
          if (b < lo - 1e-12 || b > hi + 1e-12) continue;
          const double v = (a - y[0]) * (a - y[0]) + (b - y[1]) * (b - y[1]);
          if (v < best_value) {
            best_value = v;
            best = Eigen::Vector2d(a, b);
          }
          continue;
        }
        for (long j = 0; j <= steps; ++j) {
          const double b = lo + j * h;
          const double c = 1.0 - a - b;
          if (c < lo - 1e-12 || c > hi + 1e-12) continue;
          const double v = (a - y[0]) * (a - y[0]) + (b - y[1]) * (b - y[1]) + (c - y[2]) * (c - y[2]);
          if (v < best_value) {
            best_value = v;
            best = Eigen::Vector3d(a, b, c);
          }
        }
      }
      worst_grid = std::max(worst_grid, (x - best).cwiseAbs().maxCoeff());
    }
  }

  std::uniform_int_distribution<int> dim(2, 10);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_kkt = 0.0;
  double worst_violation = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int m = dim(rng);
    const double lo = std::max(1e-3, unit(rng) * 0.9 / m);
    const double hi = std::min(0.99, std::max(1.2 / m, unit(rng)));
    const auto set = FeasibleSet::make(static_cast<std::size_t>(m), lo, hi);
    const Eigen::MatrixXd metric = testing::random_spd(rng, m, 1e-2);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y[i] = z(rng);
    const Eigen::VectorXd x = project(set, metric, y);
    worst_kkt = std::max(worst_kkt, kkt_residual(set, metric, y, x));
    worst_violation = std::max({worst_violation, std::abs(x.sum() - 1.0), std::max(0.0, lo - x.minCoeff()),
                                std::max(0.0, x.maxCoeff() - hi)});
  }
  return {worst_grid <= 2e-4 && worst_kkt <= 1e-8 && worst_violation <= 1e-9,
          "grid (h=1e-4) max deviation " + num(worst_grid) + " (limit 2e-4); 500 SPD cases max KKT residual " +
              num(worst_kkt) + " (limit 1e-8), max constraint violation " + num(worst_violation)};
}

Outcome negative_definite() {
  std::mt19937_64 rng(107);
  double highest = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_graph(rng, 10, 20);
    highest = std::max(highest,
                       verify_negative_definite(assemble_system_matrix(g, testing::random_weights(g, rng))).max_eigenvalue);
  }
  return {highest <= -1.0 + 1e-10, "100 cases, max eigenvalue " + num(highest) + " (limit -1 + 1e-10)"};
}

Outcome experiment_regret() {
  const auto doc = load_scenario(scenario_path("fig1_regret.scenario"));
  const auto trace = run_scenario(doc.config);
  const auto& r = trace.regret;
  const double final_regret = r.back().regret;
  const double avg10 = r[9].regret / 10.0;
  const double avg50 = r[49].regret / 50.0;
  const auto fit = fit_log_regret(r);
  const bool pass = final_regret >= -1e-9 && avg50 < avg10 && fit.r_squared >= 0.8 && fit.coefficient > 0.0;
  return {pass, "R_50 = " + num(final_regret) + ", R_10/10 = " + num(avg10) + ", R_50/50 = " + num(avg50) +
                    ", c = " + num(fit.coefficient) + ", R^2 = " + num(fit.r_squared) +
                    " (limit 0.8; centered R^2 = " + num(fit.r_squared_centered) + ")"};
}

Outcome experiment_reweighting() {
  const auto doc = load_scenario(scenario_path("fig2_multi_intruder.scenario"));
  const auto trace = run_scenario(doc.config);
  const auto& g = doc.config.graph;
  const auto& tenth = trace.records[9];
  const double initial = mean_incident_weight(g, trace.records[0].weights, tenth.intruders);
  const double at10 = mean_incident_weight(g, tenth.weights, tenth.intruders);
  const int relocation = doc.config.schedule.events().back().iteration;
  double late_change = 0.0;
  for (std::size_t s = static_cast<std::size_t>(relocation); s < trace.records.size(); ++s) {
    late_change = std::max(late_change,
                           (trace.records[s].weights - trace.records[s - 1].weights).cwiseAbs().maxCoeff());
  }
  return {at10 > initial && late_change < 1e-3,
          "incident mean weight " + num(initial) + " -> " + num(at10) + " at iteration 10; max per-iteration change after " +
              "relocation at iteration " + std::to_string(relocation) + ": " + num(late_change) + " (limit 1e-3)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "obsprivacy_determinism";
  fs::remove_all(root);
  int compared = 0;
  for (const char* name : {"fig1_regret.scenario", "fig2_multi_intruder.scenario"}) {
    const auto doc = load_scenario(scenario_path(name));
    std::vector<std::vector<fs::path>> outputs;
    for (int run = 0; run < 2; ++run) {
      const auto dir = root / (std::string(name) + "_" + std::to_string(run));
      outputs.push_back(export_trace(run_scenario(doc.config), dir, {ExportFormat::Table, ExportFormat::JsonLines}));
    }
    if (outputs[0].size() != outputs[1].size()) return {false, std::string(name) + ": different file sets"};
    for (std::size_t i = 0; i < outputs[0].size(); ++i) {
      if (slurp(outputs[0][i]) != slurp(outputs[1][i])) {
        return {false, std::string(name) + ": " + outputs[0][i].filename().string() + " differs between runs"};
      }
      ++compared;
    }
  }
  fs::remove_all(root);
  return {true, std::to_string(compared) + " exported files bit-identical across repeated runs"};
}

Outcome surrogate_quadratics() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto curve = testing::surrogate_quadratic_regret(400, 5, seed);
    double c = 0.0;
    for (int t = 2; t <= 100; ++t) c = std::max(c, curve[t - 1].regret / std::log(t));
    int bound_violations = 0;
    for (int t = 101; t <= 400; ++t) bound_violations += curve[t - 1].regret > c * std::log(t);
    int monotone_violations = 0;
    for (int t = 21; t <= 400; ++t) monotone_violations += !(curve[t - 1].regret / t < curve[t - 2].regret / (t - 1));
    pass = pass && c > 0.0 && bound_violations == 0 && monotone_violations == 0;
    detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + ": C = " + num(c) +
              ", R_400 = " + num(curve.back().regret) + ", bound violations " + std::to_string(bound_violations) +
              ", R_T/T increases " + std::to_string(monotone_violations);
  }
  return {pass, detail};
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace obsprivacy

int main() {
  using namespace obsprivacy;
  const std::vector<Criterion> criteria{
      {"gradient-oracle", 30.0, gradient_oracle},
      {"closed-form-commuting-case", 30.0, closed_form_commuting},
      {"gramian-oracle-equivalence", 60.0, gramian_equivalence},
      {"exponential-inequality", 10.0, exponential_inequality},
      {"midpoint-convexity", 60.0, convexity},
      {"projection-correctness", 60.0, projection},
      {"negative-definiteness", 10.0, negative_definite},
      {"experiment1-regret-shape", 120.0, experiment_regret},
      {"experiment2-reweighting-direction", 120.0, experiment_reweighting},
      {"determinism", 300.0, determinism},
      {"ons-surrogate-quadratics", 30.0, surrogate_quadratics},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto started = std::chrono::steady_clock::now();
    Outcome outcome{false, ""};
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const bool in_time = elapsed <= c.limit_seconds;
    const bool pass = outcome.pass && in_time;
    failed += !pass;
    std::printf("%s %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.name, outcome.detail.c_str(), elapsed,
                c.limit_seconds, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
