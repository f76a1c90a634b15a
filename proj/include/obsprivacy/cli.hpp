#pragma once

// Command-line front end: run, hindsight, check, oracle.
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <CLI11.hpp>

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "obsprivacy/error.hpp"
#include "obsprivacy/gramian.hpp"
#include "obsprivacy/online.hpp"
#include "obsprivacy/oracle.hpp"
#include "obsprivacy/scenario.hpp"
#include "obsprivacy/scenario_io.hpp"

namespace obsprivacy {

namespace cli_detail {

inline std::string vec(const Eigen::VectorXd& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += detail::format_number(v[i]);
  }
  return out + ")";
}

inline int run(const ScenarioDocument& doc, const std::string& output_override, std::ostream& out) {
  const ScenarioTrace trace = run_scenario(doc.config);
  const std::filesystem::path dir = output_override.empty() ? doc.output.directory : output_override;
  const auto files = export_trace(trace, dir, doc.output.formats);
  const auto& last = trace.regret.back();
  out << "iterations: " << trace.records.size() << "\n"
      << "final regret: " << detail::format_number(last.regret) << "\n"
      << "regret/T: " << detail::format_number(last.regret / last.horizon) << "\n"
      << "hindsight cost: " << detail::format_number(*trace.ledger.hindsight_cost) << "\n";
  for (const auto& f : files) out << "wrote " << f.string() << "\n";
  return 0;
}

inline int hindsight(const ScenarioDocument& doc, std::ostream& out) {
  const auto terms = doc.config.cost_terms();
  const auto result = hindsight_optimum(doc.config.graph, doc.config.graph.feasible_set(), terms);
  out << "w* = " << vec(result.point) << "\n"
      << "value = " << detail::format_number(result.value) << "\n"
      << "projected gradient norm = " << detail::format_number(result.projected_gradient_norm) << "\n"
      << "iterations = " << result.iterations << (result.converged ? "" : " (MaxIterationsExceeded)") << "\n";
  return 0;
}

inline int check(const ScenarioDocument& doc, std::ostream& out) {
  const auto& cfg = doc.config;
  out << "nodes N = " << cfg.graph.node_count() << ", edges M = " << cfg.graph.edge_count() << "\n"
      << "bounds = [" << detail::format_short(cfg.graph.weight_lower()) << ", "
      << detail::format_short(cfg.graph.weight_upper()) << "]\n"
      << "horizon = " << cfg.horizon << ", delta = " << detail::format_short(cfg.delta) << "\n"
      << "events = " << cfg.schedule.events().size() << "\n";
  const auto terms = cfg.cost_terms();
  const auto set = cfg.graph.feasible_set();
  const auto c = estimate_constants(cfg.graph, set, terms, cfg.constant_samples, cfg.safety, cfg.rng_seed,
                                    cfg.gradient_mode);
  out << "G = " << detail::format_number(c.gradient_bound) << "\n"
      << "D = " << detail::format_number(c.diameter) << "\n";
  if (set.is_singleton()) {
    out << "beta, epsilon: undefined (singleton feasible set)\n";
  } else {
    const double beta = 1.0 / (8.0 * c.gradient_bound * c.diameter);
    out << "beta = " << detail::format_number(beta) << "\n"
        << "epsilon = " << detail::format_number(1.0 / (beta * beta * c.diameter * c.diameter)) << "\n";
  }
  return 0;
}

inline int oracle(const ScenarioDocument& doc, std::ostream& out) {
  const auto& cfg = doc.config;
  std::mt19937_64 rng(cfg.rng_seed);
  const Eigen::VectorXd w = initial_weight_vector(cfg, rng);
  double worst_fd = 0.0;
  double worst_divergence = 0.0;
  double worst_empirical = 0.0;
  std::set<std::vector<std::size_t>> seen;
  for (const auto& event : cfg.schedule.events()) {
    const auto& nodes = event.intruders.nodes();
    const CostWindow window = cfg.window(event.iteration);
    const Eigen::VectorXd exact = exact_gradient(cfg.graph, w, nodes, window);
    const Eigen::VectorXd fd = finite_difference_gradient(cfg.graph, w, nodes, window);
    const Eigen::VectorXd closed = closed_form_gradient(cfg.graph, SpectralCache(cfg.graph, w), nodes, window);
    const double fd_err = max_relative_error(exact, fd);
    const double divergence = max_relative_error(closed, exact);
    worst_fd = std::max(worst_fd, fd_err);
    worst_divergence = std::max(worst_divergence, divergence);
    out << "event@" << event.iteration << " intruders " << format_intruders(nodes)
        << ": exact-vs-fd " << detail::format_number(fd_err) << ", closed-form-vs-exact "
        << detail::format_number(divergence) << "\n";
    if (seen.insert(nodes).second) {
      const double horizon = 20.0;
      const double cost = privacy_cost(cfg.graph, w, nodes, CostWindow{0.0, horizon, cfg.quadrature_order});
      const double empirical = empirical_gramian_trace(cfg.graph, w, nodes, 0.01, horizon, 1e-3);
      const double rel = std::abs(empirical - cost) / std::abs(cost);
      worst_empirical = std::max(worst_empirical, rel);
      out << "  empirical-gramian-vs-cost over [0,20]: " << detail::format_number(rel) << "\n";
    }
  }
  out << "max exact-vs-fd relative error: " << detail::format_number(worst_fd) << "\n"
      << "max closed-form-vs-exact divergence: " << detail::format_number(worst_divergence) << "\n"
      << "max empirical-gramian relative error: " << detail::format_number(worst_empirical) << "\n";
  return 0;
}

}  // namespace cli_detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Online edge re-weighting of consensus networks against observability from intruders"};
  app.require_subcommand(1);
  std::string file;
  std::string output_dir;
  auto* run = app.add_subcommand("run", "run the online game and export traces");
  run->add_option("scenario", file, "scenario file")->required();
  run->add_option("-o,--output", output_dir, "override the output directory");
  auto* hind = app.add_subcommand("hindsight", "solve for the best fixed weights only");
  hind->add_option("scenario", file, "scenario file")->required();
  auto* chk = app.add_subcommand("check", "validate and print G, D, beta, epsilon");
  chk->add_option("scenario", file, "scenario file")->required();
  auto* orc = app.add_subcommand("oracle", "gradient and empirical-Gramian cross-checks");
  orc->add_option("scenario", file, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    const ScenarioDocument doc = load_scenario(file);
    if (run->parsed()) return cli_detail::run(doc, output_dir, out);
    if (hind->parsed()) return cli_detail::hindsight(doc, out);
    if (chk->parsed()) return cli_detail::check(doc, out);
    return cli_detail::oracle(doc, out);
  } catch (const ScenarioError& e) {
    err << file << ": " << e.what() << "\n";
    return e.code() == ErrorCode::SyntaxError || e.code() == ErrorCode::ValidationError ? 1 : 2;
  } catch (const Error& e) {
    err << file << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << file << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace obsprivacy
