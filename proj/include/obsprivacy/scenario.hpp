#pragma once

// End-to-end online game: an intruder schedule reveals one windowed privacy
// cost per iteration, the learner commits weights before each reveal, and
// the network state is integrated alongside for synchronization analysis.
//
// Iteration s (1-based) covers continuous time [s * delta, (s + 1) * delta).

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "obsprivacy/error.hpp"
#include "obsprivacy/feasible_set.hpp"
#include "obsprivacy/gramian.hpp"
#include "obsprivacy/graph.hpp"
#include "obsprivacy/online.hpp"

namespace obsprivacy {

struct ScheduleEvent {
  int iteration;
  IntruderSet intruders;
};

class IntruderSchedule {
 public:
  IntruderSchedule(const NetworkGraph& graph, std::vector<ScheduleEvent> events) : events_(std::move(events)) {
    if (events_.empty()) throw Error(ErrorCode::EmptyIntruderSet, "schedule has no events");
    if (events_.front().iteration != 1) {
      throw Error(ErrorCode::ScheduleOutOfRange, "first event must be at iteration 1");
    }
    for (std::size_t i = 1; i < events_.size(); ++i) {
      if (events_[i].iteration <= events_[i - 1].iteration) {
        throw Error(ErrorCode::ScheduleOutOfRange, "event iterations must be strictly increasing");
      }
    }
    for (const auto& e : events_) {
      // Re-validate against this graph in case the set came from elsewhere.
      IntruderSet check(graph, e.intruders.nodes());
      (void)check;
    }
  }

  const std::vector<ScheduleEvent>& events() const noexcept { return events_; }

  const IntruderSet& active(int iteration) const {
    const IntruderSet* current = &events_.front().intruders;
    for (const auto& e : events_) {
      if (e.iteration <= iteration) current = &e.intruders;
    }
    return *current;
  }

 private:
  std::vector<ScheduleEvent> events_;
};

enum class SolverKind { Ons, Ogd };
enum class InitialWeights { Uniform, Random, Explicit };

struct ScenarioConfig {
  NetworkGraph graph;
  IntruderSchedule schedule;
  int horizon = 50;
  double delta = 0.5;
  int quadrature_order = 16;
  SolverKind solver = SolverKind::Ons;
  GradientMode gradient_mode = GradientMode::Exact;
  InitialWeights initial_weights = InitialWeights::Uniform;
  Eigen::VectorXd explicit_weights{};            // used when initial_weights == Explicit
  std::optional<Eigen::VectorXd> initial_state{};// random from the seed when absent
  std::uint64_t rng_seed = 0;
  int constant_samples = 16;
  double safety = 2.0;
  RegretBaseline baseline = RegretBaseline::FullHorizon;
  int samples_per_window = 4;
  double integration_step = 1e-3;

  CostWindow window(int iteration) const { return {iteration * delta, delta, quadrature_order}; }

  void validate() const {
    if (horizon < 1) throw Error(ErrorCode::ValidationError, "horizon must be >= 1");
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidWindow, "delta must be positive");
    if (quadrature_order < 2) throw Error(ErrorCode::InvalidWindow, "quadrature order must be >= 2");
    if (samples_per_window < 1) throw Error(ErrorCode::ValidationError, "samples_per_window must be >= 1");
    if (!(integration_step > 0.0)) throw Error(ErrorCode::NonPositiveStep, "integration step must be positive");
    for (const auto& e : schedule.events()) {
      if (e.iteration > horizon) {
        throw Error(ErrorCode::ScheduleOutOfRange, "event at iteration " + std::to_string(e.iteration) +
                                                       " is beyond horizon " + std::to_string(horizon));
      }
    }
    if (initial_weights == InitialWeights::Explicit) (void)WeightVector::make(graph, explicit_weights);
    if (initial_state && static_cast<std::size_t>(initial_state->size()) != graph.node_count()) {
      throw Error(ErrorCode::DimensionMismatch, "initial state must have N entries");
    }
  }

  std::vector<CostTerm> cost_terms() const {
    std::vector<CostTerm> terms;
    terms.reserve(static_cast<std::size_t>(horizon));
    for (int s = 1; s <= horizon; ++s) terms.push_back({schedule.active(s).nodes(), window(s)});
    return terms;
  }
};

struct IterationRecord {
  int iteration;
  double time_start;
  std::vector<std::size_t> intruders;
  Eigen::VectorXd weights;
  double cost;
  double gradient_norm;
  double wall_time_seconds;  // not exported; varies run to run
};

struct StateSample {
  double t;
  Eigen::VectorXd x;
};

struct ScenarioTrace {
  std::vector<IterationRecord> records;
  std::vector<StateSample> states;
  RegretLedger ledger;
  std::vector<RegretPoint> regret;
  HindsightResult hindsight;
  ProblemConstants constants;
};

/// Fixed-step RK4 for x' = A(w) x on [t0, t1], sampled at `sample_count`
/// equal intervals (sample_count + 1 points including both ends). The step
/// is shortened so every sampling interval holds a whole number of steps.
inline std::vector<StateSample> integrate_states(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                                 const Eigen::VectorXd& x0, double t0, double t1, double step,
                                                 int sample_count = 1) {
  if (!(step > 0.0)) throw Error(ErrorCode::NonPositiveStep, "integration step must be positive");
  if (sample_count < 1) throw Error(ErrorCode::ValidationError, "sample_count must be >= 1");
  if (static_cast<std::size_t>(x0.size()) != graph.node_count()) {
    throw Error(ErrorCode::DimensionMismatch, "x0 must have N entries");
  }
  if (t1 < t0) throw Error(ErrorCode::InvalidWindow, "t1 < t0");
  const Eigen::MatrixXd a = assemble_system_matrix(graph, w);
  const double interval = (t1 - t0) / sample_count;
  const auto substeps = static_cast<long>(std::max(1.0, std::ceil(interval / step - 1e-9)));
  const double h = interval / static_cast<double>(substeps);

  std::vector<StateSample> out;
  out.reserve(static_cast<std::size_t>(sample_count) + 1);
  Eigen::VectorXd x = x0;
  out.push_back({t0, x});
  for (int j = 1; j <= sample_count; ++j) {
    for (long s = 0; s < substeps; ++s) {
      const Eigen::VectorXd k1 = a * x;
      const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1);
      const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2);
      const Eigen::VectorXd k4 = a * (x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back({t0 + j * interval, x});
  }
  return out;
}

/// ||x(t) - mean(x(t)) 1|| for each sample.
inline std::vector<double> summarize_synchronization(const std::vector<StateSample>& samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyTrace, "no state samples");
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const double mean = s.x.size() > 0 ? s.x.mean() : 0.0;
    out.push_back((s.x.array() - mean).matrix().norm());
  }
  return out;
}

inline std::vector<double> summarize_synchronization(const ScenarioTrace& trace) {
  return summarize_synchronization(trace.states);
}

/// Erdos-Renyi G(n, p), redrawn until connected.
inline NetworkGraph random_connected_graph(std::size_t node_count, double edge_probability, double weight_lower,
                                           double weight_upper, std::mt19937_64& rng, int max_attempts = 10000) {
  std::bernoulli_distribution coin(edge_probability);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < node_count; ++i) {
      for (std::size_t j = i + 1; j < node_count; ++j) {
        if (coin(rng)) edges.push_back({i, j});
      }
    }
    if (NetworkGraph::is_connected(node_count, edges)) {
      return NetworkGraph::build(node_count, edges, weight_lower, weight_upper);
    }
  }
  throw Error(ErrorCode::DisconnectedGraph, "no connected draw within the attempt budget");
}

/// Mean weight of edges touching any node in `nodes`.
inline double mean_incident_weight(const NetworkGraph& graph, const Eigen::VectorXd& w,
                                   const std::vector<std::size_t>& nodes) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t l = 0; l < graph.edge_count(); ++l) {
    const auto& e = graph.edges()[l];
    for (const auto k : nodes) {
      if (e.first == k || e.second == k) {
        sum += w[static_cast<Eigen::Index>(l)];
        ++count;
        break;
      }
    }
  }
  return count > 0 ? sum / count : 0.0;
}

inline Eigen::VectorXd initial_weight_vector(const ScenarioConfig& config, std::mt19937_64& rng) {
  const FeasibleSet set = config.graph.feasible_set();
  switch (config.initial_weights) {
    case InitialWeights::Explicit:
      return WeightVector::make(config.graph, config.explicit_weights).values();
    case InitialWeights::Random:
      return random_feasible_point(set, rng);
    case InitialWeights::Uniform:
      break;
  }
  return set.barycenter();
}

inline ScenarioTrace run_scenario(const ScenarioConfig& config) {
  config.validate();
  const NetworkGraph& graph = config.graph;
  const FeasibleSet set = graph.feasible_set();
  const std::vector<CostTerm> terms = config.cost_terms();
  std::mt19937_64 rng(config.rng_seed);

  ScenarioTrace trace;
  trace.constants = estimate_constants(graph, set, terms, config.constant_samples, config.safety,
                                       config.rng_seed, config.gradient_mode);
  OnlineLearnerState learner = OnlineLearnerState::start(set, initial_weight_vector(config, rng), trace.constants);

  Eigen::VectorXd x;
  if (config.initial_state) {
    x = *config.initial_state;
  } else {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    x.resize(static_cast<Eigen::Index>(graph.node_count()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
  }

  trace.records.reserve(static_cast<std::size_t>(config.horizon));
  for (int s = 1; s <= config.horizon; ++s) {
    const auto started = std::chrono::steady_clock::now();
    const CostTerm& term = terms[static_cast<std::size_t>(s - 1)];
    const Eigen::VectorXd w = learner.point();
    const SpectralCache cache(graph, w);
    const double cost = privacy_cost(cache, term.intruders, term.window);
    const Eigen::VectorXd g = config.gradient_mode == GradientMode::ClosedForm
                                  ? closed_form_gradient(graph, cache, w, term.intruders, term.window)
                                  : exact_gradient(graph, w, term.intruders, term.window);

    auto samples = integrate_states(graph, w, x, term.window.t_start, term.window.t_end(),
                                    config.integration_step, config.samples_per_window);
    x = samples.back().x;
    auto first = samples.begin();
    if (!trace.states.empty()) ++first;
    trace.states.insert(trace.states.end(), first, samples.end());

    learner = config.solver == SolverKind::Ons ? ons_step(learner, g) : ogd_step(learner, g);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    trace.records.push_back({s, term.window.t_start, term.intruders, w, cost, g.norm(), elapsed});
    trace.ledger.per_step_costs.push_back(cost);
  }

  trace.hindsight = hindsight_optimum(graph, set, terms);
  {
    const SpectralCache best(graph, trace.hindsight.point);
    double total = 0.0;
    for (const auto& t : terms) {
      const double c = privacy_cost(best, t.intruders, t.window);
      trace.ledger.per_step_hindsight_costs.push_back(c);
      total += c;
    }
    trace.ledger.hindsight_cost = total;
  }
  if (config.baseline == RegretBaseline::Prefix) {
    for (std::size_t t = 1; t <= terms.size(); ++t) {
      const auto prefix = hindsight_optimum(graph, set, std::span<const CostTerm>(terms.data(), t));
      trace.ledger.prefix_hindsight_minima.push_back(prefix.value);
    }
  }
  trace.regret = regret_curve(trace.ledger, config.baseline);
  return trace;
}

}  // namespace obsprivacy
