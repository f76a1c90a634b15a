#pragma once

// Scenario files and trace exports.
//
// Scenario files are sectioned key/value text:
//
//   # comment
//   [graph]
//   nodes = 3
//   edges = 1-2, 2-3
//   w_min = 0.01
//   w_max = 0.99
//   [schedule]
//   event = 1: 2          # from iteration 1, node 2 is measured
//   event_time = 10: 1 3  # continuous time, mapped to iteration floor(t / delta)
//   [run]
//   horizon = 5
//   [output]
//   directory = out
//
// Node labels in files and exports are 1-based; the library is 0-based.

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "obsprivacy/error.hpp"
#include "obsprivacy/graph.hpp"
#include "obsprivacy/scenario.hpp"

namespace obsprivacy {

enum class ExportFormat { Table, JsonLines };

struct OutputSpec {
  std::string directory = "out";
  std::vector<ExportFormat> formats{ExportFormat::Table};
};

struct ScenarioDocument {
  ScenarioConfig config;
  OutputSpec output;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_tokens(const std::string& s, std::string_view separators = " \t,") {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (separators.find(c) != std::string_view::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Entry {
  std::string value;
  int line;
};

struct RawDocument {
  // section -> key -> entries (keys like `event` may repeat)
  std::map<std::string, std::map<std::string, std::vector<Entry>>> sections;
};

inline double parse_double(const std::string& field, const std::string& text, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ScenarioError(ErrorCode::ValidationError, field, "expected a number, got '" + text + "'", line);
  }
}

inline long long parse_integer(const std::string& field, const std::string& text, int line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ScenarioError(ErrorCode::ValidationError, field, "expected an integer, got '" + text + "'", line);
  }
}

inline std::vector<double> parse_number_list(const std::string& field, const std::string& text, int line) {
  std::vector<double> out;
  for (const auto& tok : split_tokens(text)) out.push_back(parse_double(field, tok, line));
  return out;
}

inline const std::set<std::string>& known_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"graph", {"nodes", "edges", "w_min", "w_max", "random_edge_probability", "graph_seed"}},
      {"schedule", {"event", "event_time"}},
      {"run",
       {"horizon", "delta", "solver", "gradient", "seed", "initial_weights", "initial_state",
        "quadrature_order", "constant_samples", "safety", "baseline", "samples_per_window",
        "integration_step"}},
      {"output", {"directory", "formats"}},
  };
  return keys.at(section);
}

inline RawDocument tokenize(std::string_view document) {
  RawDocument raw;
  std::string section;
  std::istringstream in{std::string(document)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ScenarioError(ErrorCode::SyntaxError, "section", "unterminated header", number);
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (section != "graph" && section != "schedule" && section != "run" && section != "output") {
        throw ScenarioError(ErrorCode::SyntaxError, "section", "unknown section '" + section + "'", number);
      }
      raw.sections[section];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError(ErrorCode::SyntaxError, "line", "expected 'key = value'", number);
    }
    if (section.empty()) throw ScenarioError(ErrorCode::SyntaxError, "line", "entry before any section", number);
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ScenarioError(ErrorCode::SyntaxError, "line", "empty key", number);
    if (!known_keys(section).count(key)) {
      throw ScenarioError(ErrorCode::ValidationError, section + "." + key, "unknown key", number);
    }
    auto& entries = raw.sections[section][key];
    if (!entries.empty() && key != "event" && key != "event_time") {
      throw ScenarioError(ErrorCode::ValidationError, section + "." + key, "key repeated", number);
    }
    entries.push_back({value, number});
  }
  return raw;
}

inline const Entry* find(const RawDocument& raw, const std::string& section, const std::string& key) {
  const auto s = raw.sections.find(section);
  if (s == raw.sections.end()) return nullptr;
  const auto k = s->second.find(key);
  if (k == s->second.end() || k->second.empty()) return nullptr;
  return &k->second.front();
}

inline const Entry& require(const RawDocument& raw, const std::string& section, const std::string& key) {
  const Entry* e = find(raw, section, key);
  if (!e) throw ScenarioError(ErrorCode::ValidationError, section + "." + key, "missing required key");
  return *e;
}

inline std::string graph_error_field(ErrorCode code) {
  switch (code) {
    case ErrorCode::InfeasibleBounds: return "bounds";
    case ErrorCode::DisconnectedGraph: return "graph.edges";
    case ErrorCode::DuplicateEdge: return "graph.edges";
    case ErrorCode::SelfLoop: return "graph.edges";
    default: return "graph";
  }
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Fewest significant digits that still read back as `v`, for messages.
inline std::string format_short(double v) {
  char buf[40];
  for (int digits = 1; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace detail

/// Parses and fully validates a scenario document. Every failure is a
/// ScenarioError naming the field (and line where one applies).
inline ScenarioDocument parse_scenario(std::string_view document) {
  using detail::Entry;
  if (document.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ScenarioError(ErrorCode::SyntaxError, "document", "document is empty");
  }
  const detail::RawDocument raw = detail::tokenize(document);

  // [graph]
  const Entry& nodes_entry = detail::require(raw, "graph", "nodes");
  const long long node_count = detail::parse_integer("graph.nodes", nodes_entry.value, nodes_entry.line);
  if (node_count < 1) throw ScenarioError(ErrorCode::ValidationError, "graph.nodes", "must be >= 1", nodes_entry.line);
  const Entry& lo_entry = detail::require(raw, "graph", "w_min");
  const Entry& hi_entry = detail::require(raw, "graph", "w_max");
  const double w_min = detail::parse_double("graph.w_min", lo_entry.value, lo_entry.line);
  const double w_max = detail::parse_double("graph.w_max", hi_entry.value, hi_entry.line);

  std::optional<NetworkGraph> graph;
  try {
    if (const Entry* edges_entry = detail::find(raw, "graph", "edges")) {
      if (detail::find(raw, "graph", "random_edge_probability")) {
        throw ScenarioError(ErrorCode::ValidationError, "graph.edges",
                            "give either edges or random_edge_probability", edges_entry->line);
      }
      std::vector<Edge> edges;
      for (const auto& tok : detail::split_tokens(edges_entry->value, " \t,")) {
        const auto dash = tok.find('-');
        if (dash == std::string::npos) {
          throw ScenarioError(ErrorCode::ValidationError, "graph.edges", "edge '" + tok + "' is not i-j",
                              edges_entry->line);
        }
        const long long a = detail::parse_integer("graph.edges", tok.substr(0, dash), edges_entry->line);
        const long long b = detail::parse_integer("graph.edges", tok.substr(dash + 1), edges_entry->line);
        if (a < 1 || b < 1 || a > node_count || b > node_count) {
          throw ScenarioError(ErrorCode::ValidationError, "graph.edges", "edge '" + tok + "' node out of range",
                              edges_entry->line);
        }
        edges.push_back({static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1)});
      }
      const double m = static_cast<double>(edges.size());
      if (edges.size() >= 2 && m * w_min > 1.0) {
        throw ScenarioError(ErrorCode::ValidationError, "bounds",
                            std::to_string(edges.size()) + "*" + detail::format_short(w_min) + " > 1");
      }
      if (edges.size() >= 2 && m * w_max < 1.0) {
        throw ScenarioError(ErrorCode::ValidationError, "bounds",
                            std::to_string(edges.size()) + "*" + detail::format_short(w_max) + " < 1");
      }
      graph = NetworkGraph::build(static_cast<std::size_t>(node_count), edges, w_min, w_max);
    } else if (const Entry* p_entry = detail::find(raw, "graph", "random_edge_probability")) {
      const double p = detail::parse_double("graph.random_edge_probability", p_entry->value, p_entry->line);
      if (!(p > 0.0 && p <= 1.0)) {
        throw ScenarioError(ErrorCode::ValidationError, "graph.random_edge_probability", "must be in (0, 1]",
                            p_entry->line);
      }
      std::uint64_t gseed = 0;
      if (const Entry* s = detail::find(raw, "graph", "graph_seed")) {
        gseed = static_cast<std::uint64_t>(detail::parse_integer("graph.graph_seed", s->value, s->line));
      }
      std::mt19937_64 grng(gseed);
      graph = random_connected_graph(static_cast<std::size_t>(node_count), p, w_min, w_max, grng);
    } else if (node_count == 1) {
      graph = NetworkGraph::build(1, {}, w_min, w_max);
    } else {
      throw ScenarioError(ErrorCode::ValidationError, "graph.edges", "missing required key");
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(ErrorCode::ValidationError, detail::graph_error_field(e.code()), e.what());
  }

  // [run]
  auto number = [&](const std::string& key, double fallback) {
    if (const Entry* e = detail::find(raw, "run", key)) return detail::parse_double("run." + key, e->value, e->line);
    return fallback;
  };
  auto integer = [&](const std::string& key, long long fallback) {
    if (const Entry* e = detail::find(raw, "run", key)) return detail::parse_integer("run." + key, e->value, e->line);
    return fallback;
  };
  auto choice = [&](const std::string& key, const std::string& fallback,
                    std::initializer_list<const char*> allowed) -> std::pair<std::string, int> {
    const Entry* e = detail::find(raw, "run", key);
    if (!e) return {fallback, 0};
    for (const char* a : allowed) {
      if (e->value == a) return {e->value, e->line};
    }
    throw ScenarioError(ErrorCode::ValidationError, "run." + key, "unsupported value '" + e->value + "'", e->line);
  };

  const long long horizon = integer("horizon", 50);
  if (horizon < 1) throw ScenarioError(ErrorCode::ValidationError, "run.horizon", "must be >= 1");
  const double delta = number("delta", 0.5);
  if (!(delta > 0.0)) throw ScenarioError(ErrorCode::ValidationError, "run.delta", "must be positive");

  // [schedule]
  struct PendingEvent {
    int iteration;
    std::vector<std::size_t> nodes;
    int line;
  };
  std::vector<PendingEvent> pending;
  auto read_events = [&](const std::string& key, bool is_time) {
    const auto s = raw.sections.find("schedule");
    if (s == raw.sections.end()) return;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return;
    for (const auto& e : k->second) {
      const auto colon = e.value.find(':');
      if (colon == std::string::npos) {
        throw ScenarioError(ErrorCode::SyntaxError, "schedule." + key, "expected '<when>: <nodes>'", e.line);
      }
      const std::string when = detail::trim(std::string_view(e.value).substr(0, colon));
      int iteration = 0;
      if (is_time) {
        const double t = detail::parse_double("schedule." + key, when, e.line);
        if (t < 0.0) throw ScenarioError(ErrorCode::ValidationError, "schedule", "event time is negative", e.line);
        iteration = std::max(1, static_cast<int>(std::floor(t / delta + 1e-12)));
      } else {
        iteration = static_cast<int>(detail::parse_integer("schedule." + key, when, e.line));
      }
      std::vector<std::size_t> nodes;
      for (const auto& tok : detail::split_tokens(e.value.substr(colon + 1))) {
        const long long v = detail::parse_integer("schedule", tok, e.line);
        if (v < 1 || v > static_cast<long long>(graph->node_count())) {
          throw ScenarioError(ErrorCode::ValidationError, "schedule",
                              "node out of range: " + tok + " not in 1.." + std::to_string(graph->node_count()),
                              e.line);
        }
        nodes.push_back(static_cast<std::size_t>(v - 1));
      }
      if (nodes.empty()) throw ScenarioError(ErrorCode::ValidationError, "schedule", "event has no nodes", e.line);
      pending.push_back({iteration, std::move(nodes), e.line});
    }
  };
  read_events("event", false);
  read_events("event_time", true);
  if (pending.empty()) throw ScenarioError(ErrorCode::ValidationError, "schedule", "no events");
  std::stable_sort(pending.begin(), pending.end(),
                   [](const PendingEvent& a, const PendingEvent& b) { return a.iteration < b.iteration; });
  std::vector<ScheduleEvent> events;
  for (const auto& p : pending) {
    if (p.iteration < 1) throw ScenarioError(ErrorCode::ValidationError, "schedule", "iteration must be >= 1", p.line);
    if (p.iteration > horizon) {
      throw ScenarioError(ErrorCode::ValidationError, "schedule",
                          "event after horizon (" + std::to_string(p.iteration) + " > " +
                              std::to_string(horizon) + ")",
                          p.line);
    }
    if (!events.empty() && events.back().iteration == p.iteration) {
      throw ScenarioError(ErrorCode::ValidationError, "schedule",
                          "two events at iteration " + std::to_string(p.iteration), p.line);
    }
    events.push_back({p.iteration, IntruderSet(*graph, p.nodes)});
  }
  if (events.front().iteration != 1) {
    throw ScenarioError(ErrorCode::ValidationError, "schedule", "first event must be at iteration 1");
  }

  ScenarioConfig config{.graph = *graph, .schedule = IntruderSchedule(*graph, std::move(events))};
  config.horizon = static_cast<int>(horizon);
  config.delta = delta;
  config.quadrature_order = static_cast<int>(integer("quadrature_order", 16));
  if (config.quadrature_order < 2) {
    throw ScenarioError(ErrorCode::ValidationError, "run.quadrature_order", "must be >= 2");
  }
  config.solver = choice("solver", "ons", {"ons", "ogd"}).first == "ogd" ? SolverKind::Ogd : SolverKind::Ons;
  config.gradient_mode =
      choice("gradient", "exact", {"exact", "closed_form"}).first == "closed_form" ? GradientMode::ClosedForm : GradientMode::Exact;
  config.baseline = choice("baseline", "full", {"full", "prefix"}).first == "prefix" ? RegretBaseline::Prefix
                                                                                      : RegretBaseline::FullHorizon;
  config.rng_seed = static_cast<std::uint64_t>(integer("seed", 0));
  config.constant_samples = static_cast<int>(integer("constant_samples", 16));
  if (config.constant_samples < 1) {
    throw ScenarioError(ErrorCode::ValidationError, "run.constant_samples", "must be >= 1");
  }
  config.safety = number("safety", 2.0);
  if (!(config.safety >= 1.0)) throw ScenarioError(ErrorCode::ValidationError, "run.safety", "must be >= 1");
  config.samples_per_window = static_cast<int>(integer("samples_per_window", 4));
  if (config.samples_per_window < 1) {
    throw ScenarioError(ErrorCode::ValidationError, "run.samples_per_window", "must be >= 1");
  }
  config.integration_step = number("integration_step", 1e-3);
  if (!(config.integration_step > 0.0)) {
    throw ScenarioError(ErrorCode::ValidationError, "run.integration_step", "must be positive");
  }

  if (const Entry* e = detail::find(raw, "run", "initial_weights")) {
    if (e->value == "uniform") {
      config.initial_weights = InitialWeights::Uniform;
    } else if (e->value == "random") {
      config.initial_weights = InitialWeights::Random;
    } else {
      const auto values = detail::parse_number_list("run.initial_weights", e->value, e->line);
      config.initial_weights = InitialWeights::Explicit;
      config.explicit_weights = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
      try {
        (void)WeightVector::make(config.graph, config.explicit_weights);
      } catch (const Error& err) {
        throw ScenarioError(ErrorCode::ValidationError, "run.initial_weights", err.what(), e->line);
      }
    }
  }
  if (const Entry* e = detail::find(raw, "run", "initial_state")) {
    if (e->value != "random") {
      const auto values = detail::parse_number_list("run.initial_state", e->value, e->line);
      if (values.size() != config.graph.node_count()) {
        throw ScenarioError(ErrorCode::ValidationError, "run.initial_state",
                            "expected " + std::to_string(config.graph.node_count()) + " values", e->line);
      }
      config.initial_state = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
  }

  OutputSpec output;
  if (const Entry* e = detail::find(raw, "output", "directory")) output.directory = e->value;
  if (const Entry* e = detail::find(raw, "output", "formats")) {
    output.formats.clear();
    for (const auto& tok : detail::split_tokens(e->value)) {
      if (tok == "table") output.formats.push_back(ExportFormat::Table);
      else if (tok == "json_lines") output.formats.push_back(ExportFormat::JsonLines);
      else throw ScenarioError(ErrorCode::ValidationError, "output.formats", "unknown format '" + tok + "'", e->line);
    }
    if (output.formats.empty()) throw ScenarioError(ErrorCode::ValidationError, "output.formats", "no formats", e->line);
  }

  try {
    config.validate();
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& err) {
    throw ScenarioError(ErrorCode::ValidationError, "run", err.what());
  }
  return {std::move(config), std::move(output)};
}

inline ScenarioDocument load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Export

inline std::string format_intruders(const std::vector<std::size_t>& nodes) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(nodes[i] + 1);
  }
  return out;
}

/// iteration,time_start,active_intruders,w_1..w_M,cost,grad_norm,cum_cost,regret
inline std::string iteration_table(const ScenarioTrace& trace) {
  std::string out = "iteration,time_start,active_intruders";
  const auto m = trace.records.empty() ? 0 : trace.records.front().weights.size();
  for (Eigen::Index l = 0; l < m; ++l) out += ",w_" + std::to_string(l + 1);
  out += ",cost,grad_norm,cum_cost,regret\n";
  double cumulative = 0.0;
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const auto& rec = trace.records[r];
    cumulative += rec.cost;
    out += std::to_string(rec.iteration) + ',' + detail::format_number(rec.time_start) + ',' +
           format_intruders(rec.intruders);
    for (Eigen::Index l = 0; l < rec.weights.size(); ++l) out += ',' + detail::format_number(rec.weights[l]);
    const double regret = r < trace.regret.size() ? trace.regret[r].regret : std::nan("");
    out += ',' + detail::format_number(rec.cost) + ',' + detail::format_number(rec.gradient_norm) + ',' +
           detail::format_number(cumulative) + ',' + detail::format_number(regret) + '\n';
  }
  return out;
}

/// T,regret,regret_over_T
inline std::string regret_table(const ScenarioTrace& trace) {
  std::string out = "T,regret,regret_over_T\n";
  for (const auto& p : trace.regret) {
    out += std::to_string(p.horizon) + ',' + detail::format_number(p.regret) + ',' +
           detail::format_number(p.regret / p.horizon) + '\n';
  }
  return out;
}

/// t,x_1..x_N
inline std::string state_table(const ScenarioTrace& trace) {
  std::string out = "t";
  const auto n = trace.states.empty() ? 0 : trace.states.front().x.size();
  for (Eigen::Index i = 0; i < n; ++i) out += ",x_" + std::to_string(i + 1);
  out += '\n';
  for (const auto& s : trace.states) {
    out += detail::format_number(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out += ',' + detail::format_number(s.x[i]);
    out += '\n';
  }
  return out;
}

/// One JSON object per iteration with a fixed key set.
inline std::string iteration_json_lines(const ScenarioTrace& trace) {
  std::string out;
  double cumulative = 0.0;
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const auto& rec = trace.records[r];
    cumulative += rec.cost;
    nlohmann::ordered_json j;
    j["iteration"] = rec.iteration;
    j["time_start"] = rec.time_start;
    std::vector<std::size_t> labels;
    for (const auto k : rec.intruders) labels.push_back(k + 1);
    j["active_intruders"] = labels;
    j["weights"] = std::vector<double>(rec.weights.data(), rec.weights.data() + rec.weights.size());
    j["cost"] = rec.cost;
    j["grad_norm"] = rec.gradient_norm;
    j["cum_cost"] = cumulative;
    j["regret"] = r < trace.regret.size() ? trace.regret[r].regret : 0.0;
    out += j.dump() + '\n';
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

/// Writes iterations.csv, regret.csv and states.csv (Table) and/or
/// iterations.jsonl (JsonLines) into `directory`. Returns the written paths.
inline std::vector<std::filesystem::path> export_trace(const ScenarioTrace& trace,
                                                       const std::filesystem::path& directory,
                                                       const std::vector<ExportFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + directory.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto f : formats) {
    if (f == ExportFormat::Table) {
      written.push_back(directory / "iterations.csv");
      write_file(written.back(), iteration_table(trace));
      written.push_back(directory / "regret.csv");
      write_file(written.back(), regret_table(trace));
      written.push_back(directory / "states.csv");
      write_file(written.back(), state_table(trace));
    } else {
      written.push_back(directory / "iterations.jsonl");
      write_file(written.back(), iteration_json_lines(trace));
    }
  }
  return written;
}

/// Reads a regret table back into (T, regret) points.
inline std::vector<RegretPoint> parse_regret_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "T,regret,regret_over_T") {
    throw ScenarioError(ErrorCode::SyntaxError, "regret table", "bad header", 1);
  }
  std::vector<RegretPoint> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cols = detail::split_tokens(line, ",");
    if (cols.size() != 3) throw ScenarioError(ErrorCode::SyntaxError, "regret table", "expected 3 columns", number);
    out.push_back({static_cast<int>(detail::parse_integer("T", cols[0], number)),
                   detail::parse_double("regret", cols[1], number)});
  }
  return out;
}

}  // namespace obsprivacy
