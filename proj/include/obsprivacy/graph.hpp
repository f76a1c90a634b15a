#pragma once

// Undirected weighted communication graph and the parametrized system
// matrix A(w) = -I - sum_l w_l e_ij e_ij' of the stabilized consensus network.
//
// Nodes and edges are 0-based in the library. Edge l keeps the position it
// had in the input list; each edge is stored with first < second.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "obsprivacy/error.hpp"
#include "obsprivacy/feasible_set.hpp"

namespace obsprivacy {

struct Edge {
  std::size_t first;
  std::size_t second;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class NetworkGraph {
 public:
  /// Validates and builds. Checks run in the order: index range, self-loops,
  /// duplicates, connectivity, bound feasibility.
  static NetworkGraph build(std::size_t node_count, const std::vector<Edge>& edges,
                            double weight_lower, double weight_upper) {
    if (node_count == 0) throw Error(ErrorCode::IndexOutOfRange, "graph needs at least one node");
    std::vector<Edge> normalized;
    normalized.reserve(edges.size());
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t l = 0; l < edges.size(); ++l) {
      const auto [a, b] = edges[l];
      if (a >= node_count || b >= node_count) {
        throw Error(ErrorCode::IndexOutOfRange, "edge " + std::to_string(l) +
                                                    " references a node outside [0, " +
                                                    std::to_string(node_count) + ")");
      }
      if (a == b) throw Error(ErrorCode::SelfLoop, "edge " + std::to_string(l) + " is a self-loop");
      Edge e{std::min(a, b), std::max(a, b)};
      if (!seen.emplace(e.first, e.second).second) {
        throw Error(ErrorCode::DuplicateEdge, "edge {" + std::to_string(e.first) + "," +
                                                  std::to_string(e.second) + "} repeated");
      }
      normalized.push_back(e);
    }
    if (!is_connected(node_count, normalized)) {
      throw Error(ErrorCode::DisconnectedGraph, "graph with " + std::to_string(node_count) +
                                                    " nodes is not connected");
    }
    if (!(weight_lower > 0.0) || !(weight_lower < weight_upper) || !(weight_upper < 1.0)) {
      throw Error(ErrorCode::InfeasibleBounds, "bounds must satisfy 0 < w_min < w_max < 1");
    }
    const double m = static_cast<double>(normalized.size());
    if (normalized.size() >= 2) {
      if (m * weight_lower > 1.0) {
        throw Error(ErrorCode::InfeasibleBounds,
                    std::to_string(normalized.size()) + "*w_min > 1");
      }
      if (m * weight_upper < 1.0) {
        throw Error(ErrorCode::InfeasibleBounds,
                    std::to_string(normalized.size()) + "*w_max < 1");
      }
    }
    return NetworkGraph(node_count, std::move(normalized), weight_lower, weight_upper);
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  double weight_lower() const noexcept { return weight_lower_; }
  double weight_upper() const noexcept { return weight_upper_; }

  const Edge& edge(std::size_t l) const {
    if (l >= edges_.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "edge index " + std::to_string(l) + " >= M=" +
                                                  std::to_string(edges_.size()));
    }
    return edges_[l];
  }

  /// sigma(i, j); order of i and j is irrelevant.
  std::optional<std::size_t> edge_index(std::size_t i, std::size_t j) const {
    const Edge key{std::min(i, j), std::max(i, j)};
    for (std::size_t l = 0; l < edges_.size(); ++l) {
      if (edges_[l] == key) return l;
    }
    return std::nullopt;
  }

  std::vector<std::size_t> incident_edges(std::size_t node) const {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < edges_.size(); ++l) {
      if (edges_[l].first == node || edges_[l].second == node) out.push_back(l);
    }
    return out;
  }

  FeasibleSet feasible_set() const {
    return FeasibleSet::make(edges_.size(), weight_lower_, weight_upper_);
  }

  static bool is_connected(std::size_t node_count, const std::vector<Edge>& edges) {
    std::vector<std::size_t> parent(node_count);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
      while (parent[v] != v) {
        parent[v] = parent[parent[v]];
        v = parent[v];
      }
      return v;
    };
    std::size_t components = node_count;
    for (const auto& e : edges) {
      const auto ra = find(e.first);
      const auto rb = find(e.second);
      if (ra != rb) {
        parent[ra] = rb;
        --components;
      }
    }
    return components == 1;
  }

 private:
  NetworkGraph(std::size_t node_count, std::vector<Edge> edges, double lower, double upper)
      : node_count_(node_count), edges_(std::move(edges)), weight_lower_(lower), weight_upper_(upper) {}

  std::size_t node_count_;
  std::vector<Edge> edges_;
  double weight_lower_;
  double weight_upper_;
};

inline NetworkGraph build_graph(std::size_t node_count, const std::vector<Edge>& edges,
                                double weight_lower, double weight_upper) {
  return NetworkGraph::build(node_count, edges, weight_lower, weight_upper);
}

/// A feasible point of the graph's weight polytope.
class WeightVector {
 public:
  static WeightVector make(const NetworkGraph& graph, Eigen::VectorXd values, double tol = 1e-10) {
    if (static_cast<std::size_t>(values.size()) != graph.edge_count()) {
      throw Error(ErrorCode::DimensionMismatch, "weight vector has " +
                                                    std::to_string(values.size()) +
                                                    " entries, graph has M=" +
                                                    std::to_string(graph.edge_count()));
    }
    if (!graph.feasible_set().contains(values, tol)) {
      throw Error(ErrorCode::InfeasibleSet, "weights violate 1'w = 1 or the box bounds");
    }
    return WeightVector(std::move(values));
  }

  static WeightVector uniform(const NetworkGraph& graph) {
    return WeightVector(graph.feasible_set().barycenter());
  }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t l) const { return values_[static_cast<Eigen::Index>(l)]; }

 private:
  explicit WeightVector(Eigen::VectorXd values) : values_(std::move(values)) {}

  Eigen::VectorXd values_;
};

/// Nonempty set of measured (compromised) nodes, sorted and unique.
class IntruderSet {
 public:
  IntruderSet(const NetworkGraph& graph, std::vector<std::size_t> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error(ErrorCode::EmptyIntruderSet, "intruder set is empty");
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    if (nodes_.back() >= graph.node_count()) {
      throw Error(ErrorCode::IndexOutOfRange, "intruder node " + std::to_string(nodes_.back()) +
                                                  " outside graph of N=" +
                                                  std::to_string(graph.node_count()));
    }
  }

  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }
  bool contains(std::size_t node) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), node);
  }

  friend bool operator==(const IntruderSet&, const IntruderSet&) = default;

 private:
  std::vector<std::size_t> nodes_;
};

/// e_i - e_j for edge l = {i, j}, i < j.
inline Eigen::VectorXd incidence_column(const NetworkGraph& graph, std::size_t l) {
  const auto& e = graph.edge(l);
  Eigen::VectorXd col = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.node_count()));
  col[static_cast<Eigen::Index>(e.first)] = 1.0;
  col[static_cast<Eigen::Index>(e.second)] = -1.0;
  return col;
}

inline Eigen::MatrixXd incidence_matrix(const NetworkGraph& graph) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(graph.node_count()),
                                            static_cast<Eigen::Index>(graph.edge_count()));
  for (std::size_t l = 0; l < graph.edge_count(); ++l) {
    E.col(static_cast<Eigen::Index>(l)) = incidence_column(graph, l);
  }
  return E;
}

/// A_l = -e_ij e_ij'.
inline Eigen::MatrixXd edge_direction(const NetworkGraph& graph, std::size_t l) {
  const Eigen::VectorXd e = incidence_column(graph, l);
  return -e * e.transpose();
}

inline void check_weight_dimension(const NetworkGraph& graph, const Eigen::VectorXd& w) {
  if (static_cast<std::size_t>(w.size()) != graph.edge_count()) {
    throw Error(ErrorCode::DimensionMismatch, "weight vector has " + std::to_string(w.size()) +
                                                  " entries, graph has M=" +
                                                  std::to_string(graph.edge_count()));
  }
}

inline Eigen::MatrixXd weighted_laplacian(const NetworkGraph& graph, const Eigen::VectorXd& w) {
  check_weight_dimension(graph, w);
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t l = 0; l < graph.edge_count(); ++l) {
    const auto i = static_cast<Eigen::Index>(graph.edges()[l].first);
    const auto j = static_cast<Eigen::Index>(graph.edges()[l].second);
    const double wl = w[static_cast<Eigen::Index>(l)];
    L(i, i) += wl;
    L(j, j) += wl;
    L(i, j) -= wl;
    L(j, i) -= wl;
  }
  return L;
}

/// A(w) = -I - L(w). Weights outside the polytope are accepted so callers
/// can evaluate relaxed or perturbed points.
inline Eigen::MatrixXd assemble_system_matrix(const NetworkGraph& graph, const Eigen::VectorXd& w) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  return -Eigen::MatrixXd::Identity(n, n) - weighted_laplacian(graph, w);
}

inline Eigen::MatrixXd assemble_system_matrix(const NetworkGraph& graph, const WeightVector& w) {
  return assemble_system_matrix(graph, w.values());
}

struct DefinitenessReport {
  bool negative_definite;
  double max_eigenvalue;
};

inline void check_symmetric(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::NonSymmetricInput, std::string(what) + " is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::NonSymmetricInput, std::string(what) + " is not symmetric");
  }
}

inline DefinitenessReport verify_negative_definite(const Eigen::MatrixXd& a) {
  check_symmetric(a, "matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  return {lmax < 0.0, lmax};
}

}  // namespace obsprivacy
