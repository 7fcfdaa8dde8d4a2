#ifndef VRJP_GRAPH_HPP
#define VRJP_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vrjp {

using Vertex = std::size_t;

/// Thrown when a model, graph or trajectory violates its structural invariants.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WeightedEdge {
  Vertex a;
  Vertex b;
  double weight = 1.0;
};

/**
 * Finite, connected, undirected simple graph with positive edge weights.
 *
 * Adjacency is stored symmetrically in compressed rows with ascending
 * neighbor lists.  Every ordered pair (i, j) with i ~ j gets a dense id in
 * [0, ordered_edge_count()), which rate families use to index their
 * per-edge parameters.
 */
class Graph {
 public:
  Graph(std::size_t vertex_count, std::vector<WeightedEdge> edges);

  std::size_t vertex_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t ordered_edge_count() const { return targets_.size(); }

  /// Ascending neighbors of v.
  std::span<const Vertex> neighbors(Vertex v) const;

  /// Ordered-edge ids of (v, neighbors(v)[k]) are first_edge_id(v) + k.
  std::size_t first_edge_id(Vertex v) const;

  bool adjacent(Vertex i, Vertex j) const;
  std::optional<std::size_t> edge_id(Vertex i, Vertex j) const;
  /// Like edge_id but throws ModelError for non-adjacent pairs.
  std::size_t require_edge_id(Vertex i, Vertex j) const;

  Vertex edge_source(std::size_t id) const { return sources_[id]; }
  Vertex edge_target(std::size_t id) const { return targets_[id]; }
  double weight(std::size_t id) const { return weights_[id]; }
  double weight(Vertex i, Vertex j) const { return weights_[require_edge_id(i, j)]; }

  /// Undirected edges as given (normalized so a < b), in ascending order.
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  void check_vertex(Vertex v) const;

  /// Same vertex count and the same weighted edge set.
  bool operator==(const Graph& other) const;

 private:
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> sources_;
  std::vector<Vertex> targets_;
  std::vector<double> weights_;
};

struct BridgeReport {
  bool passed = true;
  /// One edge lying on no cycle, when the check fails.
  std::optional<std::pair<Vertex, Vertex>> offending_edge;
};

/// Every edge lies on a simple cycle, i.e. the graph has no bridges.
BridgeReport validate_strongly_connected(const Graph& g);

/// All bridges of g, ascending.
std::vector<std::pair<Vertex, Vertex>> find_bridges(const Graph& g);

namespace graphs {
Graph complete(std::size_t n, double weight = 1.0);
Graph cycle(std::size_t n, double weight = 1.0);
Graph path(std::size_t n, double weight = 1.0);
}  // namespace graphs

}  // namespace vrjp

#endif  // VRJP_GRAPH_HPP
