#include "vrjp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace vrjp {

Graph::Graph(std::size_t vertex_count, std::vector<WeightedEdge> edges) {
  if (vertex_count == 0) throw ModelError("graph must have at least one vertex");
  for (auto& e : edges) {
    if (e.a >= vertex_count || e.b >= vertex_count) {
      throw ModelError("edge {" + std::to_string(e.a) + "," + std::to_string(e.b) +
                       "} references a vertex out of range");
    }
    if (e.a == e.b) throw ModelError("loop at vertex " + std::to_string(e.a));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ModelError("edge weights must be finite and positive");
    }
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].a == edges[k - 1].a && edges[k].b == edges[k - 1].b) {
      throw ModelError("duplicate edge {" + std::to_string(edges[k].a) + "," +
                       std::to_string(edges[k].b) + "}");
    }
  }
  edges_ = std::move(edges);

  std::vector<std::size_t> degree(vertex_count, 0);
  for (const auto& e : edges_) {
    ++degree[e.a];
    ++degree[e.b];
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) offsets_[v + 1] = offsets_[v] + degree[v];

  std::vector<std::vector<std::pair<Vertex, double>>> rows(vertex_count);
  for (const auto& e : edges_) {
    rows[e.a].emplace_back(e.b, e.weight);
    rows[e.b].emplace_back(e.a, e.weight);
  }
  sources_.reserve(offsets_.back());
  targets_.reserve(offsets_.back());
  weights_.reserve(offsets_.back());
  for (Vertex v = 0; v < vertex_count; ++v) {
    std::sort(rows[v].begin(), rows[v].end());
    for (const auto& [u, w] : rows[v]) {
      sources_.push_back(v);
      targets_.push_back(u);
      weights_.push_back(w);
    }
  }

  // Connectivity from vertex 0.
  std::vector<bool> seen(vertex_count, false);
  std::vector<Vertex> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : neighbors(v)) {
      if (!seen[u]) {
        seen[u] = true;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  if (reached != vertex_count) throw ModelError("graph is not connected");
}

void Graph::check_vertex(Vertex v) const {
  if (v >= vertex_count()) {
    throw ModelError("vertex " + std::to_string(v) + " out of range");
  }
}

bool Graph::operator==(const Graph& other) const {
  if (vertex_count() != other.vertex_count() || edges_.size() != other.edges_.size()) return false;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& x = edges_[k];
    const auto& y = other.edges_[k];
    if (x.a != y.a || x.b != y.b || x.weight != y.weight) return false;
  }
  return true;
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
  check_vertex(v);
  return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::size_t Graph::first_edge_id(Vertex v) const {
  check_vertex(v);
  return offsets_[v];
}

std::optional<std::size_t> Graph::edge_id(Vertex i, Vertex j) const {
  if (i >= vertex_count() || j >= vertex_count()) return std::nullopt;
  auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return std::nullopt;
  return static_cast<std::size_t>(it - targets_.begin());
}

bool Graph::adjacent(Vertex i, Vertex j) const { return edge_id(i, j).has_value(); }

std::size_t Graph::require_edge_id(Vertex i, Vertex j) const {
  auto id = edge_id(i, j);
  if (!id) {
    throw ModelError("vertices " + std::to_string(i) + " and " + std::to_string(j) +
                     " are not adjacent");
  }
  return *id;
}

std::vector<std::pair<Vertex, Vertex>> find_bridges(const Graph& g) {
  // Tarjan low-link, iterative to survive long paths.
  const std::size_t n = g.vertex_count();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(n, unvisited), low(n, 0);
  std::vector<std::pair<Vertex, Vertex>> bridges;
  std::size_t counter = 0;

  struct Frame {
    Vertex v;
    Vertex parent;
    std::size_t next;
  };
  for (Vertex root = 0; root < n; ++root) {
    if (order[root] != unvisited) continue;
    std::vector<Frame> stack{{root, unvisited, 0}};
    order[root] = low[root] = counter++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto nbrs = g.neighbors(f.v);
      if (f.next < nbrs.size()) {
        Vertex u = nbrs[f.next++];
        if (u == f.parent) continue;
        if (order[u] == unvisited) {
          order[u] = low[u] = counter++;
          stack.push_back({u, f.v, 0});
        } else {
          low[f.v] = std::min(low[f.v], order[u]);
        }
      } else {
        Vertex v = f.v, p = f.parent;
        stack.pop_back();
        if (p != unvisited) {
          low[p] = std::min(low[p], low[v]);
          if (low[v] > order[p]) bridges.emplace_back(std::min(p, v), std::max(p, v));
        }
      }
    }
  }
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

BridgeReport validate_strongly_connected(const Graph& g) {
  auto bridges = find_bridges(g);
  BridgeReport report;
  if (!bridges.empty()) {
    report.passed = false;
    report.offending_edge = bridges.front();
  }
  return report;
}

namespace graphs {

Graph complete(std::size_t n, double weight) {
  std::vector<WeightedEdge> edges;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
  return Graph(n, std::move(edges));
}

Graph cycle(std::size_t n, double weight) {
  if (n < 3) throw ModelError("a cycle needs at least three vertices");
  std::vector<WeightedEdge> edges;
  for (Vertex i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
  return Graph(n, std::move(edges));
}

Graph path(std::size_t n, double weight) {
  std::vector<WeightedEdge> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
  return Graph(n, std::move(edges));
}

}  // namespace graphs

}  // namespace vrjp
