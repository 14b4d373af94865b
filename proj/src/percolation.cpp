#include "percolab/percolation.hpp"

#include <algorithm>
#include <string>

#include "percolab/error.hpp"
#include "percolab/maxflow.hpp"
#include "percolab/union_find.hpp"

namespace percolab {

EdgeLabels assign_uniforms(const GraphWindow& window, std::uint64_t seed,
                           std::uint64_t sample_index) {
  std::vector<double> labels(static_cast<std::size_t>(window.num_edges()));
  for (std::size_t e = 0; e < labels.size(); ++e) labels[e] = edge_label(seed, sample_index, e);
  return EdgeLabels(std::move(labels), seed, sample_index);
}

LazyLabels::LazyLabels(std::size_t edge_count, std::uint64_t seed)
    : values_(edge_count), stamp_(edge_count, 0), seed_(seed) {}

void LazyLabels::reset(std::uint64_t sample_index) noexcept {
  sample_ = sample_index;
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
}

double LazyLabels::operator[](EdgeId e) noexcept {
  if (stamp_[e] != generation_) {
    values_[e] = edge_label(seed_, sample_, static_cast<std::uint64_t>(e));
    stamp_[e] = generation_;
  }
  return values_[e];
}

std::size_t Configuration::count_open() const noexcept {
  return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), std::uint8_t{1}));
}

bool Configuration::subset_of(const Configuration& other) const noexcept {
  if (other.open_.size() != open_.size()) return false;
  for (std::size_t e = 0; e < open_.size(); ++e) {
    if (open_[e] && !other.open_[e]) return false;
  }
  return true;
}

Configuration threshold(const EdgeLabels& labels, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1], got " + std::to_string(p));
  std::vector<std::uint8_t> open(labels.size());
  const auto values = labels.values();
  for (std::size_t e = 0; e < open.size(); ++e) open[e] = values[e] < p;
  return Configuration(std::move(open), p);
}

VertexSet ClusterPartition::members_of(Vertex v) const {
  std::vector<Vertex> out;
  const Vertex r = root[v];
  for (std::size_t u = 0; u < root.size(); ++u) {
    if (root[u] == r) out.push_back(static_cast<Vertex>(u));
  }
  return VertexSet(std::move(out));
}

std::vector<std::uint8_t> ClusterPartition::infinite_mask() const {
  std::vector<std::uint8_t> mask(root.size());
  for (std::size_t v = 0; v < root.size(); ++v) mask[v] = pseudo_infinite[root[v]];
  return mask;
}

ClusterPartition clusters(const GraphWindow& window, const Configuration& config) {
  if (config.size() != static_cast<std::size_t>(window.num_edges())) {
    throw DomainError("configuration does not match window edge count");
  }
  const int n = window.num_vertices();
  UnionFind sets(n);
  for (EdgeId e = 0; e < window.num_edges(); ++e) {
    if (config.is_open(e)) sets.unite(window.edge(e).u, window.edge(e).v);
  }

  ClusterPartition part;
  part.root.resize(n);
  part.size.assign(n, 0);
  part.edge_count.assign(n, 0);
  part.pseudo_infinite.assign(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    const Vertex r = sets.find(v);
    part.root[v] = r;
    ++part.size[r];
    if (window.is_boundary(v)) part.pseudo_infinite[r] = 1;
  }
  // An edge touches one cluster if both endpoints share it, two otherwise.
  for (const Edge& edge : window.edges()) {
    const Vertex ru = part.root[edge.u];
    const Vertex rv = part.root[edge.v];
    ++part.edge_count[ru];
    if (rv != ru) ++part.edge_count[rv];
  }
  return part;
}

long tau(const GraphWindow& window, const VertexSet& a, const VertexSet& b) {
  window.check_members(a);
  window.check_members(b);
  std::vector<std::uint8_t> in_b(window.num_vertices(), 0);
  for (Vertex v : b) in_b[v] = 1;
  long count = 0;
  for (Vertex v : a) {
    if (in_b[v]) throw DomainError("tau requires disjoint sets; vertex " + std::to_string(v) + " in both");
    for (Vertex w : window.neighbors(v)) count += in_b[w];
  }
  return count;
}

RepulsionSample repulsion_statistic(const GraphWindow& window, const EdgeLabels& labels,
                                    double p1, double p2, Vertex v) {
  if (!(p1 > 0.0 && p1 < p2 && p2 < 1.0)) {
    throw DomainError("repulsion statistic needs 0 < p1 < p2 < 1");
  }
  const ClusterPartition upper = clusters(window, threshold(labels, p2));
  const ClusterPartition lower = clusters(window, threshold(labels, p1));
  RepulsionSample out;
  out.finite = !upper.is_pseudo_infinite(v);
  const Vertex r = upper.root_of(v);
  for (Vertex u = 0; u < window.num_vertices(); ++u) {
    if (upper.root[u] != r) continue;
    for (Vertex w : window.neighbors(u)) {
      if (upper.root[w] != r && lower.is_pseudo_infinite(w)) ++out.tau;
    }
  }
  return out;
}

std::vector<std::uint8_t> reachable_off(const GraphWindow& window, const Configuration& config,
                                        const VertexSet& avoid) {
  window.check_members(avoid);
  std::vector<std::uint8_t> blocked(window.num_vertices(), 0);
  for (Vertex v : avoid) blocked[v] = 1;
  std::vector<Vertex> sources;
  for (Vertex b : window.boundary()) {
    if (!blocked[b]) sources.push_back(b);
  }
  ClusterSearch search(window);
  search.run(
      sources, [&](EdgeId e) { return config.is_open(e); },
      [&](Vertex w) { return blocked[w] != 0; }, false);
  std::vector<std::uint8_t> reach(window.num_vertices(), 0);
  for (Vertex v : search.visited()) reach[v] = 1;
  return reach;
}

bool connected_off(const GraphWindow& window, const Configuration& config, Vertex x,
                   const VertexSet& avoid) {
  if (avoid.contains(x)) throw DomainError("connected_off: start vertex lies in the avoided set");
  window.check_members(avoid);
  std::vector<std::uint8_t> blocked(window.num_vertices(), 0);
  for (Vertex v : avoid) blocked[v] = 1;
  ClusterSearch search(window);
  const Vertex start[] = {x};
  return search
      .run(
          start, [&](EdgeId e) { return config.is_open(e); },
          [&](Vertex w) { return blocked[w] != 0; }, true)
      .reached_boundary;
}

VertexSet hull(const GraphWindow& window, const Configuration& config, const VertexSet& set) {
  const ClusterPartition part = clusters(window, config);
  const auto reach = reachable_off(window, config, set);
  std::vector<Vertex> members;
  for (Vertex v = 0; v < window.num_vertices(); ++v) {
    if (part.is_pseudo_infinite(v) && !reach[v]) members.push_back(v);
  }
  return VertexSet(std::move(members));
}

std::vector<OrientedEdge> open_oriented_boundary(const GraphWindow& window,
                                                 const Configuration& config,
                                                 const VertexSet& region) {
  std::vector<OrientedEdge> out;
  if (region.empty()) return out;
  window.check_members(region);
  std::vector<std::uint8_t> in(window.num_vertices(), 0);
  for (Vertex v : region) in[v] = 1;
  for (Vertex v : region) {
    const auto nbrs = window.neighbors(v);
    const auto ids = window.incident_edges(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!in[nbrs[k]] && config.is_open(ids[k])) out.push_back({v, nbrs[k], ids[k]});
    }
  }
  return out;
}

std::vector<OrientedEdge> escaping_boundary_edges(const GraphWindow& window,
                                                  const Configuration& config,
                                                  const VertexSet& set, bool open_only) {
  const auto reach = reachable_off(window, config, set);
  std::vector<OrientedEdge> out;
  for (const OrientedEdge& e : oriented_edge_boundary(window, set)) {
    if (reach[e.head] && (!open_only || config.is_open(e.edge))) out.push_back(e);
  }
  return out;
}

int count_edge_disjoint_paths(const GraphWindow& window, const Configuration& config,
                              const VertexSet& set, int limit) {
  if (set.empty()) throw DomainError("count_edge_disjoint_paths: set must be non-empty");
  window.check_members(set);
  const int n = window.num_vertices();
  const int source = n;
  const int sink = n + 1;
  std::vector<std::uint8_t> in(n, 0);
  for (Vertex v : set) in[v] = 1;

  Dinic flow(n + 2);
  for (EdgeId e = 0; e < window.num_edges(); ++e) {
    const Edge& edge = window.edge(e);
    if (config.is_open(e) && !(in[edge.u] && in[edge.v])) flow.add_edge(edge.u, edge.v, 1, 1);
  }
  for (Vertex v : set) flow.add_edge(source, v, window.degree(v));
  for (Vertex b : window.boundary()) flow.add_edge(b, sink, window.degree(b));
  return static_cast<int>(flow.max_flow(source, sink, limit));
}

}  // namespace percolab
