#pragma once

#include <climits>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "percolab/graph.hpp"
#include "percolab/rng.hpp"

namespace percolab {

// One uniform label per edge. Edge e is p-open iff label(e) < p, which
// realises the monotone coupling of every level p at once.
class EdgeLabels {
 public:
  EdgeLabels(std::vector<double> labels, std::uint64_t seed, std::uint64_t sample_index)
      : labels_(std::move(labels)), seed_(seed), sample_index_(sample_index) {}

  double operator[](EdgeId e) const noexcept { return labels_[e]; }
  std::span<const double> values() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t sample_index() const noexcept { return sample_index_; }

 private:
  std::vector<double> labels_;
  std::uint64_t seed_;
  std::uint64_t sample_index_;
};

EdgeLabels assign_uniforms(const GraphWindow& window, std::uint64_t seed,
                           std::uint64_t sample_index);

// Labels of one sample computed on first access. Agrees bit-for-bit with
// assign_uniforms for the same (seed, sample). Not thread-safe; keep one
// per worker and call reset() between samples.
class LazyLabels {
 public:
  LazyLabels(std::size_t edge_count, std::uint64_t seed);

  void reset(std::uint64_t sample_index) noexcept;
  double operator[](EdgeId e) noexcept;

 private:
  std::vector<double> values_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
  std::uint64_t seed_;
  std::uint64_t sample_ = 0;
};

class Configuration {
 public:
  Configuration(std::vector<std::uint8_t> open, double level)
      : open_(std::move(open)), level_(level) {}

  bool is_open(EdgeId e) const noexcept { return open_[e] != 0; }
  std::span<const std::uint8_t> mask() const noexcept { return open_; }
  std::size_t size() const noexcept { return open_.size(); }
  double level() const noexcept { return level_; }
  std::size_t count_open() const noexcept;
  bool subset_of(const Configuration& other) const noexcept;

 private:
  std::vector<std::uint8_t> open_;
  double level_;
};

// Throws DomainError unless 0 <= p <= 1.
Configuration threshold(const EdgeLabels& labels, double p);

// Per-vertex cluster data; every per-cluster field is indexed by root.
struct ClusterPartition {
  std::vector<Vertex> root;
  std::vector<std::int32_t> size;
  // |E(K)|: edges with at least one endpoint in K, open or closed.
  std::vector<std::int32_t> edge_count;
  std::vector<std::uint8_t> pseudo_infinite;

  Vertex root_of(Vertex v) const noexcept { return root[v]; }
  std::int32_t size_of(Vertex v) const noexcept { return size[root[v]]; }
  std::int32_t edge_count_of(Vertex v) const noexcept { return edge_count[root[v]]; }
  bool is_pseudo_infinite(Vertex v) const noexcept { return pseudo_infinite[root[v]] != 0; }
  VertexSet members_of(Vertex v) const;
  // Vertices of K_inf: union of all clusters touching the boundary.
  std::vector<std::uint8_t> infinite_mask() const;
};

ClusterPartition clusters(const GraphWindow& window, const Configuration& config);

// Number of window edges (open or closed) with one endpoint in each set.
// Throws DomainError when the sets overlap.
long tau(const GraphWindow& window, const VertexSet& a, const VertexSet& b);

struct RepulsionSample {
  bool finite = false;
  long tau = 0;
};

// (finite, tau(K_{v,p2}, K_{inf,p1})) for one coupled sample.
RepulsionSample repulsion_statistic(const GraphWindow& window, const EdgeLabels& labels,
                                    double p1, double p2, Vertex v);

// Mask of vertices joined to the boundary by an open path avoiding S.
std::vector<std::uint8_t> reachable_off(const GraphWindow& window, const Configuration& config,
                                        const VertexSet& avoid);

// Throws DomainError if x is in S.
bool connected_off(const GraphWindow& window, const Configuration& config, Vertex x,
                   const VertexSet& avoid);

// Gamma(S ∩ K_inf): vertices of pseudo-infinite clusters whose every open
// route to the boundary passes through S.
VertexSet hull(const GraphWindow& window, const Configuration& config, const VertexSet& set);

// Open edges leaving `region`, oriented outward.
std::vector<OrientedEdge> open_oriented_boundary(const GraphWindow& window,
                                                 const Configuration& config,
                                                 const VertexSet& region);

// {e in the outward boundary of S : e+ joined to the boundary off S}; with
// open_only, restricted to open edges.
std::vector<OrientedEdge> escaping_boundary_edges(const GraphWindow& window,
                                                  const Configuration& config,
                                                  const VertexSet& set, bool open_only);

// Maximum number of edge-disjoint open paths from S to the boundary
// (unit-capacity max-flow). Stops early once `limit` is reached.
int count_edge_disjoint_paths(const GraphWindow& window, const Configuration& config,
                              const VertexSet& set, int limit = INT_MAX);

// Reusable depth-first search over the open subgraph; buffers are sized
// once per window.
class ClusterSearch {
 public:
  struct Result {
    std::int64_t vertices = 0;
    std::int64_t touching_edges = 0;  // |E(K)|, valid only when the search ran to completion
    bool reached_boundary = false;
  };

  explicit ClusterSearch(const GraphWindow& window)
      : window_(&window), mark_(window.num_vertices(), 0), position_(window.num_vertices(), 0) {
    found_.reserve(window.num_vertices());
    stack_.reserve(window.num_vertices());
  }

  // Explores the union of the open clusters of `sources`. When
  // stop_at_boundary is set the search returns as soon as a boundary
  // vertex is reached. Vertices for which `blocked` returns true are never
  // entered. is_open(EdgeId) decides edge status.
  template <class IsOpen, class Blocked>
  Result run(std::span<const Vertex> sources, IsOpen&& is_open, Blocked&& blocked,
             bool stop_at_boundary) {
    next_generation();
    found_.clear();
    stack_.clear();
    Result result;
    auto discover = [&](Vertex w) {
      mark_[w] = generation_;
      position_[w] = kUnprocessed;
      found_.push_back(w);
      stack_.push_back(w);
      if (window_->is_boundary(w)) result.reached_boundary = true;
    };
    for (Vertex s : sources) {
      if (mark_[s] == generation_) continue;
      discover(s);
      if (result.reached_boundary && stop_at_boundary) {
        result.vertices = static_cast<std::int64_t>(found_.size());
        return result;
      }
    }
    // An edge to an already-found vertex needs no status lookup. It is
    // internal, and counted once: when its later-processed endpoint is
    // popped.
    std::int64_t internal = 0;
    std::int64_t degree_sum = 0;
    std::int32_t processed = 0;
    while (!stack_.empty()) {
      const Vertex u = stack_.back();
      stack_.pop_back();
      position_[u] = processed++;
      const auto nbrs = window_->neighbors(u);
      const auto ids = window_->incident_edges(u);
      degree_sum += static_cast<std::int64_t>(nbrs.size());
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const Vertex w = nbrs[k];
        if (mark_[w] == generation_) {
          internal += position_[w] < position_[u];
          continue;
        }
        if (blocked(w) || !is_open(ids[k])) continue;
        discover(w);
        if (result.reached_boundary && stop_at_boundary) {
          result.vertices = static_cast<std::int64_t>(found_.size());
          return result;
        }
      }
    }
    result.vertices = static_cast<std::int64_t>(found_.size());
    result.touching_edges = degree_sum - internal;
    return result;
  }

  template <class IsOpen>
  Result run(std::span<const Vertex> sources, IsOpen&& is_open, bool stop_at_boundary) {
    return run(sources, std::forward<IsOpen>(is_open), [](Vertex) { return false; },
               stop_at_boundary);
  }

  // Vertices reached by the last run, in discovery order.
  std::span<const Vertex> visited() const noexcept { return found_; }
  bool was_visited(Vertex v) const noexcept { return mark_[v] == generation_; }

 private:
  static constexpr std::int32_t kUnprocessed = INT32_MAX;
  const GraphWindow* window_;
  std::vector<std::uint32_t> mark_;
  std::vector<std::int32_t> position_;
  std::vector<Vertex> found_;
  std::vector<Vertex> stack_;
  std::uint32_t generation_ = 0;

  void next_generation() {
    if (++generation_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      generation_ = 1;
    }
  }
};

}  // namespace percolab
