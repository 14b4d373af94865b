#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace percolab {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;

enum class Family { grid, regular_tree, product };

std::string to_string(Family family);

// Parameters of a finite window. `grid` covers hypercubic(d, L) (all sides
// equal) as well as rectangular boxes such as a 2x3 grid.
struct WindowParams {
  Family family = Family::grid;
  std::vector<int> sides;
  int tree_degree = 0;
  int tree_radius = 0;
  std::vector<WindowParams> factors;

  static WindowParams hypercubic(int dim, int side);
  static WindowParams grid(std::vector<int> sides);
  static WindowParams regular_tree(int degree, int radius);
  static WindowParams product(WindowParams first, WindowParams second);

  // Throws ConfigError naming the invalid field.
  void validate() const;
};

struct Edge {
  Vertex u;  // u < v
  Vertex v;
};

struct OrientedEdge {
  Vertex tail;
  Vertex head;
  EdgeId edge;

  friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
  friend auto operator<=>(const OrientedEdge&, const OrientedEdge&) = default;
};

// Sorted, duplicate-free set of window vertices.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::vector<Vertex> members);
  VertexSet(std::initializer_list<Vertex> members)
      : VertexSet(std::vector<Vertex>(members)) {}

  std::span<const Vertex> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(Vertex v) const noexcept;

  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<Vertex> members_;
};

// Finite truncation of an infinite transitive graph. The boundary plays the
// role of infinity. Immutable once built.
class GraphWindow {
 public:
  static GraphWindow build(const WindowParams& params);

  const WindowParams& params() const noexcept { return params_; }
  int num_vertices() const noexcept { return static_cast<int>(adjacency_.size()); }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }

  std::span<const Vertex> neighbors(Vertex v) const noexcept { return adjacency_[v]; }
  // Edge ids parallel to neighbors(v); ascending.
  std::span<const EdgeId> incident_edges(Vertex v) const noexcept { return incident_[v]; }
  int degree(Vertex v) const noexcept { return static_cast<int>(adjacency_[v].size()); }
  // Degree of every vertex of the infinite graph being truncated.
  int ambient_degree() const noexcept { return ambient_degree_; }

  const Edge& edge(EdgeId e) const noexcept { return edges_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  Vertex other_endpoint(EdgeId e, Vertex v) const noexcept {
    return edges_[e].u == v ? edges_[e].v : edges_[e].u;
  }
  std::optional<EdgeId> find_edge(Vertex a, Vertex b) const noexcept;

  bool is_boundary(Vertex v) const noexcept { return is_boundary_[v] != 0; }
  std::span<const Vertex> boundary() const noexcept { return boundary_; }
  // Vertices with a missing neighbour relative to the infinite graph. The
  // designated boundary is always a subset of these.
  bool is_geometric_boundary(Vertex v) const noexcept { return degree(v) < ambient_degree_; }

  // Default origin: the window's centre (tree root, product of centres).
  Vertex center() const noexcept { return center_; }
  // Grid windows only.
  std::vector<int> coords(Vertex v) const;
  Vertex vertex_at(std::span<const int> coords) const;

  VertexSet ball(Vertex center, int radius) const;
  // Graph distance from the set to the nearest boundary vertex (0 if the set
  // meets the boundary, -1 if unreachable).
  int distance_to_boundary(const VertexSet& set) const;
  // Smallest side length (grid), 2*radius (tree), minimum over factors.
  int linear_size() const noexcept;
  // Anchor sets should sit at least this far from the boundary.
  int required_margin() const noexcept { return linear_size() / 4; }

  // Same graph with the designated boundary narrowed to `boundary`, which
  // must be a non-empty subset of the geometric boundary.
  GraphWindow with_boundary(const VertexSet& boundary) const;

  // Throws DomainError when a member is out of range.
  void check_members(const VertexSet& set) const;

 private:
  WindowParams params_;
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> is_boundary_;
  std::vector<Vertex> boundary_;
  int ambient_degree_ = 0;
  Vertex center_ = 0;

  void finalize(std::vector<std::vector<Vertex>> adjacency);
  void set_boundary(const std::vector<std::uint8_t>& flags);
};

// Edges with exactly one endpoint in S.
std::vector<EdgeId> edge_boundary(const GraphWindow& window, const VertexSet& set);
// The same edges oriented from S outward.
std::vector<OrientedEdge> oriented_edge_boundary(const GraphWindow& window, const VertexSet& set);
// Edges with at least one endpoint in S.
std::vector<EdgeId> touching_edges(const GraphWindow& window, const VertexSet& set);
// Edges with both endpoints in S.
std::size_t internal_edge_count(const GraphWindow& window, const VertexSet& set);
// Sum of window degrees over S.
long degree_volume(const GraphWindow& window, const VertexSet& set);
bool is_connected_set(const GraphWindow& window, const VertexSet& set);

}  // namespace percolab
