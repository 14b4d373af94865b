#include "percolab/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "percolab/error.hpp"

namespace percolab {

std::string to_string(Family family) {
  switch (family) {
    case Family::grid: return "grid";
    case Family::regular_tree: return "regular_tree";
    case Family::product: return "product";
  }
  return "unknown";
}

WindowParams WindowParams::hypercubic(int dim, int side) {
  if (dim < 1) throw ConfigError("dim", "hypercubic dimension must be >= 1");
  WindowParams params;
  params.family = Family::grid;
  params.sides.assign(static_cast<std::size_t>(dim), side);
  return params;
}

WindowParams WindowParams::grid(std::vector<int> sides) {
  WindowParams params;
  params.family = Family::grid;
  params.sides = std::move(sides);
  return params;
}

WindowParams WindowParams::regular_tree(int degree, int radius) {
  WindowParams params;
  params.family = Family::regular_tree;
  params.tree_degree = degree;
  params.tree_radius = radius;
  return params;
}

WindowParams WindowParams::product(WindowParams first, WindowParams second) {
  WindowParams params;
  params.family = Family::product;
  params.factors = {std::move(first), std::move(second)};
  return params;
}

void WindowParams::validate() const {
  switch (family) {
    case Family::grid:
      if (sides.empty()) throw ConfigError("dim", "grid dimension must be >= 1");
      for (int side : sides) {
        if (side < 2) throw ConfigError("side", "side length must be >= 2");
      }
      {
        double total = 1;
        for (int side : sides) total *= side;
        if (total > 5e7) throw ConfigError("side", "window exceeds 5e7 vertices");
      }
      break;
    case Family::regular_tree:
      if (tree_degree < 3) throw ConfigError("degree", "tree degree must be >= 3");
      if (tree_radius < 1) throw ConfigError("radius", "tree radius must be >= 1");
      {
        double total = 1, layer = tree_degree;
        for (int k = 1; k <= tree_radius; ++k, layer *= tree_degree - 1) total += layer;
        if (total > 5e7) throw ConfigError("radius", "window exceeds 5e7 vertices");
      }
      break;
    case Family::product:
      if (factors.size() != 2) throw ConfigError("factors", "product needs exactly two factors");
      factors[0].validate();
      factors[1].validate();
      break;
  }
}

VertexSet::VertexSet(std::vector<Vertex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool VertexSet::contains(Vertex v) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), v);
}

namespace {

struct RawGraph {
  std::vector<std::vector<Vertex>> adjacency;
  std::vector<std::uint8_t> boundary;
  int ambient_degree = 0;
  Vertex center = 0;
};

RawGraph build_grid(const std::vector<int>& sides) {
  const int dim = static_cast<int>(sides.size());
  std::vector<long> stride(dim, 1);
  for (int i = 1; i < dim; ++i) stride[i] = stride[i - 1] * sides[i - 1];
  const long count = stride[dim - 1] * sides[dim - 1];

  RawGraph raw;
  raw.adjacency.resize(count);
  raw.boundary.assign(count, 0);
  raw.ambient_degree = 2 * dim;
  std::vector<int> x(dim, 0);
  for (long v = 0; v < count; ++v) {
    long rest = v;
    for (int i = 0; i < dim; ++i) {
      x[i] = static_cast<int>(rest % sides[i]);
      rest /= sides[i];
    }
    auto& nbrs = raw.adjacency[v];
    for (int i = 0; i < dim; ++i) {
      if (x[i] > 0) nbrs.push_back(static_cast<Vertex>(v - stride[i]));
      if (x[i] + 1 < sides[i]) nbrs.push_back(static_cast<Vertex>(v + stride[i]));
      if (x[i] == 0 || x[i] == sides[i] - 1) raw.boundary[v] = 1;
    }
  }
  long center = 0;
  for (int i = 0; i < dim; ++i) center += stride[i] * (sides[i] / 2);
  raw.center = static_cast<Vertex>(center);
  return raw;
}

// Ball of radius R around the root of the r-regular tree; vertices are
// numbered in BFS order so parents precede children.
RawGraph build_tree(int degree, int radius) {
  RawGraph raw;
  raw.ambient_degree = degree;
  raw.adjacency.emplace_back();
  std::vector<int> depth{0};
  std::size_t layer_begin = 0, layer_end = 1;
  for (int level = 1; level <= radius; ++level) {
    for (std::size_t parent = layer_begin; parent < layer_end; ++parent) {
      const int children = parent == 0 ? degree : degree - 1;
      for (int c = 0; c < children; ++c) {
        const auto child = static_cast<Vertex>(raw.adjacency.size());
        raw.adjacency.emplace_back();
        raw.adjacency[parent].push_back(child);
        raw.adjacency[child].push_back(static_cast<Vertex>(parent));
        depth.push_back(level);
      }
    }
    layer_begin = layer_end;
    layer_end = raw.adjacency.size();
  }
  raw.boundary.resize(raw.adjacency.size());
  for (std::size_t v = 0; v < depth.size(); ++v) raw.boundary[v] = depth[v] == radius;
  raw.center = 0;
  return raw;
}

RawGraph build_raw(const WindowParams& params);

RawGraph build_product(const WindowParams& a_params, const WindowParams& b_params) {
  const RawGraph a = build_raw(a_params);
  const RawGraph b = build_raw(b_params);
  const auto na = static_cast<Vertex>(a.adjacency.size());
  const auto nb = static_cast<Vertex>(b.adjacency.size());
  RawGraph raw;
  raw.ambient_degree = a.ambient_degree + b.ambient_degree;
  raw.adjacency.resize(static_cast<std::size_t>(na) * nb);
  raw.boundary.resize(raw.adjacency.size());
  for (Vertex i = 0; i < na; ++i) {
    for (Vertex j = 0; j < nb; ++j) {
      const Vertex v = i * nb + j;
      auto& nbrs = raw.adjacency[v];
      for (Vertex k : a.adjacency[i]) nbrs.push_back(k * nb + j);
      for (Vertex k : b.adjacency[j]) nbrs.push_back(i * nb + k);
      raw.boundary[v] = a.boundary[i] || b.boundary[j];
    }
  }
  raw.center = a.center * nb + b.center;
  return raw;
}

RawGraph build_raw(const WindowParams& params) {
  switch (params.family) {
    case Family::grid: return build_grid(params.sides);
    case Family::regular_tree: return build_tree(params.tree_degree, params.tree_radius);
    case Family::product: return build_product(params.factors[0], params.factors[1]);
  }
  return {};
}

}  // namespace

GraphWindow GraphWindow::build(const WindowParams& params) {
  params.validate();
  RawGraph raw = build_raw(params);
  GraphWindow window;
  window.params_ = params;
  window.ambient_degree_ = raw.ambient_degree;
  window.center_ = raw.center;
  window.finalize(std::move(raw.adjacency));
  window.set_boundary(raw.boundary);
  return window;
}

void GraphWindow::finalize(std::vector<std::vector<Vertex>> adjacency) {
  adjacency_ = std::move(adjacency);
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  // Enumerating (u, v > u) in vertex order yields the lexicographic edge
  // order, and appending ids as we go keeps incident_ parallel to adjacency_.
  incident_.assign(adjacency_.size(), {});
  for (std::size_t v = 0; v < adjacency_.size(); ++v) incident_[v].reserve(adjacency_[v].size());
  for (std::size_t u = 0; u < adjacency_.size(); ++u) {
    for (Vertex v : adjacency_[u]) {
      if (v <= static_cast<Vertex>(u)) continue;
      const auto id = static_cast<EdgeId>(edges_.size());
      edges_.push_back({static_cast<Vertex>(u), v});
      incident_[u].push_back(id);
      incident_[v].push_back(id);
    }
  }
}

void GraphWindow::set_boundary(const std::vector<std::uint8_t>& flags) {
  is_boundary_ = flags;
  boundary_.clear();
  for (std::size_t v = 0; v < flags.size(); ++v) {
    if (flags[v]) boundary_.push_back(static_cast<Vertex>(v));
  }
}

std::optional<EdgeId> GraphWindow::find_edge(Vertex a, Vertex b) const noexcept {
  const auto& nbrs = adjacency_[a];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b);
  if (it == nbrs.end() || *it != b) return std::nullopt;
  return incident_[a][static_cast<std::size_t>(it - nbrs.begin())];
}

std::vector<int> GraphWindow::coords(Vertex v) const {
  if (params_.family != Family::grid) throw DomainError("coords are defined for grid windows only");
  std::vector<int> x(params_.sides.size());
  long rest = v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<int>(rest % params_.sides[i]);
    rest /= params_.sides[i];
  }
  return x;
}

Vertex GraphWindow::vertex_at(std::span<const int> coords) const {
  if (params_.family != Family::grid) throw DomainError("coords are defined for grid windows only");
  if (coords.size() != params_.sides.size()) throw DomainError("coordinate dimension mismatch");
  long v = 0, stride = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] < 0 || coords[i] >= params_.sides[i]) throw DomainError("coordinate outside window");
    v += stride * coords[i];
    stride *= params_.sides[i];
  }
  return static_cast<Vertex>(v);
}

VertexSet GraphWindow::ball(Vertex c, int radius) const {
  if (c < 0 || c >= num_vertices()) throw DomainError("ball centre outside window");
  std::vector<int> dist(adjacency_.size(), -1);
  std::vector<Vertex> members{c};
  dist[c] = 0;
  for (std::size_t head = 0; head < members.size(); ++head) {
    const Vertex u = members[head];
    if (dist[u] == radius) continue;
    for (Vertex w : adjacency_[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        members.push_back(w);
      }
    }
  }
  return VertexSet(std::move(members));
}

int GraphWindow::distance_to_boundary(const VertexSet& set) const {
  std::vector<int> dist(adjacency_.size(), -1);
  std::deque<Vertex> queue;
  for (Vertex v : set) {
    if (is_boundary(v)) return 0;
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : adjacency_[u]) {
      if (dist[w] >= 0) continue;
      dist[w] = dist[u] + 1;
      if (is_boundary(w)) return dist[w];
      queue.push_back(w);
    }
  }
  return -1;
}

namespace {

int linear_size_of(const WindowParams& params) {
  switch (params.family) {
    case Family::grid: return *std::min_element(params.sides.begin(), params.sides.end());
    case Family::regular_tree: return 2 * params.tree_radius;
    case Family::product:
      return std::min(linear_size_of(params.factors[0]), linear_size_of(params.factors[1]));
  }
  return 0;
}

}  // namespace

int GraphWindow::linear_size() const noexcept { return linear_size_of(params_); }

GraphWindow GraphWindow::with_boundary(const VertexSet& boundary) const {
  check_members(boundary);
  if (boundary.empty()) throw DomainError("designated boundary must be non-empty");
  std::vector<std::uint8_t> flags(adjacency_.size(), 0);
  for (Vertex v : boundary) {
    if (!is_geometric_boundary(v)) {
      throw DomainError("boundary vertex " + std::to_string(v) +
                        " has no missing neighbour in the infinite graph");
    }
    flags[v] = 1;
  }
  GraphWindow copy = *this;
  copy.set_boundary(flags);
  return copy;
}

void GraphWindow::check_members(const VertexSet& set) const {
  for (Vertex v : set) {
    if (v < 0 || v >= num_vertices()) {
      throw DomainError("vertex " + std::to_string(v) + " outside window");
    }
  }
}

namespace {

std::vector<std::uint8_t> membership(const GraphWindow& window, const VertexSet& set) {
  if (set.empty()) throw DomainError("vertex set must be non-empty");
  window.check_members(set);
  std::vector<std::uint8_t> in(window.num_vertices(), 0);
  for (Vertex v : set) in[v] = 1;
  return in;
}

}  // namespace

std::vector<EdgeId> edge_boundary(const GraphWindow& window, const VertexSet& set) {
  const auto in = membership(window, set);
  std::vector<EdgeId> out;
  for (Vertex v : set) {
    const auto nbrs = window.neighbors(v);
    const auto ids = window.incident_edges(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!in[nbrs[k]]) out.push_back(ids[k]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<OrientedEdge> oriented_edge_boundary(const GraphWindow& window, const VertexSet& set) {
  const auto in = membership(window, set);
  std::vector<OrientedEdge> out;
  for (Vertex v : set) {
    const auto nbrs = window.neighbors(v);
    const auto ids = window.incident_edges(v);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!in[nbrs[k]]) out.push_back({v, nbrs[k], ids[k]});
    }
  }
  return out;
}

std::vector<EdgeId> touching_edges(const GraphWindow& window, const VertexSet& set) {
  membership(window, set);
  std::vector<EdgeId> out;
  for (Vertex v : set) {
    const auto ids = window.incident_edges(v);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t internal_edge_count(const GraphWindow& window, const VertexSet& set) {
  const auto in = membership(window, set);
  std::size_t count = 0;
  for (Vertex v : set) {
    for (Vertex w : window.neighbors(v)) count += (in[w] && w > v);
  }
  return count;
}

long degree_volume(const GraphWindow& window, const VertexSet& set) {
  window.check_members(set);
  long total = 0;
  for (Vertex v : set) total += window.degree(v);
  return total;
}

bool is_connected_set(const GraphWindow& window, const VertexSet& set) {
  const auto in = membership(window, set);
  std::vector<std::uint8_t> seen(window.num_vertices(), 0);
  std::vector<Vertex> stack{*set.begin()};
  seen[*set.begin()] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : window.neighbors(u)) {
      if (in[w] && !seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == set.size();
}

}  // namespace percolab
