#include <doctest.h>

#include <algorithm>
#include <map>

#include "percolab/error.hpp"
#include "percolab/maxflow.hpp"
#include "percolab/percolation.hpp"
#include "percolab/union_find.hpp"

using namespace percolab;

namespace {

Configuration all_open(const GraphWindow& w) {
  return Configuration(std::vector<std::uint8_t>(w.num_edges(), 1), 1.0);
}

// Open clusters by plain flood fill, as an independent reference.
std::vector<int> flood_labels(const GraphWindow& w, const Configuration& c) {
  std::vector<int> label(w.num_vertices(), -1);
  int next = 0;
  for (Vertex s = 0; s < w.num_vertices(); ++s) {
    if (label[s] >= 0) continue;
    std::vector<Vertex> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      const auto nb = w.neighbors(u);
      const auto ids = w.incident_edges(u);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (c.is_open(ids[k]) && label[nb[k]] < 0) {
          label[nb[k]] = next;
          stack.push_back(nb[k]);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace

TEST_CASE("union find") {
  UnionFind uf(6);
  uf.unite(0, 1);
  uf.unite(2, 3);
  uf.unite(1, 3);
  CHECK(uf.find(0) == uf.find(2));
  CHECK(uf.find(4) != uf.find(0));
  CHECK(uf.size_of_root(uf.find(0)) == 4);
  CHECK(uf.size_of_root(uf.find(5)) == 1);
}

TEST_CASE("dinic on a small network") {
  // Two disjoint routes 0-1-3 and 0-2-3 plus a cross edge.
  Dinic d(4);
  d.add_edge(0, 1, 1, 1);
  d.add_edge(0, 2, 1, 1);
  d.add_edge(1, 3, 1, 1);
  d.add_edge(2, 3, 1, 1);
  d.add_edge(1, 2, 1, 1);
  CHECK(d.max_flow(0, 3) == 2);
  Dinic e(3);
  e.add_edge(0, 1, 5);
  e.add_edge(1, 2, 3);
  CHECK(e.max_flow(0, 2, 2) == 2);
}

TEST_CASE("labels and lazy labels agree") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 6));
  LazyLabels lazy(w.num_edges(), 5);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const EdgeLabels labels = assign_uniforms(w, 5, s);
    lazy.reset(s);
    for (EdgeId e = w.num_edges() - 1; e >= 0; --e) CHECK(lazy[e] == labels[e]);
  }
}

TEST_CASE("threshold is monotone in p") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 16));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const EdgeLabels labels = assign_uniforms(w, 2, s);
    const auto a = threshold(labels, 0.3);
    const auto b = threshold(labels, 0.6);
    CHECK(a.subset_of(b));
    CHECK(a.count_open() <= b.count_open());
  }
  const EdgeLabels labels = assign_uniforms(w, 2, 0);
  CHECK(threshold(labels, 0.0).count_open() == 0);
  CHECK(threshold(labels, 1.0).count_open() == static_cast<std::size_t>(w.num_edges()));
  CHECK_THROWS_AS(threshold(labels, 1.5), DomainError);
}

TEST_CASE("cluster partition matches flood fill") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 12));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto c = threshold(assign_uniforms(w, 4, s), 0.5);
    const auto part = clusters(w, c);
    const auto ref = flood_labels(w, c);
    std::map<int, int> sizes;
    for (int l : ref) ++sizes[l];
    for (Vertex v = 0; v < w.num_vertices(); ++v) {
      CHECK(part.size_of(v) == sizes[ref[v]]);
      bool touches = false;
      for (Vertex u = 0; u < w.num_vertices(); ++u) touches = touches || (ref[u] == ref[v] && w.is_boundary(u));
      CHECK(part.is_pseudo_infinite(v) == touches);
      const VertexSet members = part.members_of(v);
      CHECK(static_cast<long>(touching_edges(w, members).size()) == part.edge_count_of(v));
    }
  }
}

TEST_CASE("cluster search agrees with the partition") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 10));
  ClusterSearch search(w);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto c = threshold(assign_uniforms(w, 8, s), 0.45);
    const auto part = clusters(w, c);
    const Vertex v = w.center();
    const Vertex src[] = {v};
    const auto r = search.run(std::span<const Vertex>(src), [&](EdgeId e) { return c.is_open(e); }, false);
    CHECK(r.vertices == part.size_of(v));
    CHECK(r.touching_edges == part.edge_count_of(v));
    CHECK(r.reached_boundary == part.is_pseudo_infinite(v));
  }
}

TEST_CASE("single open path has two touching edges in its cluster") {
  // Path a - b - c with both edges open: |E(K_a)| = 2.
  const auto w = GraphWindow::build(WindowParams::hypercubic(1, 3));
  const auto part = clusters(w, all_open(w));
  CHECK(part.size_of(0) == 3);
  CHECK(part.edge_count_of(0) == 2);
}

TEST_CASE("tau counts edges between sets") {
  // Column x = 0 against column x = 1 in a 3x3 box: three edges.
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 3));
  std::vector<Vertex> a, b;
  for (int y = 0; y < 3; ++y) {
    const int ca[] = {0, y};
    const int cb[] = {1, y};
    a.push_back(w.vertex_at(ca));
    b.push_back(w.vertex_at(cb));
  }
  CHECK(tau(w, VertexSet(a), VertexSet(b)) == 3);
  CHECK_THROWS_AS(tau(w, VertexSet(a), VertexSet(a)), DomainError);
}

TEST_CASE("fully open window") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 5));
  const auto c = all_open(w);
  const VertexSet s{w.center()};
  CHECK(count_edge_disjoint_paths(w, c, s) == 4);
  CHECK(count_edge_disjoint_paths(w, c, s, 2) == 2);
  CHECK(escaping_boundary_edges(w, c, s, true).size() == 4);
  CHECK(hull(w, c, s).size() == 1);
  const auto part = clusters(w, c);
  CHECK(part.is_pseudo_infinite(w.center()));
}

TEST_CASE("hull identity and path bound on random samples") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 14));
  const VertexSet s = w.ball(w.center(), 2);
  for (double p : {0.55, 0.7}) {
    for (std::uint64_t k = 0; k < 50; ++k) {
      const auto c = threshold(assign_uniforms(w, 6, k), p);
      auto escaping = escaping_boundary_edges(w, c, s, true);
      auto boundary = open_oriented_boundary(w, c, hull(w, c, s));
      std::sort(escaping.begin(), escaping.end());
      std::sort(boundary.begin(), boundary.end());
      CHECK(escaping == boundary);
      const auto all = escaping_boundary_edges(w, c, s, false);
      CHECK(static_cast<int>(all.size()) >= count_edge_disjoint_paths(w, c, s));
    }
  }
}

TEST_CASE("repulsion statistic matches a direct computation") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 13));
  const Vertex v = w.center();
  for (std::uint64_t k = 0; k < 30; ++k) {
    const EdgeLabels labels = assign_uniforms(w, 1, k);
    const auto r = repulsion_statistic(w, labels, 0.5, 0.65, v);
    const auto hi = clusters(w, threshold(labels, 0.65));
    CHECK(r.finite == !hi.is_pseudo_infinite(v));
    if (!r.finite) continue;
    const auto mask = clusters(w, threshold(labels, 0.5)).infinite_mask();
    std::vector<Vertex> inf;
    for (Vertex u = 0; u < w.num_vertices(); ++u) {
      if (mask[u]) inf.push_back(u);
    }
    // K_{v,p2} is finite, so it avoids K_{inf,p1}.
    CHECK(r.tau == tau(w, hi.members_of(v), VertexSet(inf)));
  }
  const EdgeLabels labels = assign_uniforms(w, 1, 0);
  CHECK_THROWS_AS(repulsion_statistic(w, labels, 0.7, 0.5, v), DomainError);
}
