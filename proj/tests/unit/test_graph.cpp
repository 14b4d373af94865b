#include <doctest.h>

#include <algorithm>

#include "percolab/error.hpp"
#include "percolab/graph.hpp"

using namespace percolab;

TEST_CASE("hypercubic window counts") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 3));
  CHECK(w.num_vertices() == 9);
  CHECK(w.num_edges() == 12);
  CHECK(w.boundary().size() == 8);
  CHECK(w.ambient_degree() == 4);
  CHECK(w.degree(w.center()) == 4);
  CHECK_FALSE(w.is_boundary(w.center()));
  CHECK(degree_volume(w, VertexSet([&] {
          std::vector<Vertex> all(9);
          for (int i = 0; i < 9; ++i) all[i] = i;
          return all;
        }())) == 24);

  const auto cube = GraphWindow::build(WindowParams::hypercubic(3, 5));
  CHECK(cube.num_vertices() == 125);
  CHECK(cube.num_edges() == 3 * 4 * 25);
  CHECK(cube.boundary().size() == 125 - 27);
}

TEST_CASE("one-dimensional window") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(1, 2));
  CHECK(w.num_vertices() == 2);
  CHECK(w.num_edges() == 1);
  CHECK(w.boundary().size() == 2);
}

TEST_CASE("regular tree window") {
  const auto t = GraphWindow::build(WindowParams::regular_tree(3, 2));
  CHECK(t.num_vertices() == 10);
  CHECK(t.num_edges() == 9);
  CHECK(t.boundary().size() == 6);
  CHECK(t.degree(t.center()) == 3);
  CHECK(t.ambient_degree() == 3);
}

TEST_CASE("rectangular grid and product windows") {
  const auto g = GraphWindow::build(WindowParams::grid({2, 3}));
  CHECK(g.num_vertices() == 6);
  CHECK(g.num_edges() == 7);
  const auto p = GraphWindow::build(
      WindowParams::product(WindowParams::hypercubic(1, 3), WindowParams::hypercubic(1, 3)));
  CHECK(p.num_vertices() == 9);
  CHECK(p.num_edges() == 12);
  CHECK(p.boundary().size() == 8);
}

TEST_CASE("edge boundary of two adjacent interior vertices") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 9));
  const Vertex c = w.center();
  const Vertex n = w.neighbors(c)[0];
  const VertexSet s({c, n});
  CHECK(edge_boundary(w, s).size() == 6);
  CHECK(touching_edges(w, s).size() == 7);
  CHECK(internal_edge_count(w, s) == 1);
  CHECK(degree_volume(w, s) == 8);
  CHECK(is_connected_set(w, s));
  for (const auto& oe : oriented_edge_boundary(w, s)) {
    CHECK(s.contains(oe.tail));
    CHECK_FALSE(s.contains(oe.head));
  }
}

TEST_CASE("balls and boundary distance") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 9));
  const VertexSet b1 = w.ball(w.center(), 1);
  const VertexSet b2 = w.ball(w.center(), 2);
  CHECK(b1.size() == 5);
  CHECK(b2.size() == 13);
  CHECK(w.distance_to_boundary(VertexSet{w.center()}) == 4);
  CHECK(w.distance_to_boundary(b2) == 2);
  CHECK(w.linear_size() == 9);
  CHECK(w.required_margin() == 2);
}

TEST_CASE("coordinates round trip") {
  const auto w = GraphWindow::build(WindowParams::grid({4, 5, 3}));
  for (Vertex v = 0; v < w.num_vertices(); ++v) {
    const auto c = w.coords(v);
    CHECK(w.vertex_at(c) == v);
  }
}

TEST_CASE("narrowed boundary") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 2));
  CHECK(w.boundary().size() == 4);
  const auto corner = w.with_boundary(VertexSet{3});
  CHECK(corner.boundary().size() == 1);
  CHECK(corner.is_boundary(3));
  CHECK_FALSE(corner.is_boundary(0));
  CHECK_THROWS(w.with_boundary(VertexSet{}));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(GraphWindow::build(WindowParams::hypercubic(2, 0)), ConfigError);
  CHECK_THROWS_AS(GraphWindow::build(WindowParams::regular_tree(1, 2)), ConfigError);
}
