#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "percolab/error.hpp"
#include "percolab/isoperimetry.hpp"

using namespace percolab;

namespace {

// Connected sets through `anchor` by brute force over all subsets.
std::uint64_t brute_force_count(const LocalGraph& g, int anchor, int max_size) {
  const int n = g.size();
  std::uint64_t count = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!(mask >> anchor & 1u)) continue;
    if (std::popcount(mask) > max_size) continue;
    std::uint32_t seen = 1u << anchor;
    std::vector<int> stack{anchor};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : g.adj[u]) {
        if ((mask >> w & 1u) && !(seen >> w & 1u)) {
          seen |= 1u << w;
          stack.push_back(w);
        }
      }
    }
    count += seen == mask;
  }
  return count;
}

}  // namespace

TEST_CASE("psi values") {
  CHECK(psi(IsoFunction::power(2), 4.0) == doctest::Approx(2.0 / std::log(4.0)));
  CHECK(psi(IsoFunction::power(2), 4.0) == doctest::Approx(1.4427).epsilon(1e-4));
  const auto linear = IsoFunction::tabulated({{1.0, 1.0}});
  for (double t : {1.0, 3.0, 10.0}) CHECK(psi(linear, t) == doctest::Approx(t / std::log(2.0)));
  CHECK_THROWS_AS(psi(IsoFunction::power(2), 0.0), DomainError);
}

TEST_CASE("power functions") {
  CHECK(IsoFunction::power(2)(9.0) == doctest::Approx(3.0));
  CHECK(IsoFunction::power(3)(8.0) == doctest::Approx(4.0));
  CHECK(IsoFunction::power(1)(5.0) == doctest::Approx(1.0));
}

TEST_CASE("anchored enumeration matches brute force") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 4));
  const LocalGraph g = LocalGraph::from_window(w, true);
  for (int anchor : {0, 5}) {
    for (int k = 1; k <= 6; ++k) CHECK(count_anchored_sets(g, anchor, k) == brute_force_count(g, anchor, k));
  }
  const auto t = GraphWindow::build(WindowParams::regular_tree(3, 2));
  const LocalGraph tg = LocalGraph::from_window(t, true);
  for (int k = 1; k <= 7; ++k) CHECK(count_anchored_sets(tg, 0, k) == brute_force_count(tg, 0, k));
}

TEST_CASE("anchored sets on a path") {
  const std::pair<int, int> edges[] = {{0, 1}, {1, 2}};
  const LocalGraph g = LocalGraph::from_edges(3, edges);
  std::set<std::vector<int>> seen;
  enumerate_anchored_sets(g, 0, 3, [&](std::span<const int> m) {
    std::vector<int> v(m.begin(), m.end());
    std::sort(v.begin(), v.end());
    CHECK(seen.insert(v).second);
  });
  CHECK(seen.size() == 3);
  CHECK(count_anchored_sets(g, 1, 3) == 4);
  CHECK_THROWS_AS(count_anchored_sets(g, 0, kMaxEnumerationSize + 1), Refusal);
}

TEST_CASE("anchored profile on a window") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 9));
  const LocalGraph g = LocalGraph::from_window(w, true);
  const int anchor = g.local_of(w.center());
  const auto prof = anchored_profile(g, anchor, IsoFunction::power(2), 5, Normalization::degree_volume);
  REQUIRE(prof.size() == 5);
  CHECK(prof[0].ratio == doctest::Approx(2.0));
  CHECK(prof[0].boundary == 4);
  CHECK(prof[0].volume == 4);
  CHECK(prof[1].boundary == 6);
  for (const auto& r : prof) {
    CHECK(r.exact);
    CHECK(static_cast<int>(r.witness.size()) == r.size);
    CHECK(std::find(r.witness.begin(), r.witness.end(), w.center()) != r.witness.end());
  }

  AnnealingOptions opt;
  opt.budget = 3000;
  opt.restarts = 2;
  const auto annealed = anneal_anchored(g, anchor, 5, IsoFunction::power(2), Normalization::degree_volume, opt);
  REQUIRE(annealed.has_value());
  CHECK(annealed->ratio >= prof[4].ratio - 1e-12);
  CHECK(is_connected_set(w, VertexSet(annealed->witness)));
}

TEST_CASE("uniform isoperimetry on a square window") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 5));
  const LocalGraph g = LocalGraph::from_window(w, true);
  const auto check = check_uniform_isoperimetry(g, 2.0, 4);
  CHECK(check.min_by_size[0] == doctest::Approx(2.0));
  CHECK(check.constant > 0.0);
  CHECK(check.constant <= 2.0);
  CHECK(check.sets_examined > 0);
}

TEST_CASE("bad set search on extreme configurations") {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 9));
  const Vertex v = w.center();
  const Configuration closed(std::vector<std::uint8_t>(w.num_edges(), 0), 0.0);
  CHECK(bad_set_search(w, closed, v, 4, 0.0).has_value());
  CHECK_FALSE(bad_set_search(w, closed, v, 5, 100.0).has_value());

  const Configuration open(std::vector<std::uint8_t>(w.num_edges(), 1), 1.0);
  CHECK_FALSE(bad_set_search(w, open, v, 4, 3.0).has_value());
  const auto hit = bad_set_search(w, open, v, 4, 4.0);
  REQUIRE(hit.has_value());
  CHECK(hit->members.size() == 1);
  CHECK(hit->open_boundary == 4);
  // Two adjacent vertices touch 7 edges with 6 open boundary edges.
  CHECK(bad_set_search(w, open, v, 7, 6.0).has_value());
  CHECK_FALSE(bad_set_search(w, open, v, 7, 5.5).has_value());
  CHECK_THROWS_AS(bad_set_search(w, open, v, kMaxBadSetEdges + 1, 1.0), Refusal);
}

TEST_CASE("dimension fit") {
  std::vector<std::pair<double, double>> sqrt_tail, linear_tail;
  for (double n = 8; n <= 200; n += 8) {
    sqrt_tail.emplace_back(n, std::sqrt(n));
    linear_tail.emplace_back(n, n);
  }
  const auto fit = fit_dimension(sqrt_tail);
  CHECK(fit.slope == doctest::Approx(0.5));
  CHECK(fit.d_prime == doctest::Approx(2.0));
  CHECK_THROWS_AS(fit_dimension(linear_tail), Refusal);
  const std::vector<std::pair<double, double>> few{{8, 2.8}, {9, 3.0}};
  CHECK_THROWS_AS(fit_dimension(few), Refusal);

  std::vector<std::pair<double, double>> scaled;
  for (double n = 1; n <= 10; ++n) scaled.emplace_back(n, 0.3 * std::sqrt(n));
  CHECK(fit_tail_constant(scaled, 0.5) == doctest::Approx(0.3));
}
