#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "percolab/graph.hpp"

// Brute-force reference values for small windows. Everything here sums
// over all 2^M configurations (or 3^M coupling states) and uses its own
// connectivity code, so it shares nothing with the estimators it checks.
namespace percolab::exact {

inline constexpr int kMaxEdges = 20;
inline constexpr int kMaxCouplingEdges = 12;

struct SmallGraph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<bool> boundary;

  // Throws Refusal when the window has more than kMaxEdges edges.
  static SmallGraph from_window(const GraphWindow& window);
};

double disconnect_prob(const SmallGraph& g, const std::vector<int>& set, double p);
double psi_sum(const SmallGraph& g, const std::vector<int>& set, double p);
// P(n <= |K_v| < inf).
double volume_tail(const SmallGraph& g, int v, double p, long n);
// P(|E(K_v)| = n) counting finite clusters only.
double edge_count_prob(const SmallGraph& g, int v, double p, long n);
// P(|K_{v,p2}| < inf and tau(K_{v,p2}, K_{inf,p1}) >= n) over 3^M states.
double repulsion_tail(const SmallGraph& g, int v, double p1, double p2, long n);
// P(S stays joined to the boundary after deleting any r open edges).
double ir_prob(const SmallGraph& g, const std::vector<int>& set, double p, long r);
// P(|E(K_v)| <= m and tau(K_v, K_inf) >= n), K_v finite.
double azuma_event(const SmallGraph& g, int v, double p, long m, long n);
// P(exists connected open W containing v with |E(W)| = n and open boundary
// <= threshold(|W|)), by listing every vertex subset.
double bad_set_prob(const SmallGraph& g, int v, double p, long n,
                    const std::function<double(int)>& threshold);
// Largest total-variation distance, over values of K_{inf,p1}, between the
// conditional law of p2-states on edges outside K_{inf,p1} and independent
// Bernoulli(p2).
double lemma_tv_distance(const SmallGraph& g, double p1, double p2);

// Capacity with walks absorbed at the boundary, from the harmonic linear
// system (sparse Cholesky). Works on any window size.
double capacity(const GraphWindow& window, const VertexSet& set);

}  // namespace percolab::exact
