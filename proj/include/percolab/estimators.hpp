#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "percolab/graph.hpp"
#include "percolab/stats.hpp"

namespace percolab {

struct RunContext {
  std::uint64_t seed = 1;
  std::uint64_t samples = 10000;
  double ci_level = 0.99;
  int workers = 1;
  std::string config_hash;
};

// Empty when S is at least required_margin() away from the boundary.
std::vector<std::string> margin_warnings(const GraphWindow& window, const VertexSet& set);

// Nominal dimension of the infinite graph (infinity for trees).
double nominal_dimension(const WindowParams& params);

// P_p(S not connected to the boundary), one result per p, shared samples.
std::vector<MCResult> est_disconnect_prob(const GraphWindow& window, const VertexSet& set,
                                          std::span<const double> ps, const RunContext& ctx);

// Psi_p(S): mean over samples of #{e in the outward boundary of S : e+ joined
// to the boundary off S}.
std::vector<MCResult> est_psi_sum(const GraphWindow& window, const VertexSet& set,
                                  std::span<const double> ps, const RunContext& ctx);

struct ClusterTail {
  std::vector<MCResult> volume_tail;  // P(n <= |K_v| < inf)
  std::vector<MCResult> edge_count;   // P(|E(K_v)| = n)
  std::uint64_t finite = 0;
  std::uint64_t unstopped = 0;        // samples whose cluster reached the boundary
};

ClusterTail est_cluster_tail(const GraphWindow& window, Vertex v, double p,
                             std::span<const long> n_grid, const RunContext& ctx);

// Sum over v in S of deg(v) * P_v(walk reaches the boundary before returning
// to S). Walkers per vertex; walks still running after max_steps count as
// returns.
MCResult est_capacity(const GraphWindow& window, const VertexSet& set, std::uint64_t walkers,
                      std::uint64_t max_steps, const RunContext& ctx);

// P(|K_{v,p2}| < inf and tau(K_{v,p2}, K_{inf,p1}) >= n).
std::vector<MCResult> est_repulsion_tail(const GraphWindow& window, Vertex v, double p1, double p2,
                                         std::span<const long> n_grid, const RunContext& ctx);

// P_p(I_r(S <-> inf)) = P(at least r + 1 edge-disjoint open paths to the boundary).
std::vector<MCResult> est_ir_prob(const GraphWindow& window, const VertexSet& set, double p,
                                  std::span<const long> r_values, const RunContext& ctx);

// P(|E(K_v)| <= m and tau(K_v, K_inf) >= n) for each (m, n).
std::vector<MCResult> est_azuma_event(const GraphWindow& window, Vertex v, double p,
                                      std::span<const std::pair<long, long>> mn,
                                      const RunContext& ctx);

// Frequency of the bad-set event: some connected W in K_v with v in W,
// |E(W)| = n and |d_p W| <= threshold(|W|).
std::vector<MCResult> est_bad_set(const GraphWindow& window, Vertex v, double p,
                                  std::span<const long> n_grid,
                                  const std::function<double(int)>& threshold,
                                  const RunContext& ctx);

// Mean of Z_{n ^ T} for each n; zero for a martingale.
std::vector<MCResult> est_martingale_mean(const GraphWindow& window, Vertex v, double p,
                                          std::span<const long> n_grid, const RunContext& ctx);

// (1 - theta) * mean / M.
double markov_lower_bound(double mean, double m_bound, double theta);

// 1 - (p2 / (p2 - p1))^r * (1 - connect_p1).
double stability_bound(double p1, double p2, long r, double connect_p1);

// For each r: P_{p2}(I_r) against stability_bound with P_{p1}(S <-> inf)
// estimated on the same samples.
std::vector<BoundVerdict> stability_check(const GraphWindow& window, const VertexSet& set,
                                          double p1, double p2, std::span<const long> r_values,
                                          const RunContext& ctx);

struct DgrsyOptions {
  std::uint64_t walkers = 10000;
  std::uint64_t max_steps = 100000;
  // Level above which the user asserts the inequality applies; NaN when
  // unknown, which makes the check informative only.
  double p0 = kNoValue;
};

// P_p(S not connected) against exp(-Cap(S)/2), Cap taken at its lower
// confidence limit.
BoundVerdict dgrsy_cross_check(const GraphWindow& window, const VertexSet& set, double p,
                               const DgrsyOptions& options, const RunContext& ctx);

struct IdentityTally {
  std::uint64_t samples = 0;
  std::uint64_t finite = 0;
  std::uint64_t failures_primary = 0;
  std::uint64_t failures_secondary = 0;
  std::uint64_t failures_tertiary = 0;
  double max_error = 0.0;

  void merge(const IdentityTally& o) {
    samples += o.samples;
    finite += o.finite;
    failures_primary += o.failures_primary;
    failures_secondary += o.failures_secondary;
    failures_tertiary += o.failures_tertiary;
    max_error = std::max(max_error, o.max_error);
  }
};

// Per sample, on stopped traces: primary counts failures of
// Z_T = (1-p) #open - p #closed, secondary of Z~ - Z = p tau(K_v, K_inf),
// tertiary of Z_T agreeing under the reversed edge order. Tolerance 1e-9.
IdentityTally check_exploration_identities(const GraphWindow& window, Vertex v, double p,
                                           const RunContext& ctx);

// Per sample: primary counts failures of the hull boundary identity (open
// escaping edges of S equal the open outward boundary of the hull), secondary
// of the escaping count >= edge-disjoint path count, tertiary of the
// unfiltered escaping set containing the hull boundary.
IdentityTally check_hull_menger(const GraphWindow& window, const VertexSet& set, double p,
                                const RunContext& ctx);

// Identity tallies as verdicts: violated iff any failure.
BoundVerdict identity_verdict(std::string check, std::uint64_t failures, std::uint64_t samples,
                              const RunContext& ctx);

}  // namespace percolab
