#pragma once

#include <cstdint>
#include <vector>

#include "percolab/graph.hpp"
#include "percolab/percolation.hpp"

namespace percolab {

// Which fixed enumeration of the edges breaks ties between candidate edges.
enum class EdgeOrder { ascending, descending };

// Edge-by-edge exploration of the cluster of `start`. Each query adds
// (1 - p) if the edge is open and -p if it is closed.
struct ExplorationTrace {
  Vertex start = 0;
  double p = 0.0;
  std::vector<EdgeId> queried;
  std::vector<double> increments;
  std::vector<double> partial_sums;
  // True once every edge touching the cluster has been queried. False when
  // the revealed cluster touched the window boundary first ("unstopped").
  bool stopped = false;
  // Off-infinity exploration only: start lies in K_inf, nothing is queried.
  bool started_in_infinite = false;
  long open_queries = 0;
  long closed_queries = 0;
  // Off-infinity exploration only: edges into K_inf, revealed in the first
  // phase and skipped here. Equals tau(K_v, K_inf).
  long pre_queried = 0;

  std::size_t stopping_time() const noexcept { return queried.size(); }
  double final_value() const noexcept { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
  // Z_{n ∧ T}.
  double value_at(std::size_t n) const noexcept {
    if (partial_sums.empty() || n == 0) return 0.0;
    return partial_sums[std::min(n, partial_sums.size()) - 1];
  }
};

ExplorationTrace explore_cluster(const GraphWindow& window, const EdgeLabels& labels, double p,
                                 Vertex v, EdgeOrder order = EdgeOrder::ascending);

// First reveals every pseudo-infinite cluster (no increments), then explores
// the cluster of v inside the complement of K_inf.
ExplorationTrace explore_off_infinity(const GraphWindow& window, const EdgeLabels& labels,
                                      double p, Vertex v, EdgeOrder order = EdgeOrder::ascending);
// Same, reusing a partition already computed at level p.
ExplorationTrace explore_off_infinity(const GraphWindow& window, const EdgeLabels& labels,
                                      double p, Vertex v, const ClusterPartition& partition,
                                      EdgeOrder order = EdgeOrder::ascending);

struct AzumaBound {
  double value = 0.0;
  bool vacuous = false;  // value >= 1
};

// 2 exp(-p^2 n^2 / (8 m)).
AzumaBound azuma_bound(double p, long n, long m);

}  // namespace percolab
