#include "percolab/exploration.hpp"

#include <cmath>
#include <functional>
#include <queue>

#include "percolab/error.hpp"

namespace percolab {
namespace {

void check_level(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("exploration needs 0 < p < 1");
}

template <class Compare>
ExplorationTrace explore(const GraphWindow& window, const EdgeLabels& labels, double p,
                         Vertex v, const std::vector<std::uint8_t>* infinite) {
  ExplorationTrace trace;
  trace.start = v;
  trace.p = p;
  if (infinite != nullptr && (*infinite)[v]) {
    trace.started_in_infinite = true;
    trace.stopped = true;
    return trace;
  }
  if (infinite == nullptr && window.is_boundary(v)) return trace;

  std::vector<std::uint8_t> revealed(window.num_vertices(), 0);
  std::vector<std::uint8_t> queried(window.num_edges(), 0);
  std::priority_queue<EdgeId, std::vector<EdgeId>, Compare> frontier;
  auto reveal = [&](Vertex u) {
    revealed[u] = 1;
    for (EdgeId e : window.incident_edges(u)) {
      if (!queried[e]) frontier.push(e);
    }
  };
  reveal(v);

  double sum = 0.0;
  while (!frontier.empty()) {
    const EdgeId e = frontier.top();
    frontier.pop();
    if (queried[e]) continue;
    queried[e] = 1;
    const Edge& edge = window.edge(e);
    if (infinite != nullptr && ((*infinite)[edge.u] || (*infinite)[edge.v])) {
      ++trace.pre_queried;
      continue;
    }
    const bool open = labels[e] < p;
    const double step = open ? 1.0 - p : -p;
    sum += step;
    trace.queried.push_back(e);
    trace.increments.push_back(step);
    trace.partial_sums.push_back(sum);
    if (!open) {
      ++trace.closed_queries;
      continue;
    }
    ++trace.open_queries;
    for (Vertex w : {edge.u, edge.v}) {
      if (revealed[w]) continue;
      reveal(w);
      if (infinite == nullptr && window.is_boundary(w)) return trace;
    }
  }
  trace.stopped = true;
  return trace;
}

}  // namespace

ExplorationTrace explore_cluster(const GraphWindow& window, const EdgeLabels& labels, double p,
                                 Vertex v, EdgeOrder order) {
  check_level(p);
  if (order == EdgeOrder::ascending) return explore<std::greater<EdgeId>>(window, labels, p, v, nullptr);
  return explore<std::less<EdgeId>>(window, labels, p, v, nullptr);
}

ExplorationTrace explore_off_infinity(const GraphWindow& window, const EdgeLabels& labels,
                                      double p, Vertex v, EdgeOrder order) {
  check_level(p);
  return explore_off_infinity(window, labels, p, v, clusters(window, threshold(labels, p)), order);
}

ExplorationTrace explore_off_infinity(const GraphWindow& window, const EdgeLabels& labels,
                                      double p, Vertex v, const ClusterPartition& partition,
                                      EdgeOrder order) {
  check_level(p);
  const auto infinite = partition.infinite_mask();
  if (order == EdgeOrder::ascending) return explore<std::greater<EdgeId>>(window, labels, p, v, &infinite);
  return explore<std::less<EdgeId>>(window, labels, p, v, &infinite);
}

AzumaBound azuma_bound(double p, long n, long m) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("azuma_bound needs 0 < p < 1");
  if (n < 1 || m < 1) throw DomainError("azuma_bound needs n, m >= 1");
  const double nn = static_cast<double>(n);
  const double value = 2.0 * std::exp(-p * p * nn * nn / (8.0 * static_cast<double>(m)));
  return {value, value >= 1.0};
}

}  // namespace percolab
