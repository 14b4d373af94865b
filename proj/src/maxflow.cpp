#include "percolab/maxflow.hpp"

#include <algorithm>

namespace percolab {

Dinic::Dinic(int nodes) : adj_(nodes), level_(nodes), next_(nodes), queue_(nodes) {}

void Dinic::add_edge(int a, int b, std::int64_t cap, std::int64_t reverse_cap) {
  adj_[a].push_back({b, static_cast<int>(adj_[b].size()), cap});
  adj_[b].push_back({a, static_cast<int>(adj_[a].size()) - 1, reverse_cap});
}

bool Dinic::build_levels(int source, int sink) {
  std::fill(level_.begin(), level_.end(), -1);
  std::size_t head = 0, tail = 0;
  queue_[tail++] = source;
  level_[source] = 0;
  while (head < tail) {
    const int v = queue_[head++];
    for (const Arc& arc : adj_[v]) {
      if (arc.cap > 0 && level_[arc.to] < 0) {
        level_[arc.to] = level_[v] + 1;
        queue_[tail++] = arc.to;
      }
    }
  }
  return level_[sink] >= 0;
}

std::int64_t Dinic::augment(int v, int sink, std::int64_t pushed) {
  if (v == sink) return pushed;
  for (std::size_t& i = next_[v]; i < adj_[v].size(); ++i) {
    Arc& arc = adj_[v][i];
    if (arc.cap <= 0 || level_[arc.to] != level_[v] + 1) continue;
    const std::int64_t got = augment(arc.to, sink, std::min(pushed, arc.cap));
    if (got > 0) {
      arc.cap -= got;
      adj_[arc.to][arc.rev].cap += got;
      return got;
    }
  }
  return 0;
}

std::int64_t Dinic::max_flow(int source, int sink, std::int64_t limit) {
  std::int64_t flow = 0;
  while (flow < limit && build_levels(source, sink)) {
    std::fill(next_.begin(), next_.end(), 0);
    while (flow < limit) {
      const std::int64_t pushed = augment(source, sink, limit - flow);
      if (pushed == 0) break;
      flow += pushed;
    }
  }
  return flow;
}

}  // namespace percolab
