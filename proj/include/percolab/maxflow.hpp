#pragma once

#include <cstdint>
#include <vector>

namespace percolab {

// Dinic's blocking-flow max-flow on integer capacities. On unit-capacity
// networks this runs in O(E sqrt(V)).
class Dinic {
 public:
  explicit Dinic(int nodes);

  // Directed arc a -> b with capacity `cap` (and `reverse_cap` on b -> a,
  // which makes an undirected unit edge a single call with both set to 1).
  void add_edge(int a, int b, std::int64_t cap, std::int64_t reverse_cap = 0);
  // Stops as soon as the flow reaches `limit`.
  std::int64_t max_flow(int source, int sink, std::int64_t limit = INT64_MAX);

 private:
  struct Arc {
    int to;
    int rev;
    std::int64_t cap;
  };
  std::vector<std::vector<Arc>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
  std::vector<int> queue_;

  bool build_levels(int source, int sink);
  std::int64_t augment(int v, int sink, std::int64_t pushed);
};

}  // namespace percolab
