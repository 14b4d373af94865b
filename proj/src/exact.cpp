#include "percolab/exact.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "percolab/error.hpp"

namespace percolab::exact {
namespace {

using Mask = std::uint32_t;

// Vertices joined to `seeds` through edges selected by `open`, as flags.
std::vector<char> spread(const SmallGraph& g, const std::vector<char>& seeds,
                         const std::function<bool(int)>& open, const std::vector<char>* avoid = nullptr) {
  std::vector<char> in = seeds;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (!open(static_cast<int>(e))) continue;
      const auto [a, b] = g.edges[e];
      if (avoid && ((*avoid)[a] || (*avoid)[b])) continue;
      if (in[a] != in[b]) {
        in[a] = in[b] = 1;
        changed = true;
      }
    }
  }
  return in;
}

std::vector<char> single(const SmallGraph& g, int v) {
  std::vector<char> s(g.vertices, 0);
  s[v] = 1;
  return s;
}

bool touches_boundary(const SmallGraph& g, const std::vector<char>& in) {
  for (int v = 0; v < g.vertices; ++v) {
    if (in[v] && g.boundary[v]) return true;
  }
  return false;
}

std::vector<char> infinite_part(const SmallGraph& g, const std::function<bool(int)>& open) {
  std::vector<char> seeds(g.vertices, 0);
  for (int v = 0; v < g.vertices; ++v) seeds[v] = g.boundary[v];
  return spread(g, seeds, open);
}

double weight(Mask open, int m, double p) {
  double w = 1.0;
  for (int e = 0; e < m; ++e) w *= (open >> e & 1U) ? p : 1.0 - p;
  return w;
}

template <class F>
double sum_configs(const SmallGraph& g, double p, F&& f) {
  const int m = static_cast<int>(g.edges.size());
  double total = 0.0;
  for (Mask open = 0; open < (Mask{1} << m); ++open) {
    const double w = weight(open, m, p);
    if (w == 0.0) continue;
    total += w * f(open);
  }
  return total;
}

auto opener(Mask open) {
  return [open](int e) { return (open >> e & 1U) != 0; };
}

long touching(const SmallGraph& g, const std::vector<char>& in) {
  long count = 0;
  for (const auto& [a, b] : g.edges) count += in[a] || in[b];
  return count;
}

long between(const SmallGraph& g, const std::vector<char>& x, const std::vector<char>& y) {
  long count = 0;
  for (const auto& [a, b] : g.edges) count += (x[a] && y[b]) || (x[b] && y[a]);
  return count;
}

std::vector<char> set_flags(const SmallGraph& g, const std::vector<int>& set) {
  std::vector<char> in(g.vertices, 0);
  for (int v : set) {
    if (v < 0 || v >= g.vertices) throw DomainError("vertex outside window");
    in[v] = 1;
  }
  return in;
}

}  // namespace

SmallGraph SmallGraph::from_window(const GraphWindow& window) {
  if (window.num_edges() > kMaxEdges) {
    throw Refusal("exact enumeration limited to " + std::to_string(kMaxEdges) + " edges");
  }
  SmallGraph g;
  g.vertices = window.num_vertices();
  for (const Edge& e : window.edges()) g.edges.emplace_back(e.u, e.v);
  for (Vertex v = 0; v < g.vertices; ++v) g.boundary.push_back(window.is_boundary(v));
  return g;
}

double disconnect_prob(const SmallGraph& g, const std::vector<int>& set, double p) {
  const auto seeds = set_flags(g, set);
  return sum_configs(g, p, [&](Mask open) {
    return touches_boundary(g, spread(g, seeds, opener(open))) ? 0.0 : 1.0;
  });
}

double psi_sum(const SmallGraph& g, const std::vector<int>& set, double p) {
  const auto in = set_flags(g, set);
  std::vector<int> heads;
  for (const auto& [a, b] : g.edges) {
    if (in[a] && !in[b]) heads.push_back(b);
    if (in[b] && !in[a]) heads.push_back(a);
  }
  return sum_configs(g, p, [&](Mask open) {
    double count = 0;
    for (int h : heads) count += touches_boundary(g, spread(g, single(g, h), opener(open), &in));
    return count;
  });
}

double volume_tail(const SmallGraph& g, int v, double p, long n) {
  return sum_configs(g, p, [&](Mask open) {
    const auto k = spread(g, single(g, v), opener(open));
    if (touches_boundary(g, k)) return 0.0;
    return std::count(k.begin(), k.end(), 1) >= n ? 1.0 : 0.0;
  });
}

double edge_count_prob(const SmallGraph& g, int v, double p, long n) {
  return sum_configs(g, p, [&](Mask open) {
    const auto k = spread(g, single(g, v), opener(open));
    if (touches_boundary(g, k)) return 0.0;
    return touching(g, k) == n ? 1.0 : 0.0;
  });
}

double repulsion_tail(const SmallGraph& g, int v, double p1, double p2, long n) {
  const int m = static_cast<int>(g.edges.size());
  if (m > kMaxCouplingEdges) throw Refusal("coupling enumeration limited to 12 edges");
  std::vector<int> state(m, 0);
  double total = 0.0;
  long states = 1;
  for (int e = 0; e < m; ++e) states *= 3;
  for (long code = 0; code < states; ++code) {
    long c = code;
    double w = 1.0;
    for (int e = 0; e < m; ++e) {
      state[e] = static_cast<int>(c % 3);
      c /= 3;
      w *= state[e] == 0 ? p1 : state[e] == 1 ? p2 - p1 : 1.0 - p2;
    }
    const auto k = spread(g, single(g, v), [&](int e) { return state[e] <= 1; });
    if (touches_boundary(g, k)) continue;
    const auto inf1 = infinite_part(g, [&](int e) { return state[e] == 0; });
    if (between(g, k, inf1) >= n) total += w;
  }
  return total;
}

double ir_prob(const SmallGraph& g, const std::vector<int>& set, double p, long r) {
  const auto seeds = set_flags(g, set);
  const int m = static_cast<int>(g.edges.size());
  return sum_configs(g, p, [&](Mask open) {
    // Every deletion of at most r open edges must leave S joined.
    for (Mask removed = 0; removed < (Mask{1} << m); ++removed) {
      if ((removed & ~open) != 0 || std::popcount(removed) > r) continue;
      const Mask left = open & ~removed;
      if (!touches_boundary(g, spread(g, seeds, opener(left)))) return 0.0;
    }
    return 1.0;
  });
}

double azuma_event(const SmallGraph& g, int v, double p, long m, long n) {
  return sum_configs(g, p, [&](Mask open) {
    const auto k = spread(g, single(g, v), opener(open));
    if (touches_boundary(g, k) || touching(g, k) > m) return 0.0;
    return between(g, k, infinite_part(g, opener(open))) >= n ? 1.0 : 0.0;
  });
}

double bad_set_prob(const SmallGraph& g, int v, double p, long n,
                    const std::function<double(int)>& threshold) {
  if (g.vertices > 20) throw Refusal("bad-set enumeration limited to 20 vertices");
  return sum_configs(g, p, [&](Mask open) {
    for (Mask w = 0; w < (Mask{1} << g.vertices); ++w) {
      if (!(w >> v & 1U)) continue;
      std::vector<char> in(g.vertices, 0);
      for (int x = 0; x < g.vertices; ++x) in[x] = (w >> x & 1U) != 0;
      // Connected through open edges inside W.
      const auto reached = spread(g, single(g, v), [&](int e) {
        return (open >> e & 1U) && in[g.edges[e].first] && in[g.edges[e].second];
      });
      if (reached != in) continue;
      if (touching(g, in) != n) continue;
      long open_boundary = 0;
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [a, b] = g.edges[e];
        open_boundary += (open >> e & 1U) && (in[a] != in[b]);
      }
      if (static_cast<double>(open_boundary) <= threshold(std::popcount(w))) return 1.0;
    }
    return 0.0;
  });
}

double lemma_tv_distance(const SmallGraph& g, double p1, double p2) {
  const int m = static_cast<int>(g.edges.size());
  if (m > kMaxCouplingEdges) throw Refusal("coupling enumeration limited to 12 edges");
  // For each value of K_inf (as a vertex mask): total probability and the
  // joint law of p2-states on the edges outside it.
  std::map<Mask, std::pair<double, std::map<Mask, double>>> groups;
  std::vector<int> state(m, 0);
  long states = 1;
  for (int e = 0; e < m; ++e) states *= 3;
  for (long code = 0; code < states; ++code) {
    long c = code;
    double w = 1.0;
    for (int e = 0; e < m; ++e) {
      state[e] = static_cast<int>(c % 3);
      c /= 3;
      w *= state[e] == 0 ? p1 : state[e] == 1 ? p2 - p1 : 1.0 - p2;
    }
    const auto inf1 = infinite_part(g, [&](int e) { return state[e] == 0; });
    Mask key = 0;
    for (int x = 0; x < g.vertices; ++x) key |= static_cast<Mask>(inf1[x] ? 1 : 0) << x;
    Mask pattern = 0;
    int bit = 0;
    for (int e = 0; e < m; ++e) {
      const auto [a, b] = g.edges[e];
      if (inf1[a] || inf1[b]) continue;
      pattern |= static_cast<Mask>(state[e] <= 1 ? 1 : 0) << bit++;
    }
    auto& group = groups[key];
    group.first += w;
    group.second[pattern] += w;
  }
  double worst = 0.0;
  for (const auto& [key, group] : groups) {
    std::vector<char> inf1(g.vertices, 0);
    for (int x = 0; x < g.vertices; ++x) inf1[x] = (key >> x & 1U) != 0;
    int free_edges = 0;
    for (const auto& [a, b] : g.edges) free_edges += !(inf1[a] || inf1[b]);
    double tv = 0.0;
    for (Mask pattern = 0; pattern < (Mask{1} << free_edges); ++pattern) {
      const auto it = group.second.find(pattern);
      const double conditional = it == group.second.end() ? 0.0 : it->second / group.first;
      tv += std::abs(conditional - weight(pattern, free_edges, p2));
    }
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

double capacity(const GraphWindow& window, const VertexSet& set) {
  window.check_members(set);
  if (set.empty()) throw DomainError("capacity needs a non-empty set");
  const int n = window.num_vertices();
  std::vector<int> index(n, -1);
  int unknowns = 0;
  for (Vertex x = 0; x < n; ++x) {
    if (!set.contains(x) && !window.is_boundary(x)) index[x] = unknowns++;
  }
  // h(x) = P_x(boundary before S); h = 1 on the boundary outside S, 0 on S.
  auto fixed = [&](Vertex x) { return set.contains(x) ? 0.0 : 1.0; };
  std::vector<double> h(n, 0.0);
  for (Vertex x = 0; x < n; ++x) {
    if (index[x] < 0) h[x] = fixed(x);
  }
  if (unknowns > 0) {
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    for (Vertex x = 0; x < n; ++x) {
      if (index[x] < 0) continue;
      entries.emplace_back(index[x], index[x], static_cast<double>(window.degree(x)));
      for (Vertex y : window.neighbors(x)) {
        if (index[y] >= 0) {
          entries.emplace_back(index[x], index[y], -1.0);
        } else {
          rhs[index[x]] += fixed(y);
        }
      }
    }
    Eigen::SparseMatrix<double> laplacian(unknowns, unknowns);
    laplacian.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(laplacian);
    if (solver.info() != Eigen::Success) throw DomainError("capacity: singular harmonic system");
    const Eigen::VectorXd solution = solver.solve(rhs);
    for (Vertex x = 0; x < n; ++x) {
      if (index[x] >= 0) h[x] = solution[index[x]];
    }
  }
  double cap = 0.0;
  for (Vertex v : set) {
    double escape = 0.0;
    for (Vertex y : window.neighbors(v)) escape += set.contains(y) ? 0.0 : h[y];
    cap += escape;  // deg(v) * (escape / deg(v))
  }
  return cap;
}

}  // namespace percolab::exact
