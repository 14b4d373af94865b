#include "percolab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "percolab/error.hpp"
#include "percolab/rng.hpp"

namespace percolab {

int LocalGraph::local_of(Vertex v) const {
  if (origin.empty()) return (v >= 0 && v < size()) ? v : -1;
  for (std::size_t i = 0; i < origin.size(); ++i) {
    if (origin[i] == v) return static_cast<int>(i);
  }
  return -1;
}

LocalGraph LocalGraph::from_window(const GraphWindow& window, bool ambient_degree) {
  LocalGraph g;
  const int n = window.num_vertices();
  g.adj.resize(n);
  g.degree.resize(n);
  g.origin.resize(n);
  for (Vertex v = 0; v < n; ++v) {
    const auto nbrs = window.neighbors(v);
    g.adj[v].assign(nbrs.begin(), nbrs.end());
    g.degree[v] = ambient_degree ? window.ambient_degree() : window.degree(v);
    g.origin[v] = v;
  }
  return g;
}

LocalGraph LocalGraph::from_cluster(const GraphWindow& window, const Configuration& config,
                                    Vertex v, int max_depth) {
  std::vector<int> index(window.num_vertices(), -1);
  std::vector<int> depth{0};
  LocalGraph g;
  g.origin.push_back(v);
  index[v] = 0;
  for (std::size_t head = 0; head < g.origin.size(); ++head) {
    if (max_depth >= 0 && depth[head] >= max_depth) continue;
    const Vertex u = g.origin[head];
    const auto nbrs = window.neighbors(u);
    const auto ids = window.incident_edges(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!config.is_open(ids[k]) || index[nbrs[k]] >= 0) continue;
      index[nbrs[k]] = static_cast<int>(g.origin.size());
      g.origin.push_back(nbrs[k]);
      depth.push_back(depth[head] + 1);
    }
  }
  g.adj.resize(g.origin.size());
  g.degree.assign(g.origin.size(), 0);
  for (std::size_t i = 0; i < g.origin.size(); ++i) {
    const Vertex u = g.origin[i];
    const auto nbrs = window.neighbors(u);
    const auto ids = window.incident_edges(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (!config.is_open(ids[k])) continue;
      ++g.degree[i];
      if (index[nbrs[k]] >= 0) g.adj[i].push_back(index[nbrs[k]]);
    }
  }
  return g;
}

LocalGraph LocalGraph::from_edges(int vertices, std::span<const std::pair<int, int>> edges) {
  LocalGraph g;
  g.adj.resize(vertices);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices || a == b) {
      throw DomainError("from_edges: invalid edge");
    }
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  }
  g.degree.resize(vertices);
  g.origin.resize(vertices);
  for (int v = 0; v < vertices; ++v) {
    std::sort(g.adj[v].begin(), g.adj[v].end());
    g.degree[v] = static_cast<int>(g.adj[v].size());
    g.origin[v] = v;
  }
  return g;
}

IsoFunction IsoFunction::power(double d_prime) {
  if (!(d_prime >= 1.0)) throw DomainError("power isoperimetric function needs d' >= 1");
  IsoFunction f;
  f.d_prime_ = d_prime;
  return f;
}

IsoFunction IsoFunction::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw DomainError("tabulated isoperimetric function needs points");
  double prev_t = 0.0, prev_phi = 0.0;
  for (auto [t, phi] : points) {
    if (!(t > prev_t) || !(phi > prev_phi)) throw DomainError("tabulated phi must be increasing");
    if (phi > t) throw DomainError("tabulated phi must satisfy phi(t) <= t");
    prev_t = t;
    prev_phi = phi;
  }
  if (points.size() >= 2) {
    const auto& a = points[points.size() - 2];
    const auto& b = points.back();
    if ((b.second - a.second) > (b.first - a.first)) {
      throw DomainError("tabulated phi: last slope must be at most 1");
    }
  }
  IsoFunction f;
  f.d_prime_ = std::numeric_limits<double>::quiet_NaN();
  f.table_ = std::move(points);
  return f;
}

double IsoFunction::operator()(double t) const {
  if (table_.empty()) return std::pow(t, (d_prime_ - 1.0) / d_prime_);
  double t0 = 0.0, f0 = 0.0;
  for (auto [t1, f1] : table_) {
    if (t <= t1) return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
    t0 = t1;
    f0 = f1;
  }
  const auto& a = table_.size() >= 2 ? table_[table_.size() - 2] : std::pair<double, double>{0.0, 0.0};
  const auto& b = table_.back();
  return b.second + (b.second - a.second) / (b.first - a.first) * (t - b.first);
}

std::string IsoFunction::describe() const {
  std::ostringstream out;
  if (table_.empty()) {
    out << "power(" << d_prime_ << ")";
  } else {
    out << "tabulated(" << table_.size() << " points)";
  }
  return out.str();
}

double psi(const IsoFunction& phi, double t) {
  if (!(t > 0.0)) throw DomainError("psi needs t > 0");
  const double value = phi(t);
  if (value > t) throw DomainError("psi needs phi(t) <= t");
  return value / std::log(2.0 * t / value);
}

std::string to_string(Normalization norm) {
  return norm == Normalization::degree_volume ? "degree_volume" : "vertex_count";
}

namespace {

// Connected sets containing the anchor, each produced from a unique parent:
// a child adds one frontier vertex, and frontier vertices skipped by earlier
// siblings are banned below later ones.
template <class Visit>
class ConnectedSetEnumerator {
 public:
  ConnectedSetEnumerator(const LocalGraph& graph, int max_size, Visit& visit)
      : graph_(graph),
        max_size_(max_size),
        visit_(visit),
        in_set_(graph.size(), 0),
        ban_(graph.size(), 0),
        stamp_(graph.size(), 0) {}

  // Vertices flagged in `excluded` never join a set.
  void run(int anchor, const std::vector<std::uint8_t>* excluded = nullptr) {
    if (excluded != nullptr) {
      for (int v = 0; v < graph_.size(); ++v) ban_[v] = (*excluded)[v];
    }
    members_.assign(1, anchor);
    in_set_[anchor] = 1;
    std::vector<int> frontier;
    for (int x : graph_.adj[anchor]) {
      if (!ban_[x]) frontier.push_back(x);
    }
    recurse(frontier);
    in_set_[anchor] = 0;
    members_.clear();
    std::fill(ban_.begin(), ban_.end(), 0);
  }

  void stop() noexcept { stopped_ = true; }

 private:
  const LocalGraph& graph_;
  int max_size_;
  Visit& visit_;
  std::vector<int> members_;
  std::vector<std::uint8_t> in_set_;
  std::vector<int> ban_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t token_ = 0;
  bool stopped_ = false;

  void recurse(const std::vector<int>& frontier) {
    if (!visit_(std::span<const int>(members_), std::span<const std::uint8_t>(in_set_), *this)) return;
    if (stopped_ || static_cast<int>(members_.size()) >= max_size_) return;
    std::vector<int> next;
    for (std::size_t i = 0; i < frontier.size() && !stopped_; ++i) {
      const int u = frontier[i];
      ++token_;
      next.assign(frontier.begin() + static_cast<std::ptrdiff_t>(i) + 1, frontier.end());
      for (int x : next) stamp_[x] = token_;
      members_.push_back(u);
      in_set_[u] = 1;
      for (int x : graph_.adj[u]) {
        if (!in_set_[x] && !ban_[x] && stamp_[x] != token_) {
          stamp_[x] = token_;
          next.push_back(x);
        }
      }
      recurse(next);
      members_.pop_back();
      in_set_[u] = 0;
      ++ban_[u];
    }
    for (int u : frontier) --ban_[u];
  }
};

template <class Visit>
void enumerate_connected(const LocalGraph& graph, int anchor, int max_size, Visit&& visit,
                         const std::vector<std::uint8_t>* excluded = nullptr) {
  ConnectedSetEnumerator<std::remove_reference_t<Visit>> enumerator(graph, max_size, visit);
  enumerator.run(anchor, excluded);
}

void check_anchor(const LocalGraph& graph, int anchor) {
  if (anchor < 0 || anchor >= graph.size()) throw DomainError("anchor vertex not in graph");
}

void check_guard(int max_size) {
  if (max_size < 1) throw DomainError("max_size must be >= 1");
  if (max_size > kMaxEnumerationSize) {
    throw Refusal("refusing to enumerate connected sets of size " + std::to_string(max_size) +
                  ": the number of lattice animals grows exponentially; the limit is " +
                  std::to_string(kMaxEnumerationSize));
  }
}

struct SetMeasure {
  long boundary = 0;
  long volume = 0;
};

SetMeasure measure(const LocalGraph& graph, std::span<const int> members,
                   std::span<const std::uint8_t> in_set) {
  SetMeasure m;
  long internal_twice = 0;
  for (int w : members) {
    m.volume += graph.degree[w];
    for (int x : graph.adj[w]) internal_twice += in_set[x];
  }
  m.boundary = m.volume - internal_twice;
  return m;
}

double ratio_of(const SetMeasure& m, int size, const IsoFunction& phi, Normalization norm) {
  const double scale = norm == Normalization::degree_volume ? phi(static_cast<double>(m.volume))
                                                            : phi(static_cast<double>(size));
  return static_cast<double>(m.boundary) / scale;
}

std::vector<Vertex> to_window(const LocalGraph& graph, std::span<const int> members) {
  std::vector<Vertex> out;
  out.reserve(members.size());
  for (int w : members) out.push_back(graph.origin.empty() ? w : graph.origin[w]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void enumerate_anchored_sets(const LocalGraph& graph, int anchor, int max_size,
                             const std::function<void(std::span<const int>)>& visit) {
  check_anchor(graph, anchor);
  check_guard(max_size);
  enumerate_connected(graph, anchor, max_size,
                      [&](std::span<const int> members, std::span<const std::uint8_t>, auto&) {
                        visit(members);
                        return true;
                      });
}

std::uint64_t count_anchored_sets(const LocalGraph& graph, int anchor, int max_size) {
  std::uint64_t count = 0;
  enumerate_anchored_sets(graph, anchor, max_size, [&](std::span<const int>) { ++count; });
  return count;
}

std::vector<ProfileResult> anchored_profile(const LocalGraph& graph, int anchor,
                                            const IsoFunction& phi, int max_size,
                                            Normalization norm,
                                            const AnnealingOptions* heuristic) {
  check_anchor(graph, anchor);
  check_guard(max_size);
  std::vector<std::optional<ProfileResult>> best(max_size + 1);
  enumerate_connected(graph, anchor, max_size,
                      [&](std::span<const int> members, std::span<const std::uint8_t> in_set, auto&) {
                        const SetMeasure m = measure(graph, members, in_set);
                        const int size = static_cast<int>(members.size());
                        const double ratio = ratio_of(m, size, phi, norm);
                        auto& slot = best[size];
                        if (!slot || ratio < slot->ratio) {
                          slot = ProfileResult{size, to_window(graph, members), ratio,
                                               m.boundary, m.volume, true, norm};
                        }
                        return true;
                      });
  std::vector<ProfileResult> out;
  for (auto& slot : best) {
    if (slot) out.push_back(std::move(*slot));
  }
  if (heuristic != nullptr) {
    for (int size = max_size + 1; size <= heuristic->max_size; ++size) {
      auto result = anneal_anchored(graph, anchor, size, phi, norm, *heuristic);
      if (!result) break;
      out.push_back(std::move(*result));
    }
  }
  return out;
}

std::optional<ProfileResult> anneal_anchored(const LocalGraph& graph, int anchor, int size,
                                             const IsoFunction& phi, Normalization norm,
                                             const AnnealingOptions& options) {
  check_anchor(graph, anchor);
  if (size < 1) throw DomainError("anneal_anchored: size must be >= 1");
  const int n = graph.size();

  std::vector<int> initial{anchor};
  std::vector<std::uint8_t> seen(n, 0);
  seen[anchor] = 1;
  for (std::size_t head = 0; head < initial.size() && static_cast<int>(initial.size()) < size; ++head) {
    for (int x : graph.adj[initial[head]]) {
      if (!seen[x] && static_cast<int>(initial.size()) < size) {
        seen[x] = 1;
        initial.push_back(x);
      }
    }
  }
  if (static_cast<int>(initial.size()) < size) return std::nullopt;

  std::vector<std::uint8_t> in_set(n, 0);
  std::vector<int> members;
  std::vector<int> stack;
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<int> candidates;
  auto evaluate = [&]() {
    return ratio_of(measure(graph, members, in_set), size, phi, norm);
  };
  // Is members \ {removed} connected?
  auto connected_without = [&](int removed) {
    std::fill(reached.begin(), reached.end(), 0);
    stack.assign(1, anchor);
    reached[anchor] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int x : graph.adj[u]) {
        if (in_set[x] && x != removed && !reached[x]) {
          reached[x] = 1;
          ++count;
          stack.push_back(x);
        }
      }
    }
    return count == size - 1;
  };

  std::optional<ProfileResult> best;
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    CounterRng rng(options.seed, StreamDomain::annealing,
                   (static_cast<std::uint64_t>(size) << 16) | static_cast<std::uint64_t>(restart));
    std::fill(in_set.begin(), in_set.end(), 0);
    members = initial;
    for (int w : members) in_set[w] = 1;
    double current = evaluate();
    if (!best || current < best->ratio) {
      const SetMeasure m = measure(graph, members, in_set);
      best = ProfileResult{size, to_window(graph, members), current, m.boundary, m.volume, false, norm};
    }
    double temperature = options.initial_temperature;
    for (long step = 0; step < options.budget && size > 1; ++step, temperature *= options.cooling) {
      const std::size_t slot = 1 + rng.below(members.size() - 1);
      const int removed = members[slot];
      if (!connected_without(removed)) continue;
      candidates.clear();
      for (int w : members) {
        if (w == removed) continue;
        for (int x : graph.adj[w]) {
          if (!in_set[x] && x != removed) candidates.push_back(x);
        }
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      if (candidates.empty()) continue;
      const int added = candidates[rng.below(candidates.size())];

      in_set[removed] = 0;
      in_set[added] = 1;
      members[slot] = added;
      const double proposed = evaluate();
      const double delta = proposed - current;
      if (delta <= 0.0 || rng.uniform() < std::exp(-delta / std::max(temperature, 1e-12))) {
        current = proposed;
        if (current < best->ratio) {
          const SetMeasure m = measure(graph, members, in_set);
          best = ProfileResult{size, to_window(graph, members), current, m.boundary, m.volume, false, norm};
        }
      } else {
        in_set[added] = 0;
        in_set[removed] = 1;
        members[slot] = removed;
      }
    }
  }
  return best;
}

UniformCheck check_uniform_isoperimetry(const LocalGraph& graph, double d, int max_size) {
  if (!(d > 1.0)) throw DomainError("uniform isoperimetry needs d > 1");
  check_guard(max_size);
  const double exponent = (d - 1.0) / d;
  UniformCheck out;
  out.constant = std::numeric_limits<double>::infinity();
  out.min_by_size.assign(max_size, std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> excluded(graph.size(), 0);
  // Each connected set is enumerated once, from its smallest vertex.
  for (int base = 0; base < graph.size(); ++base) {
    enumerate_connected(
        graph, base, max_size,
        [&](std::span<const int> members, std::span<const std::uint8_t> in_set, auto&) {
          ++out.sets_examined;
          const SetMeasure m = measure(graph, members, in_set);
          const double ratio = static_cast<double>(m.boundary) /
                               std::pow(static_cast<double>(m.volume), exponent);
          auto& slot = out.min_by_size[members.size() - 1];
          slot = std::min(slot, ratio);
          if (ratio < out.constant) {
            out.constant = ratio;
            out.witness = to_window(graph, members);
          }
          return true;
        },
        &excluded);
    excluded[base] = 1;
  }
  return out;
}

std::optional<BadSetWitness> bad_set_search(const GraphWindow& window, const Configuration& config,
                                            Vertex v, int n,
                                            const std::function<double(int)>& threshold) {
  if (n < 1) throw DomainError("bad_set_search: n must be >= 1");
  if (n > kMaxBadSetEdges) {
    throw Refusal("refusing bad-set search with n = " + std::to_string(n) +
                  ": enumeration limit is " + std::to_string(kMaxBadSetEdges) + " touching edges");
  }
  const LocalGraph cluster = LocalGraph::from_cluster(window, config, v, n + 1);
  std::vector<int> local(window.num_vertices(), -1);
  for (int i = 0; i < cluster.size(); ++i) local[cluster.origin[i]] = i;

  std::optional<BadSetWitness> found;
  // A connected W has |E(W)| >= |W| - 1, so sets beyond n + 1 vertices
  // cannot touch exactly n edges.
  enumerate_connected(
      cluster, 0, n + 1,
      [&](std::span<const int> members, std::span<const std::uint8_t> in_set, auto& enumerator) {
        long degree_sum = 0, internal_twice = 0;
        for (int w : members) {
          const Vertex u = cluster.origin[w];
          degree_sum += window.degree(u);
          for (Vertex x : window.neighbors(u)) {
            const int lx = local[x];
            internal_twice += (lx >= 0 && in_set[lx]);
          }
        }
        const long touching = degree_sum - internal_twice / 2;
        if (touching > n) return false;
        if (touching == n) {
          const SetMeasure open = measure(cluster, members, in_set);
          const double limit = threshold(static_cast<int>(members.size()));
          if (static_cast<double>(open.boundary) <= limit) {
            found = BadSetWitness{to_window(cluster, members), touching, open.boundary, limit};
            enumerator.stop();
            return false;
          }
        }
        return true;
      });
  return found;
}

std::optional<BadSetWitness> bad_set_search(const GraphWindow& window, const Configuration& config,
                                            Vertex v, int n, double threshold) {
  return bad_set_search(window, config, v, n, [threshold](int) { return threshold; });
}

DimensionFit fit_dimension(std::span<const std::pair<double, double>> tail) {
  std::vector<std::pair<double, double>> pts;
  for (auto [n, minus_log_p] : tail) {
    if (n >= kFitMinN && std::isfinite(minus_log_p) && minus_log_p > 0.0) {
      pts.emplace_back(std::log(n), std::log(minus_log_p));
    }
  }
  if (pts.size() < 5) {
    throw Refusal("unfittable: " + std::to_string(pts.size()) +
                  " usable points with n >= 8 and 0 < p_n < 1 (need 5)");
  }
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0) throw Refusal("unfittable: all points share one n");
  DimensionFit fit;
  fit.points = static_cast<int>(pts.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (auto [x, y] : pts) {
    const double r = y - fit.intercept - fit.slope * x;
    rss += r * r;
  }
  fit.slope_se = std::sqrt(rss / static_cast<double>(pts.size() - 2) / sxx);
  constexpr double kEdge = 1e-9;
  if (!(fit.slope > kEdge && fit.slope < 1.0 - kEdge)) {
    std::ostringstream msg;
    msg << "unfittable: slope " << fit.slope << " (se " << fit.slope_se
        << ") outside (0, 1); d' would be " << (fit.slope >= 1.0 ? "infinite" : "<= 1");
    throw Refusal(msg.str());
  }
  fit.d_prime = 1.0 / (1.0 - fit.slope);
  fit.d_prime_se = fit.slope_se / ((1.0 - fit.slope) * (1.0 - fit.slope));
  return fit;
}

double fit_tail_constant(std::span<const std::pair<double, double>> tail, double exponent) {
  double sxy = 0, sxx = 0;
  for (auto [n, y] : tail) {
    if (!std::isfinite(y)) continue;
    const double x = std::pow(n, exponent);
    sxy += x * y;
    sxx += x * x;
  }
  if (sxx <= 0) throw Refusal("fit_tail_constant: no usable points");
  return sxy / sxx;
}

}  // namespace percolab
