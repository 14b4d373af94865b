#include "percolab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "percolab/error.hpp"
#include "percolab/exploration.hpp"
#include "percolab/isoperimetry.hpp"
#include "percolab/parallel.hpp"
#include "percolab/percolation.hpp"
#include "percolab/rng.hpp"

namespace percolab {
namespace {

struct Counts {
  std::vector<std::uint64_t> c;
  std::uint64_t total = 0;

  void merge(const Counts& o) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    total += o.total;
  }
};

struct Means {
  std::vector<MeanAccumulator> m;

  void merge(const Means& o) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i].merge(o.m[i]);
  }
};

void check_closed_level(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
}

void check_open_level(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
}

void check_vertex(const GraphWindow& window, Vertex v) {
  if (v < 0 || v >= window.num_vertices()) throw DomainError("vertex outside window");
}

void check_set(const GraphWindow& window, const VertexSet& set) {
  if (set.empty()) throw DomainError("anchor set must be non-empty");
  window.check_members(set);
}

MCResult stamp(MCResult r, const std::string& estimand, const RunContext& ctx) {
  r.estimand = estimand;
  r.seed = ctx.seed;
  r.config_hash = ctx.config_hash;
  return r;
}

std::vector<std::uint8_t> member_mask(const GraphWindow& window, const VertexSet& set) {
  std::vector<std::uint8_t> in(window.num_vertices(), 0);
  for (Vertex v : set) in[v] = 1;
  return in;
}

// Per-thread scratch for lazily labelled searches.
struct LabelWorker {
  LazyLabels labels;
  ClusterSearch search;
  ClusterSearch second;

  LabelWorker(const GraphWindow& window, std::uint64_t seed)
      : labels(static_cast<std::size_t>(window.num_edges()), seed), search(window), second(window) {}
};

// Edges with one endpoint in `members` and the other flagged by `other`.
long count_between(const GraphWindow& window, std::span<const Vertex> members,
                   const ClusterSearch& other) {
  long tau = 0;
  for (Vertex u : members) {
    for (Vertex w : window.neighbors(u)) tau += other.was_visited(w);
  }
  return tau;
}

}  // namespace

std::vector<std::string> margin_warnings(const GraphWindow& window, const VertexSet& set) {
  std::vector<std::string> out;
  const int distance = window.distance_to_boundary(set);
  const int required = window.required_margin();
  if (distance >= 0 && distance < required) {
    std::ostringstream msg;
    msg << "anchor at distance " << distance << " from the boundary; margin " << required
        << " recommended";
    out.push_back(msg.str());
  }
  return out;
}

double nominal_dimension(const WindowParams& params) {
  switch (params.family) {
    case Family::grid: return static_cast<double>(params.sides.size());
    case Family::regular_tree: return std::numeric_limits<double>::infinity();
    case Family::product:
      return nominal_dimension(params.factors[0]) + nominal_dimension(params.factors[1]);
  }
  return 0.0;
}

std::vector<MCResult> est_disconnect_prob(const GraphWindow& window, const VertexSet& set,
                                          std::span<const double> ps, const RunContext& ctx) {
  check_set(window, set);
  for (double p : ps) check_closed_level(p);
  const std::vector<double> levels(ps.begin(), ps.end());
  const auto sources = set.members();
  const Counts total = parallel_reduce<Counts>(
      ctx.samples, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(levels.size())}; },
      [&] {
        return [w = LabelWorker(window, ctx.seed), &levels, sources](std::uint64_t s,
                                                                       Counts& acc) mutable {
          w.labels.reset(s);
          ++acc.total;
          for (std::size_t i = 0; i < levels.size(); ++i) {
            const double p = levels[i];
            const auto r = w.search.run(sources, [&](EdgeId e) { return w.labels[e] < p; }, true);
            acc.c[i] += !r.reached_boundary;
          }
        };
      });
  const auto warnings = margin_warnings(window, set);
  std::vector<MCResult> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    MCResult r = stamp(proportion_result(total.c[i], total.total, ctx.ci_level), "disconnect_prob", ctx);
    r.p = levels[i];
    r.warnings = warnings;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MCResult> est_psi_sum(const GraphWindow& window, const VertexSet& set,
                                  std::span<const double> ps, const RunContext& ctx) {
  check_set(window, set);
  for (double p : ps) check_closed_level(p);
  const std::vector<double> levels(ps.begin(), ps.end());
  const auto blocked = member_mask(window, set);
  std::vector<Vertex> heads;
  for (const OrientedEdge& e : oriented_edge_boundary(window, set)) heads.push_back(e.head);
  const double range = static_cast<double>(heads.size());

  struct Worker {
    LabelWorker w;
    std::vector<std::uint64_t> stamp;
    std::vector<std::uint8_t> escapes;
    std::uint64_t token = 0;
  };
  const Means total = parallel_reduce<Means>(
      ctx.samples, ctx.workers, [&] { return Means{std::vector<MeanAccumulator>(levels.size())}; },
      [&] {
        return [st = Worker{LabelWorker(window, ctx.seed),
                            std::vector<std::uint64_t>(window.num_vertices(), 0),
                            std::vector<std::uint8_t>(window.num_vertices(), 0), 0},
                &levels, &blocked, &heads](std::uint64_t s, Means& acc) mutable {
          st.w.labels.reset(s);
          for (std::size_t i = 0; i < levels.size(); ++i) {
            const double p = levels[i];
            ++st.token;
            long count = 0;
            for (Vertex h : heads) {
              if (st.stamp[h] != st.token) {
                const Vertex start[] = {h};
                const auto r = st.w.search.run(
                    start, [&](EdgeId e) { return st.w.labels[e] < p; },
                    [&](Vertex x) { return blocked[x] != 0; }, true);
                // Every vertex found shares h's cluster off S.
                for (Vertex x : st.w.search.visited()) {
                  st.stamp[x] = st.token;
                  st.escapes[x] = r.reached_boundary;
                }
              }
              count += st.escapes[h];
            }
            acc.m[i].add(static_cast<double>(count));
          }
        };
      });
  const auto warnings = margin_warnings(window, set);
  std::vector<MCResult> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    MCResult r = stamp(mean_result(total.m[i], ctx.ci_level, 0.0, range), "psi_sum", ctx);
    r.p = levels[i];
    r.warnings = warnings;
    out.push_back(std::move(r));
  }
  return out;
}

ClusterTail est_cluster_tail(const GraphWindow& window, Vertex v, double p,
                             std::span<const long> n_grid, const RunContext& ctx) {
  check_vertex(window, v);
  check_closed_level(p);
  long max_n = 0;
  for (long n : n_grid) {
    if (n < 0) throw DomainError("cluster tail: n must be >= 0");
    max_n = std::max(max_n, n);
  }
  const std::size_t bins = static_cast<std::size_t>(max_n) + 2;
  // c[0..bins) sizes (last bin: >= max_n + 1), c[bins..2 bins) edge counts,
  // c[2 bins] unstopped.
  const Counts total = parallel_reduce<Counts>(
      ctx.samples, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(2 * bins + 1)}; },
      [&] {
        return [w = LabelWorker(window, ctx.seed), v, p, bins](std::uint64_t s, Counts& acc) mutable {
          w.labels.reset(s);
          ++acc.total;
          const Vertex start[] = {v};
          const auto r = w.search.run(start, [&](EdgeId e) { return w.labels[e] < p; }, true);
          if (r.reached_boundary) {
            ++acc.c[2 * bins];
            return;
          }
          ++acc.c[std::min<std::size_t>(static_cast<std::size_t>(r.vertices), bins - 1)];
          ++acc.c[bins + std::min<std::size_t>(static_cast<std::size_t>(r.touching_edges), bins - 1)];
        };
      });
  ClusterTail out;
  out.unstopped = total.c[2 * bins];
  out.finite = total.total - out.unstopped;
  const auto warnings = margin_warnings(window, VertexSet{v});
  for (long n : n_grid) {
    std::uint64_t at_least = 0;
    for (std::size_t k = static_cast<std::size_t>(n); k < bins; ++k) at_least += total.c[k];
    MCResult tail = stamp(proportion_result(at_least, total.total, ctx.ci_level), "cluster_tail", ctx);
    tail.p = p;
    tail.n = n;
    tail.warnings = warnings;
    out.volume_tail.push_back(std::move(tail));
    MCResult edges = stamp(proportion_result(total.c[bins + static_cast<std::size_t>(n)], total.total,
                                             ctx.ci_level),
                           "edge_count_exact", ctx);
    edges.p = p;
    edges.n = n;
    edges.warnings = warnings;
    out.edge_count.push_back(std::move(edges));
  }
  return out;
}

MCResult est_capacity(const GraphWindow& window, const VertexSet& set, std::uint64_t walkers,
                      std::uint64_t max_steps, const RunContext& ctx) {
  check_set(window, set);
  if (walkers == 0) throw DomainError("capacity: walkers must be >= 1");
  const auto in_set = member_mask(window, set);
  const std::vector<Vertex> starts(set.begin(), set.end());
  // c[i]: escapes from starts[i]; c[k + i]: walks cut off at max_steps.
  const std::size_t k = starts.size();
  const Counts total = parallel_reduce<Counts>(
      walkers * k, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(2 * k)}; },
      [&] {
        return [&](std::uint64_t id, Counts& acc) {
          const std::size_t i = static_cast<std::size_t>(id / walkers);
          CounterRng rng(ctx.seed, StreamDomain::random_walk, id);
          Vertex x = starts[i];
          ++acc.total;
          for (std::uint64_t step = 0; step < max_steps; ++step) {
            const auto nbrs = window.neighbors(x);
            x = nbrs[rng.below(nbrs.size())];
            if (in_set[x]) return;
            if (window.is_boundary(x)) {
              ++acc.c[i];
              return;
            }
          }
          ++acc.c[k + i];
        };
      });
  MCResult r;
  double variance = 0.0;
  double range = 0.0;
  std::uint64_t cut = 0;
  const double w = static_cast<double>(walkers);
  for (std::size_t i = 0; i < k; ++i) {
    const double deg = window.degree(starts[i]);
    const double q = static_cast<double>(total.c[i]) / w;
    r.estimate += deg * q;
    variance += deg * deg * q * (1.0 - q) / w;
    range += deg;
    cut += total.c[k + i];
  }
  r.std_error = std::sqrt(variance);
  const double half = normal_z(ctx.ci_level) * r.std_error;
  r.ci_low = std::clamp(r.estimate - half, 0.0, range);
  r.ci_high = std::clamp(r.estimate + half, 0.0, range);
  r.samples = total.total;
  r.ci_level = ctx.ci_level;
  r = stamp(std::move(r), "capacity", ctx);
  r.warnings = margin_warnings(window, set);
  if (static_cast<double>(cut) > 0.01 * static_cast<double>(total.total)) {
    std::ostringstream msg;
    msg << cut << " of " << total.total << " walks hit max_steps and were counted as returns";
    r.warnings.push_back(msg.str());
  }
  return r;
}

std::vector<MCResult> est_repulsion_tail(const GraphWindow& window, Vertex v, double p1, double p2,
                                         std::span<const long> n_grid, const RunContext& ctx) {
  check_vertex(window, v);
  if (!(p1 > 0.0 && p1 < p2 && p2 < 1.0)) throw DomainError("repulsion tail needs 0 < p1 < p2 < 1");
  long max_n = 0;
  for (long n : n_grid) {
    if (n < 0) throw DomainError("repulsion tail: n must be >= 0");
    max_n = std::max(max_n, n);
  }
  const std::size_t bins = static_cast<std::size_t>(max_n) + 1;
  const auto boundary = window.boundary();
  // c[t]: finite samples with tau = t (last bin: tau >= max_n).
  const Counts total = parallel_reduce<Counts>(
      ctx.samples, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(bins)}; },
      [&] {
        return [w = LabelWorker(window, ctx.seed), &window, v, p1, p2, bins, boundary](
                   std::uint64_t s, Counts& acc) mutable {
          w.labels.reset(s);
          ++acc.total;
          const Vertex start[] = {v};
          const auto r = w.search.run(start, [&](EdgeId e) { return w.labels[e] < p2; }, true);
          if (r.reached_boundary) return;
          w.second.run(boundary, [&](EdgeId e) { return w.labels[e] < p1; }, false);
          const long tau = count_between(window, w.search.visited(), w.second);
          ++acc.c[std::min<std::size_t>(static_cast<std::size_t>(tau), bins - 1)];
        };
      });
  const auto warnings = margin_warnings(window, VertexSet{v});
  std::vector<MCResult> out;
  for (long n : n_grid) {
    std::uint64_t hits = 0;
    for (std::size_t t = static_cast<std::size_t>(n); t < bins; ++t) hits += total.c[t];
    MCResult r = stamp(proportion_result(hits, total.total, ctx.ci_level), "repulsion_tail", ctx);
    r.p = p1;
    r.p2 = p2;
    r.n = n;
    r.warnings = warnings;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MCResult> est_ir_prob(const GraphWindow& window, const VertexSet& set, double p,
                                  std::span<const long> r_values, const RunContext& ctx) {
  check_set(window, set);
  check_closed_level(p);
  long max_r = 0;
  for (long r : r_values) {
    if (r < 0) throw DomainError("I_r needs r >= 0");
    max_r = std::max(max_r, r);
  }
  const std::vector<long> rs(r_values.begin(), r_values.end());
  const auto sources = set.members();
  const Counts total = parallel_reduce<Counts>(
      ctx.samples, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(rs.size())}; },
      [&] {
        return [w = LabelWorker(window, ctx.seed), &window, &set, &rs, sources, p, max_r,
                seed = ctx.seed](std::uint64_t s, Counts& acc) mutable {
          w.labels.reset(s);
          ++acc.total;
          const auto reach = w.search.run(sources, [&](EdgeId e) { return w.labels[e] < p; }, true);
          if (!reach.reached_boundary) return;
          const Configuration config = threshold(assign_uniforms(window, seed, s), p);
          const int paths = count_edge_disjoint_paths(window, config, set, static_cast<int>(max_r) + 1);
          for (std::size_t i = 0; i < rs.size(); ++i) acc.c[i] += paths >= rs[i] + 1;
        };
      });
  const auto warnings = margin_warnings(window, set);
  std::vector<MCResult> out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    MCResult r = stamp(proportion_result(total.c[i], total.total, ctx.ci_level), "ir_prob", ctx);
    r.p = p;
    r.r = rs[i];
    r.warnings = warnings;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MCResult> est_azuma_event(const GraphWindow& window, Vertex v, double p,
                                      std::span<const std::pair<long, long>> mn,
                                      const RunContext& ctx) {
  check_vertex(window, v);
  check_open_level(p);
  long max_m = 0;
  for (auto [m, n] : mn) {
    if (m < 1 || n < 1) throw DomainError("azuma event needs m, n >= 1");
    max_m = std::max(max_m, m);
  }
  const std::vector<std::pair<long, long>> pairs(mn.begin(), mn.end());
  const auto boundary = window.boundary();
  const Counts total = parallel_reduce<Counts>(
      ctx.samples, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(pairs.size())}; },
      [&] {
        return [w = LabelWorker(window, ctx.seed), &window, &pairs, v, p, max_m, boundary](
                   std::uint64_t s, Counts& acc) mutable {
          w.labels.reset(s);
          ++acc.total;
          const Vertex start[] = {v};
          const auto r = w.search.run(start, [&](EdgeId e) { return w.labels[e] < p; }, true);
          if (r.reached_boundary || r.touching_edges > max_m) return;
          w.second.run(boundary, [&](EdgeId e) { return w.labels[e] < p; }, false);
          const long tau = count_between(window, w.search.visited(), w.second);
          for (std::size_t i = 0; i < pairs.size(); ++i) {
            acc.c[i] += r.touching_edges <= pairs[i].first && tau >= pairs[i].second;
          }
        };
      });
  const auto warnings = margin_warnings(window, VertexSet{v});
  std::vector<MCResult> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    MCResult r = stamp(proportion_result(total.c[i], total.total, ctx.ci_level), "azuma_event", ctx);
    r.p = p;
    r.m = pairs[i].first;
    r.n = pairs[i].second;
    r.warnings = warnings;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MCResult> est_bad_set(const GraphWindow& window, Vertex v, double p,
                                  std::span<const long> n_grid,
                                  const std::function<double(int)>& threshold_fn,
                                  const RunContext& ctx) {
  check_vertex(window, v);
  check_open_level(p);
  for (long n : n_grid) {
    if (n < 1 || n > kMaxBadSetEdges) {
      throw Refusal("bad-set search needs 1 <= n <= " + std::to_string(kMaxBadSetEdges));
    }
  }
  const std::vector<long> ns(n_grid.begin(), n_grid.end());
  const Counts total = parallel_reduce<Counts>(
      ctx.samples, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(ns.size())}; },
      [&] {
        return [&](std::uint64_t s, Counts& acc) {
          ++acc.total;
          const Configuration config = threshold(assign_uniforms(window, ctx.seed, s), p);
          for (std::size_t i = 0; i < ns.size(); ++i) {
            acc.c[i] += bad_set_search(window, config, v, static_cast<int>(ns[i]), threshold_fn).has_value();
          }
        };
      });
  const auto warnings = margin_warnings(window, VertexSet{v});
  std::vector<MCResult> out;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    MCResult r = stamp(proportion_result(total.c[i], total.total, ctx.ci_level), "bad_set", ctx);
    r.p = p;
    r.n = ns[i];
    r.warnings = warnings;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MCResult> est_martingale_mean(const GraphWindow& window, Vertex v, double p,
                                          std::span<const long> n_grid, const RunContext& ctx) {
  check_vertex(window, v);
  check_open_level(p);
  const std::vector<long> ns(n_grid.begin(), n_grid.end());
  const Means total = parallel_reduce<Means>(
      ctx.samples, ctx.workers, [&] { return Means{std::vector<MeanAccumulator>(ns.size())}; },
      [&] {
        return [&](std::uint64_t s, Means& acc) {
          const EdgeLabels labels = assign_uniforms(window, ctx.seed, s);
          const ExplorationTrace trace = explore_cluster(window, labels, p, v);
          for (std::size_t i = 0; i < ns.size(); ++i) {
            acc.m[i].add(trace.value_at(static_cast<std::size_t>(std::max(0L, ns[i]))));
          }
        };
      });
  std::vector<MCResult> out;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    MCResult r = stamp(mean_result(total.m[i], ctx.ci_level, -inf, inf), "martingale_mean", ctx);
    r.p = p;
    r.n = ns[i];
    out.push_back(std::move(r));
  }
  return out;
}

double markov_lower_bound(double mean, double m_bound, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("markov bound needs 0 < theta < 1");
  if (!(m_bound > 0.0)) throw DomainError("markov bound needs M > 0");
  if (!(mean >= 0.0 && mean <= m_bound)) throw DomainError("markov bound needs 0 <= mean <= M");
  return (1.0 - theta) * mean / m_bound;
}

double stability_bound(double p1, double p2, long r, double connect_p1) {
  if (!(p1 > 0.0 && p1 < p2 && p2 <= 1.0)) throw DomainError("stability bound needs 0 < p1 < p2 <= 1");
  if (r < 0) throw DomainError("stability bound needs r >= 0");
  return 1.0 - std::pow(p2 / (p2 - p1), static_cast<double>(r)) * (1.0 - connect_p1);
}

std::vector<BoundVerdict> stability_check(const GraphWindow& window, const VertexSet& set,
                                          double p1, double p2, std::span<const long> r_values,
                                          const RunContext& ctx) {
  check_set(window, set);
  if (!(p1 > 0.0 && p1 < p2 && p2 <= 1.0)) throw DomainError("stability check needs 0 < p1 < p2 <= 1");
  long max_r = 0;
  for (long r : r_values) {
    if (r < 0) throw DomainError("stability check needs r >= 0");
    max_r = std::max(max_r, r);
  }
  const std::vector<long> rs(r_values.begin(), r_values.end());
  const auto sources = set.members();
  // c[0]: S <-> inf at p1; c[1 + i]: I_{r_i} at p2.
  const Counts total = parallel_reduce<Counts>(
      ctx.samples, ctx.workers, [&] { return Counts{std::vector<std::uint64_t>(rs.size() + 1)}; },
      [&] {
        return [w = LabelWorker(window, ctx.seed), &window, &set, &rs, sources, p1, p2, max_r,
                seed = ctx.seed](std::uint64_t s, Counts& acc) mutable {
          w.labels.reset(s);
          ++acc.total;
          acc.c[0] += w.search.run(sources, [&](EdgeId e) { return w.labels[e] < p1; }, true).reached_boundary;
          if (!w.search.run(sources, [&](EdgeId e) { return w.labels[e] < p2; }, true).reached_boundary) return;
          const Configuration config = threshold(assign_uniforms(window, seed, s), p2);
          const int paths = count_edge_disjoint_paths(window, config, set, static_cast<int>(max_r) + 1);
          for (std::size_t i = 0; i < rs.size(); ++i) acc.c[1 + i] += paths >= rs[i] + 1;
        };
      });
  const MCResult connect = proportion_result(total.c[0], total.total, ctx.ci_level);
  const auto warnings = margin_warnings(window, set);
  std::vector<BoundVerdict> out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    MCResult r = stamp(proportion_result(total.c[1 + i], total.total, ctx.ci_level), "ir_prob", ctx);
    r.p = p2;
    r.r = rs[i];
    r.warnings = warnings;
    const double bound = stability_bound(p1, p2, rs[i], connect.estimate);
    BoundVerdict v = check_lower("stability", bound, r, 0.0);
    std::ostringstream note;
    note << "P_p1(S<->inf) estimated " << connect.estimate << " at p1=" << p1;
    v.caveat = note.str();
    out.push_back(std::move(v));
  }
  return out;
}

BoundVerdict dgrsy_cross_check(const GraphWindow& window, const VertexSet& set, double p,
                               const DgrsyOptions& options, const RunContext& ctx) {
  const double levels[] = {p};
  const MCResult disconnect = est_disconnect_prob(window, set, levels, ctx).front();
  const MCResult cap = est_capacity(window, set, options.walkers, options.max_steps, ctx);
  const double bound = std::exp(-0.5 * cap.ci_low);
  BoundVerdict v = check_upper("dgrsy", bound, disconnect, std::numeric_limits<double>::infinity());
  const double d = nominal_dimension(window.params());
  const bool p0_known = !std::isnan(options.p0);
  v.informative = d > 4.0 && p0_known && p >= options.p0;
  std::ostringstream caveat;
  caveat << "Cap(S) estimated " << cap.estimate << " [" << cap.ci_low << ", " << cap.ci_high
         << "]; bound uses the lower limit";
  if (!(d > 4.0)) caveat << "; informative only: dimension " << d << " <= 4";
  if (!p0_known) {
    caveat << "; informative only: p0 unknown";
  } else if (p < options.p0) {
    caveat << "; informative only: p below p0";
  }
  v.caveat = caveat.str();
  return v;
}

IdentityTally check_exploration_identities(const GraphWindow& window, Vertex v, double p,
                                           const RunContext& ctx) {
  check_vertex(window, v);
  check_open_level(p);
  constexpr double kTol = 1e-9;
  return parallel_reduce<IdentityTally>(
      ctx.samples, ctx.workers, [] { return IdentityTally{}; },
      [&] {
        return [&](std::uint64_t s, IdentityTally& acc) {
          ++acc.samples;
          const EdgeLabels labels = assign_uniforms(window, ctx.seed, s);
          const Configuration config = threshold(labels, p);
          const ClusterPartition part = clusters(window, config);
          const ExplorationTrace z = explore_cluster(window, labels, p, v, EdgeOrder::ascending);
          const ExplorationTrace back = explore_cluster(window, labels, p, v, EdgeOrder::descending);
          const ExplorationTrace zt = explore_off_infinity(window, labels, p, v, part);
          const bool finite = !part.is_pseudo_infinite(v);
          if (z.stopped != finite || back.stopped != finite || zt.started_in_infinite == finite) {
            ++acc.failures_primary;
            return;
          }
          if (!finite) return;
          ++acc.finite;

          const VertexSet members = part.members_of(v);
          const auto mask = part.infinite_mask();
          long open_edges = 0, closed_touching = 0, tau = 0;
          for (EdgeId e : touching_edges(window, members)) {
            const Edge& edge = window.edge(e);
            if (config.is_open(e)) {
              ++open_edges;
            } else {
              ++closed_touching;
              tau += mask[edge.u] || mask[edge.v];
            }
          }
          const double expected = (1.0 - p) * static_cast<double>(open_edges) -
                                  p * static_cast<double>(closed_touching);
          const double e1 = std::abs(z.final_value() - expected);
          const double e2 = std::abs(zt.final_value() - z.final_value() - p * static_cast<double>(tau));
          const double e3 = std::abs(back.final_value() - z.final_value());
          acc.failures_primary += e1 > kTol;
          acc.failures_secondary += e2 > kTol || zt.pre_queried != tau;
          acc.failures_tertiary += e3 > kTol;
          acc.max_error = std::max({acc.max_error, e1, e2, e3});
        };
      });
}

IdentityTally check_hull_menger(const GraphWindow& window, const VertexSet& set, double p,
                                const RunContext& ctx) {
  check_set(window, set);
  check_closed_level(p);
  return parallel_reduce<IdentityTally>(
      ctx.samples, ctx.workers, [] { return IdentityTally{}; },
      [&] {
        return [&](std::uint64_t s, IdentityTally& acc) {
          ++acc.samples;
          const Configuration config = threshold(assign_uniforms(window, ctx.seed, s), p);
          const VertexSet gamma = hull(window, config, set);
          auto hull_edges = open_oriented_boundary(window, config, gamma);
          auto escaping_open = escaping_boundary_edges(window, config, set, true);
          auto escaping_all = escaping_boundary_edges(window, config, set, false);
          std::sort(hull_edges.begin(), hull_edges.end());
          std::sort(escaping_open.begin(), escaping_open.end());
          std::sort(escaping_all.begin(), escaping_all.end());
          acc.finite += !gamma.empty();
          acc.failures_primary += hull_edges != escaping_open;
          const int paths = count_edge_disjoint_paths(window, config, set);
          acc.failures_secondary += static_cast<long>(escaping_all.size()) < paths;
          acc.failures_tertiary += !std::includes(escaping_all.begin(), escaping_all.end(),
                                                  hull_edges.begin(), hull_edges.end());
        };
      });
}

BoundVerdict identity_verdict(std::string check, std::uint64_t failures, std::uint64_t samples,
                              const RunContext& ctx) {
  BoundVerdict v;
  v.check = std::move(check);
  v.bound = 0.0;
  v.direction = Direction::upper;
  v.estimate = stamp(proportion_result(failures, samples, ctx.ci_level), "identity_failures", ctx);
  v.slack = -v.estimate.estimate;
  v.verdict = failures > 0 ? Verdict::violated : Verdict::consistent;
  v.caveat = "exact per-sample identity; any failure is a violation";
  return v;
}

}  // namespace percolab
