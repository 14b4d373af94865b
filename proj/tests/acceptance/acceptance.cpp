// Acceptance run: one PASS/FAIL line per criterion. `--only N` runs a single
// criterion (criterion 10 then measures its own tail fit first).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "percolab/error.hpp"
#include "percolab/estimators.hpp"
#include "percolab/exact.hpp"
#include "percolab/exploration.hpp"
#include "percolab/harness.hpp"
#include "percolab/isoperimetry.hpp"
#include "percolab/percolation.hpp"
#include "percolab/rng.hpp"

using namespace percolab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeeds[] = {1, 2, 3};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

RunContext context(std::uint64_t samples, std::uint64_t seed = 1) {
  RunContext ctx;
  ctx.samples = samples;
  ctx.seed = seed;
  ctx.workers = workers();
  return ctx;
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream out;
  out << std::setprecision(precision) << x;
  return out.str();
}

// Criterion 1.
Outcome coupling_monotonicity() {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 64));
  const int instances = 10000;
  int bad = 0;
  for (int i = 0; i < instances; ++i) {
    CounterRng rng(1, StreamDomain::property_tests, static_cast<std::uint64_t>(i));
    double p1 = rng.uniform();
    double p2 = rng.uniform();
    if (p1 > p2) std::swap(p1, p2);
    const EdgeLabels labels = assign_uniforms(w, 1, static_cast<std::uint64_t>(i));
    const Configuration lo = threshold(labels, p1);
    const Configuration hi = threshold(labels, p2);
    bool ok = true;
    for (EdgeId e = 0; e < w.num_edges(); ++e) ok = ok && (!lo.is_open(e) || hi.is_open(e));
    bad += !ok;
  }
  return {bad == 0, std::to_string(instances) + " instances, " + std::to_string(bad) + " with a p1-open edge closed at p2"};
}

// Criterion 2. One parameter point per estimator, fixed in advance.
Outcome exhaustive_oracles() {
  struct Case {
    std::string name;
    GraphWindow window;
  };
  const auto square = GraphWindow::build(WindowParams::hypercubic(2, 2));
  const auto rect = GraphWindow::build(WindowParams::grid({2, 3}));
  const std::vector<Case> cases = {
      {"hypercubic(2,2)", square.with_boundary(VertexSet{square.num_vertices() - 1})},
      {"grid(2x3)", rect.with_boundary(VertexSet{rect.num_vertices() - 1})},
  };
  const Vertex v = 0;
  const VertexSet s{v};
  const std::vector<int> sv{v};
  const std::uint64_t samples = 100000;
  int comparisons = 0;
  std::vector<std::string> misses;
  double worst_tv = 0.0;

  for (const Case& c : cases) {
    const auto g = exact::SmallGraph::from_window(c.window);
    worst_tv = std::max(worst_tv, exact::lemma_tv_distance(g, 0.4, 0.7));
    const long m_all = c.window.num_edges();
    const auto threshold_fn = [](int size) { return 0.25 * psi(IsoFunction::power(2), size); };
    for (std::uint64_t seed : kSeeds) {
      const RunContext ctx = context(samples, seed);
      std::vector<std::pair<MCResult, double>> pairs;
      const double half[] = {0.5};
      pairs.emplace_back(est_disconnect_prob(c.window, s, half, ctx)[0], exact::disconnect_prob(g, sv, 0.5));
      pairs.emplace_back(est_psi_sum(c.window, s, half, ctx)[0], exact::psi_sum(g, sv, 0.5));
      const long n2[] = {2};
      const long n3[] = {3};
      const ClusterTail vol = est_cluster_tail(c.window, v, 0.5, n2, ctx);
      pairs.emplace_back(vol.volume_tail[0], exact::volume_tail(g, v, 0.5, 2));
      const ClusterTail edges = est_cluster_tail(c.window, v, 0.5, n3, ctx);
      pairs.emplace_back(edges.edge_count[0], exact::edge_count_prob(g, v, 0.5, 3));
      const long n1[] = {1};
      pairs.emplace_back(est_repulsion_tail(c.window, v, 0.4, 0.7, n1, ctx)[0], exact::repulsion_tail(g, v, 0.4, 0.7, 1));
      const long r1[] = {1};
      pairs.emplace_back(est_ir_prob(c.window, s, 0.6, r1, ctx)[0], exact::ir_prob(g, sv, 0.6, 1));
      const std::pair<long, long> mn[] = {{m_all, 1}};
      pairs.emplace_back(est_azuma_event(c.window, v, 0.5, mn, ctx)[0], exact::azuma_event(g, v, 0.5, m_all, 1));
      const long n_bad[] = {c.window.degree(v)};
      pairs.emplace_back(est_bad_set(c.window, v, 0.5, n_bad, threshold_fn, ctx)[0],
                         exact::bad_set_prob(g, v, 0.5, n_bad[0], threshold_fn));
      pairs.emplace_back(est_capacity(c.window, s, samples, 100000, ctx), exact::capacity(c.window, s));
      for (const auto& [mc, exact_value] : pairs) {
        ++comparisons;
        if (check_exact(mc.estimand, exact_value, mc).verdict == Verdict::violated) {
          misses.push_back(c.name + " seed " + std::to_string(seed) + " " + mc.estimand + ": exact " +
                           fmt(exact_value, 6) + " outside [" + fmt(mc.ci_low, 6) + ", " + fmt(mc.ci_high, 6) + "]");
        }
      }
    }
  }
  std::string detail = std::to_string(comparisons) + " comparisons at 99% CI, " + std::to_string(misses.size()) +
                       " outside; conditional-law TV " + fmt(worst_tv, 3);
  for (const auto& m : misses) detail += "; " + m;
  return {misses.empty() && worst_tv < 1e-10, detail};
}

// Criterion 3.
Outcome repulsion_bound() {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 64));
  std::vector<long> ns;
  for (long n = 1; n <= 10; ++n) ns.push_back(n);
  const auto rows = est_repulsion_tail(w, w.center(), 0.55, 0.70, ns, context(100000));
  bool pass = true;
  double worst = -1e9;
  for (const MCResult& r : rows) {
    const double bound = std::pow(0.30 / 0.45, static_cast<double>(r.n));
    const double excess = r.estimate - (bound + 3.0 * r.std_error);
    worst = std::max(worst, excess);
    pass = pass && excess <= 0.0;
  }
  return {pass, "n = 1..10, largest estimate - (bound + 3 SE) = " + fmt(worst) + ", P(finite, tau >= 1) = " +
                    fmt(rows[0].estimate)};
}

// Criterion 4.
Outcome azuma_bound_check() {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 64));
  const double p = 0.6;
  std::vector<std::pair<long, long>> pairs;
  for (long m : {10L, 20L, 40L, 80L, 160L}) {
    for (long n : {5L, 10L, 20L, 30L, 40L, 60L, 80L}) {
      if (azuma_bound(p, n, m).value < 1.0) pairs.emplace_back(m, n);
    }
  }
  const auto rows = est_azuma_event(w, w.center(), p, pairs, context(100000));
  bool pass = true;
  double worst = -1e9;
  for (const MCResult& r : rows) {
    const double excess = r.estimate - (azuma_bound(p, r.n, r.m).value + 3.0 * r.std_error);
    worst = std::max(worst, excess);
    pass = pass && excess <= 0.0;
  }
  return {pass, std::to_string(pairs.size()) + " (m, n) pairs with bound < 1, largest estimate - (bound + 3 SE) = " +
                    fmt(worst)};
}

// Criterion 5.
Outcome exploration_identities() {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 64));
  const IdentityTally t = check_exploration_identities(w, w.center(), 0.6, context(10000));
  const bool pass = t.failures_primary == 0 && t.failures_secondary == 0 && t.failures_tertiary == 0 && t.samples == 10000;
  return {pass, std::to_string(t.samples) + " samples (" + std::to_string(t.finite) + " finite), failures " +
                    std::to_string(t.failures_primary) + "/" + std::to_string(t.failures_secondary) + "/" +
                    std::to_string(t.failures_tertiary) + ", max error " + fmt(t.max_error, 3)};
}

// Criterion 6.
Outcome hull_menger() {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 64));
  const VertexSet s = w.ball(w.center(), 2);
  bool pass = true;
  std::string detail;
  for (double p : {0.55, 0.7}) {
    const IdentityTally t = check_hull_menger(w, s, p, context(10000));
    pass = pass && t.failures_primary == 0 && t.failures_secondary == 0 && t.failures_tertiary == 0;
    detail += (detail.empty() ? "" : "; ") + std::string("p = ") + fmt(p) + ": " + std::to_string(t.samples) +
              " samples, failures " + std::to_string(t.failures_primary) + "/" + std::to_string(t.failures_secondary) +
              "/" + std::to_string(t.failures_tertiary);
  }
  return {pass, detail};
}

// Criterion 7.
Outcome stability() {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 64));
  const long rs[] = {1, 2, 3};
  const auto verdicts = stability_check(w, w.ball(w.center(), 1), 0.5, 0.8, rs, context(10000));
  bool pass = true;
  std::string detail;
  for (const BoundVerdict& v : verdicts) {
    const MCResult& r = v.estimate;
    const bool ok = r.estimate >= v.bound - 3.0 * r.std_error;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + std::string("r = ") + std::to_string(r.r) + ": " + fmt(r.estimate) +
              " vs bound " + fmt(v.bound);
  }
  return {pass, detail};
}

// Criterion 8.
Outcome markov_variant() {
  int failures = 0;
  int checks = 0;
  for (double theta : {0.1, 0.5, 0.9}) {
    for (int i = 0; i < 1000; ++i) {
      CounterRng rng(1, StreamDomain::property_tests, 1000000 + static_cast<std::uint64_t>(i));
      const int m = 1 + static_cast<int>(rng.below(50));
      std::vector<double> weight(m + 1);
      double total = 0.0;
      for (double& x : weight) {
        x = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
        total += x;
      }
      if (total == 0.0) {
        weight[m] = 1.0;
        total = 1.0;
      }
      double mean = 0.0;
      for (int k = 0; k <= m; ++k) mean += k * weight[k] / total;
      double tail = 0.0;
      for (int k = 0; k <= m; ++k) {
        if (k > theta * mean) tail += weight[k] / total;
      }
      ++checks;
      failures += tail < markov_lower_bound(mean, m, theta) - 1e-12;
    }
  }
  return {failures == 0, std::to_string(checks) + " exact checks over random distributions, " +
                             std::to_string(failures) + " failures"};
}

struct TailFit {
  std::vector<MCResult> tail;
  DimensionFit fit;
  std::string refusal;
  double c = 0.0;
};

// Criterion 9 (also feeds criterion 10).
TailFit measure_tail() {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 128));
  std::vector<long> ns;
  for (long n = 8; n <= 200; ++n) ns.push_back(n);
  TailFit out;
  out.tail = est_cluster_tail(w, w.center(), 0.65, ns, context(1000000)).volume_tail;
  std::vector<std::pair<double, double>> points;
  for (const MCResult& r : out.tail) {
    if (r.estimate > 0.0 && r.estimate < 1.0) points.emplace_back(static_cast<double>(r.n), -std::log(r.estimate));
  }
  try {
    out.fit = fit_dimension(points);
  } catch (const Refusal& e) {
    out.refusal = e.what();
  }
  out.c = std::clamp(fit_tail_constant(points, 0.5), 1e-6, 2.0);
  return out;
}

Outcome dimension_fit(const TailFit& t) {
  if (!t.refusal.empty()) return {false, "fit refused: " + t.refusal};
  const bool pass = t.fit.d_prime >= 1.6 && t.fit.d_prime <= 2.6;
  return {pass, "d' = " + fmt(t.fit.d_prime) + " +/- " + fmt(t.fit.d_prime_se, 2) + " from " +
                    std::to_string(t.fit.points) + " points (p = 0.65, 10^6 samples, pre-asymptotic)"};
}

// Criterion 10.
Outcome bad_set(const TailFit& t) {
  const auto w = GraphWindow::build(WindowParams::hypercubic(2, 32));
  const double p = 0.7;
  const double c = t.c;
  const IsoFunction phi = IsoFunction::power(2);
  const auto threshold_fn = [&](int size) { return c / 4.0 * psi(phi, size); };
  std::vector<long> ns;
  for (long n = 1; n <= 10; ++n) ns.push_back(n);
  const auto rows = est_bad_set(w, w.center(), p, ns, threshold_fn, context(10000));
  const MCResult& anchor = rows[3];
  if (anchor.successes == 0) {
    return {false, "no bad-set events at n = 4, C cannot be fitted (c = " + fmt(c) + ")"};
  }
  const double big_c = anchor.estimate / std::exp(-c / 2.0 * phi(4.0));
  bool pass = true;
  double worst = -1e9;
  for (const MCResult& r : rows) {
    const BoundVerdict v = check_upper("bad_set", big_c * std::exp(-c / 2.0 * phi(static_cast<double>(r.n))), r);
    pass = pass && v.verdict != Verdict::violated;
    worst = std::max(worst, -v.slack);
  }
  return {pass, "c = " + fmt(c) + " from the criterion 9 tail, C = " + fmt(big_c) +
                    ", largest ci_low - bound = " + fmt(worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Criterion 11.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("percolab-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json doc = nlohmann::json::parse(R"({
    "schema_version": 1,
    "window": {"family": "hypercubic", "dim": 2, "side": 33},
    "samples": 4000,
    "seed": 1,
    "estimands": [
      {"kind": "disconnect_prob", "set": {"ball": {"radius": 1}}, "p": [0.5, 0.6, 0.7]},
      {"kind": "psi_sum", "set": {"ball": {"radius": 1}}, "p": [0.6]},
      {"kind": "cluster_tail", "p": 0.6, "n": {"from": 1, "to": 40}},
      {"kind": "capacity", "set": {"ball": {"radius": 1}}, "walkers": 4000},
      {"kind": "repulsion_tail", "p1": 0.55, "p2": 0.7, "n": {"from": 0, "to": 6}},
      {"kind": "stability", "set": {"ball": {"radius": 1}}, "p1": 0.5, "p2": 0.8, "r": [1, 2, 3]},
      {"kind": "azuma", "p": 0.6, "pairs": [[20, 20], [40, 30]]},
      {"kind": "exploration_identities", "p": 0.6, "n": [10, 50]},
      {"kind": "hull_menger", "set": {"ball": {"radius": 2}}, "p": [0.55, 0.7]},
      {"kind": "bad_set", "p": 0.7, "n": [4, 7, 10], "c": 0.5},
      {"kind": "markov", "distributions": 300},
      {"kind": "profile", "d_prime": [2], "max_size": 6, "anneal": {"max_size": 9, "budget": 2000, "restarts": 2}},
      {"kind": "uniform_isoperimetry", "d": 2, "max_size": 4}
    ]
  })");
  const fs::path config = root / "config.json";
  std::ofstream(config) << doc.dump(2);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "samples.jsonl"}, {"estimate", "results.csv"}, {"profile", "profile.csv"},
      {"verify", "verdicts.csv"},     {"report", "plot.csv"}};
  std::vector<std::string> reference(commands.size());
  std::vector<std::string> mismatches;
  for (int w : {1, 4, 8}) {
    const fs::path out = root / ("workers" + std::to_string(w));
    for (std::size_t i = 0; i < commands.size(); ++i) {
      CommandOptions o;
      o.command = commands[i].first;
      if (o.command != "report") o.config_path = config.string();
      o.workers = w;
      o.out = out.string();
      std::ostringstream log, err;
      const int code = run_command(o, log, err);
      if (code == kExitConfig) mismatches.push_back(o.command + " failed: " + err.str());
      const std::string bytes = slurp(out / commands[i].second);
      if (w == 1) {
        reference[i] = bytes;
      } else if (bytes != reference[i]) {
        mismatches.push_back(commands[i].second + " differs at " + std::to_string(w) + " workers");
      }
    }
  }
  fs::remove_all(root);
  std::string detail = "5 commands at 1, 4, 8 workers";
  for (const auto& m : mismatches) detail += "; " + m;
  return {mismatches.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  struct Criterion {
    int id;
    std::string name;
    double budget_s;  // 0: no runtime limit
    std::function<Outcome()> run;
  };
  std::optional<TailFit> tail;
  auto ensure_tail = [&]() -> const TailFit& {
    if (!tail) tail = measure_tail();
    return *tail;
  };
  const std::vector<Criterion> criteria = {
      {1, "coupling monotonicity", 60, coupling_monotonicity},
      {2, "exhaustive oracle agreement", 300, exhaustive_oracles},
      {3, "repulsion tail bound", 600, repulsion_bound},
      {4, "azuma tail bound", 600, azuma_bound_check},
      {5, "exploration identities", 0, exploration_identities},
      {6, "hull and menger identities", 0, hull_menger},
      {7, "stability lower bound", 0, stability},
      {8, "markov variant", 0, markov_variant},
      {9, "dimension fit", 3600, [&] { return dimension_fit(ensure_tail()); }},
      {10, "bad-set tail domination", 0, [&] { return bad_set(ensure_tail()); }},
      {11, "determinism across workers", 0, determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && seconds > c.budget_s) {
      outcome.pass = false;
      outcome.detail += "; over the " + fmt(c.budget_s) + " s budget";
    }
    failed += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << outcome.detail
              << " [" << fmt(seconds, 3) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
