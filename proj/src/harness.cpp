#include "percolab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "percolab/config.hpp"
#include "percolab/error.hpp"
#include "percolab/estimators.hpp"
#include "percolab/exact.hpp"
#include "percolab/exploration.hpp"
#include "percolab/isoperimetry.hpp"
#include "percolab/parallel.hpp"
#include "percolab/percolation.hpp"
#include "percolab/rng.hpp"

#ifndef PERCOLAB_VERSION
#define PERCOLAB_VERSION "0.0.0"
#endif

namespace percolab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tool_version() { return PERCOLAB_VERSION; }

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double x) {
  if (std::isnan(x)) return "";
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

std::string opt_int(long x) { return x < 0 ? "" : std::to_string(x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_warnings(const std::vector<std::string>& warnings) {
  std::string out;
  for (const auto& w : warnings) out += (out.empty() ? "" : "; ") + w;
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

// Rows keyed by header name.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  const auto header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) row[header[i]] = fields[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

// Files are staged as <name>.tmp and renamed on commit; anything staged is
// deleted if the run fails.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [name, content] : files_) fs::remove(dir_ / (name + ".tmp"), ec);
    if (created_dir_) fs::remove(dir_, ec);
  }

  void stage(const std::string& name, std::string content) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
    std::ofstream out(dir_ / (name + ".tmp"), std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.emplace_back(name, std::move(content));
  }

  void commit(const std::string& command, const std::string& config_hash, const std::string& started) {
    for (const auto& [name, content] : files_) fs::rename(dir_ / (name + ".tmp"), dir_ / name);
    json manifest = json::object();
    const fs::path manifest_path = dir_ / "manifest.json";
    if (fs::exists(manifest_path)) {
      try {
        std::ifstream in(manifest_path);
        manifest = json::parse(in);
      } catch (const std::exception&) {
        manifest = json::object();
      }
    }
    json outputs = manifest.contains("outputs") && manifest["outputs"].is_object() ? manifest["outputs"] : json::object();
    for (const auto& [name, content] : files_) {
      outputs[name] = {{"sha256", sha256_hex(content)}, {"bytes", content.size()}, {"command", command}};
    }
    manifest["outputs"] = outputs;
    manifest["config_hash"] = config_hash;
    manifest["tool_version"] = tool_version();
    manifest["command"] = command;
    manifest["started_at"] = started;
    manifest["finished_at"] = utc_now();
    const fs::path tmp = dir_ / "manifest.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << manifest.dump(2) << "\n";
    }
    fs::rename(tmp, manifest_path);
    committed_ = true;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  bool committed_ = false;
  bool created_dir_ = false;
};

const char* kResultsHeader =
    "estimand,parameter,p,p2,n,r,m,estimate,ci_low,ci_high,std_error,samples,successes,seed,"
    "config_hash,warning\n";

void write_result(std::ostringstream& out, const MCResult& r, const std::string& parameter) {
  std::vector<std::string> warnings = r.warnings;
  if (r.censored) warnings.push_back("censored: no events in " + std::to_string(r.samples) + " samples");
  out << csv_field(r.estimand) << ',' << csv_field(parameter) << ',' << num(r.p) << ',' << num(r.p2)
      << ',' << opt_int(r.n) << ',' << opt_int(r.r) << ',' << opt_int(r.m) << ',' << num(r.estimate)
      << ',' << num(r.ci_low) << ',' << num(r.ci_high) << ',' << num(r.std_error) << ',' << r.samples
      << ',' << (r.successes < 0 ? "" : std::to_string(r.successes)) << ',' << r.seed << ','
      << r.config_hash << ',' << csv_field(join_warnings(warnings)) << '\n';
}

const char* kVerdictHeader =
    "check,parameter,direction,bound,estimate,ci_low,ci_high,slack,verdict,informative,p,p2,n,r,m,"
    "samples,seed,config_hash,caveat\n";

void write_verdict(std::ostringstream& out, const BoundVerdict& v, const std::string& parameter) {
  const MCResult& r = v.estimate;
  out << csv_field(v.check) << ',' << csv_field(parameter) << ',' << to_string(v.direction) << ','
      << num(v.bound) << ',' << num(r.estimate) << ',' << num(r.ci_low) << ',' << num(r.ci_high)
      << ',' << num(v.slack) << ',' << to_string(v.verdict) << ',' << (v.informative ? 1 : 0) << ','
      << num(r.p) << ',' << num(r.p2) << ',' << opt_int(r.n) << ',' << opt_int(r.r) << ','
      << opt_int(r.m) << ',' << r.samples << ',' << r.seed << ',' << r.config_hash << ','
      << csv_field(v.caveat) << '\n';
}

const char* kProfileHeader =
    "estimand,parameter,d_prime,n,ratio,exact,normalization,boundary,volume,witness,config_hash\n";

std::string witness_string(const std::vector<Vertex>& members) {
  std::string out;
  for (Vertex v : members) out += (out.empty() ? "" : " ") + std::to_string(v);
  return out;
}

RunContext context_for(const ExperimentConfig& cfg, const Estimand& est, int workers) {
  RunContext ctx;
  ctx.seed = cfg.seed;
  ctx.samples = est.samples;
  ctx.ci_level = cfg.ci_level;
  ctx.workers = workers;
  ctx.config_hash = cfg.config_hash;
  return ctx;
}

std::function<double(int)> bad_set_threshold(const Estimand& est) {
  const IsoFunction phi = IsoFunction::power(est.d_prime);
  const double c = est.c;
  return [phi, c](int size) { return c / 4.0 * psi(phi, static_cast<double>(size)); };
}

struct Dimension {
  DimensionFit fit;
  std::string refusal;
};

Dimension fit_from_tail(const std::vector<MCResult>& tail) {
  std::vector<std::pair<double, double>> points;
  for (const MCResult& r : tail) {
    if (r.estimate > 0.0 && r.estimate < 1.0) points.emplace_back(static_cast<double>(r.n), -std::log(r.estimate));
  }
  Dimension out;
  try {
    out.fit = fit_dimension(points);
  } catch (const Refusal& e) {
    out.refusal = e.what();
  }
  return out;
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, int workers, std::ostream& log)
      : cfg_(cfg), workers_(workers), log_(log) {}

  std::string estimate() {
    std::ostringstream out;
    out << kResultsHeader;
    for (const Estimand& est : cfg_.estimands) {
      const RunContext ctx = context_for(cfg_, est, workers_);
      auto emit = [&](const std::vector<MCResult>& rows) {
        for (const auto& r : rows) write_result(out, r, est.path);
      };
      note_margin(est);
      switch (est.kind) {
        case EstimandKind::disconnect_prob: emit(est_disconnect_prob(cfg_.window, est.set, est.ps, ctx)); break;
        case EstimandKind::psi_sum: emit(est_psi_sum(cfg_.window, est.set, est.ps, ctx)); break;
        case EstimandKind::cluster_tail: {
          const ClusterTail tail = est_cluster_tail(cfg_.window, est.vertex, est.ps[0], est.ns, ctx);
          emit(tail.volume_tail);
          emit(tail.edge_count);
          break;
        }
        case EstimandKind::capacity:
          emit({est_capacity(cfg_.window, est.set, est.walkers, est.max_steps, ctx)});
          break;
        case EstimandKind::repulsion_tail:
          emit(est_repulsion_tail(cfg_.window, est.vertex, est.p1, est.p2, est.ns, ctx));
          break;
        case EstimandKind::ir_prob: emit(est_ir_prob(cfg_.window, est.set, est.ps[0], est.rs, ctx)); break;
        case EstimandKind::stability:
          for (const BoundVerdict& v : stability_check(cfg_.window, est.set, est.p1, est.p2, est.rs, ctx)) {
            write_result(out, v.estimate, est.path);
          }
          break;
        case EstimandKind::azuma: emit(est_azuma_event(cfg_.window, est.vertex, est.ps[0], est.mn, ctx)); break;
        case EstimandKind::bad_set:
          emit(est_bad_set(cfg_.window, est.vertex, est.ps[0], est.ns, bad_set_threshold(est), ctx));
          break;
        case EstimandKind::dgrsy:
          emit(est_disconnect_prob(cfg_.window, est.set, est.ps, ctx));
          emit({est_capacity(cfg_.window, est.set, est.walkers, est.max_steps, ctx)});
          break;
        case EstimandKind::exploration_identities:
          if (!est.ns.empty()) emit(est_martingale_mean(cfg_.window, est.vertex, est.ps[0], est.ns, ctx));
          break;
        case EstimandKind::dimension_fit: {
          const ClusterTail tail = est_cluster_tail(cfg_.window, est.vertex, est.ps[0], est.ns, ctx);
          emit(tail.volume_tail);
          const Dimension dim = fit_from_tail(tail.volume_tail);
          MCResult r;
          r.estimand = "d_prime";
          r.p = est.ps[0];
          r.samples = est.samples;
          r.seed = cfg_.seed;
          r.config_hash = cfg_.config_hash;
          r.ci_level = cfg_.ci_level;
          if (dim.refusal.empty()) {
            const double z = normal_z(cfg_.ci_level);
            r.estimate = dim.fit.d_prime;
            r.std_error = dim.fit.d_prime_se;
            r.ci_low = dim.fit.d_prime - z * dim.fit.d_prime_se;
            r.ci_high = dim.fit.d_prime + z * dim.fit.d_prime_se;
            log_ << est.path << ": d' = " << dim.fit.d_prime << " +/- " << dim.fit.d_prime_se << "\n";
          } else {
            r.estimate = r.ci_low = r.ci_high = r.std_error = std::nan("");
            r.warnings.push_back(dim.refusal);
            log_ << est.path << ": " << dim.refusal << "\n";
          }
          write_result(out, r, est.path);
          break;
        }
        case EstimandKind::markov:
        case EstimandKind::hull_menger:
        case EstimandKind::profile:
        case EstimandKind::uniform_isoperimetry:
          break;
      }
    }
    return out.str();
  }

  // Returns the CSV and sets `violated` if an informative check failed.
  std::string verify(bool& violated) {
    std::ostringstream out;
    out << kVerdictHeader;
    auto emit = [&](const BoundVerdict& v, const std::string& parameter) {
      write_verdict(out, v, parameter);
      if (v.verdict == Verdict::violated && v.informative) {
        violated = true;
        log_ << "VIOLATED " << v.check << " at " << parameter << "\n";
      }
    };
    std::optional<exact::SmallGraph> small;
    if (cfg_.exhaustive) small = exact::SmallGraph::from_window(cfg_.window);

    for (const Estimand& est : cfg_.estimands) {
      const RunContext ctx = context_for(cfg_, est, workers_);
      note_margin(est);
      switch (est.kind) {
        case EstimandKind::repulsion_tail: {
          const auto rows = est_repulsion_tail(cfg_.window, est.vertex, est.p1, est.p2, est.ns, ctx);
          for (const MCResult& r : rows) {
            const double bound = std::pow((1.0 - est.p2) / (1.0 - est.p1), static_cast<double>(r.n));
            emit(check_upper("repulsion", bound, r), est.path);
            if (small) {
              emit(check_exact("oracle:repulsion_tail",
                               exact::repulsion_tail(*small, est.vertex, est.p1, est.p2, r.n), r),
                   est.path);
            }
          }
          if (small) {
            const double tv = exact::lemma_tv_distance(*small, est.p1, est.p2);
            BoundVerdict v;
            v.check = "oracle:conditional_law_tv";
            v.bound = 1e-10;
            v.estimate.estimate = v.estimate.ci_low = v.estimate.ci_high = tv;
            v.estimate.p = est.p1;
            v.estimate.p2 = est.p2;
            v.estimate.seed = cfg_.seed;
            v.estimate.config_hash = cfg_.config_hash;
            v.slack = 1e-10 - tv;
            v.verdict = tv < 1e-10 ? Verdict::consistent : Verdict::violated;
            v.caveat = "exact enumeration of coupling states";
            emit(v, est.path);
          }
          break;
        }
        case EstimandKind::azuma: {
          for (const MCResult& r : est_azuma_event(cfg_.window, est.vertex, est.ps[0], est.mn, ctx)) {
            const AzumaBound bound = azuma_bound(est.ps[0], r.n, r.m);
            emit(check_upper("azuma", bound.value, r), est.path);
            if (small) {
              emit(check_exact("oracle:azuma", exact::azuma_event(*small, est.vertex, est.ps[0], r.m, r.n), r),
                   est.path);
            }
          }
          break;
        }
        case EstimandKind::stability:
          for (const BoundVerdict& v : stability_check(cfg_.window, est.set, est.p1, est.p2, est.rs, ctx)) {
            emit(v, est.path);
          }
          break;
        case EstimandKind::markov:
          for (double theta : est.thetas) emit(markov_property(est, theta, ctx), est.path);
          break;
        case EstimandKind::exploration_identities: {
          const IdentityTally t = check_exploration_identities(cfg_.window, est.vertex, est.ps[0], ctx);
          auto tag = [&](BoundVerdict v) {
            v.estimate.p = est.ps[0];
            return v;
          };
          emit(tag(identity_verdict("exploration:z_identity", t.failures_primary, t.samples, ctx)), est.path);
          emit(tag(identity_verdict("exploration:tilde_difference", t.failures_secondary, t.samples, ctx)), est.path);
          emit(tag(identity_verdict("exploration:order_invariance", t.failures_tertiary, t.samples, ctx)), est.path);
          if (!est.ns.empty()) {
            for (const MCResult& r : est_martingale_mean(cfg_.window, est.vertex, est.ps[0], est.ns, ctx)) {
              BoundVerdict v = check_exact("martingale_mean", 0.0, r);
              v.slack = 4.0 * r.std_error - std::abs(r.estimate);
              v.verdict = v.slack < 0.0 ? Verdict::violated : Verdict::consistent;
              v.caveat = "mean of Z_(n^T) within 4 standard errors of 0";
              emit(v, est.path);
            }
          }
          break;
        }
        case EstimandKind::hull_menger:
          for (double p : est.ps) {
            const IdentityTally t = check_hull_menger(cfg_.window, est.set, p, ctx);
            auto tag = [&](BoundVerdict v) {
              v.estimate.p = p;
              return v;
            };
            emit(tag(identity_verdict("hull:boundary_identity", t.failures_primary, t.samples, ctx)), est.path);
            emit(tag(identity_verdict("menger:paths_lower_bound", t.failures_secondary, t.samples, ctx)), est.path);
            emit(tag(identity_verdict("hull:containment", t.failures_tertiary, t.samples, ctx)), est.path);
          }
          break;
        case EstimandKind::bad_set: {
          const auto threshold_fn = bad_set_threshold(est);
          const auto rows = est_bad_set(cfg_.window, est.vertex, est.ps[0], est.ns, threshold_fn, ctx);
          std::vector<long> fit_n{est.fit_n};
          const MCResult anchor =
              est_bad_set(cfg_.window, est.vertex, est.ps[0], fit_n, threshold_fn, ctx).front();
          const IsoFunction phi = IsoFunction::power(est.d_prime);
          const double scale = anchor.estimate / std::exp(-est.c / 2.0 * phi(static_cast<double>(est.fit_n)));
          for (const MCResult& r : rows) {
            const double bound = scale * std::exp(-est.c / 2.0 * phi(static_cast<double>(r.n)));
            BoundVerdict v = check_upper("bad_set", bound, r);
            std::ostringstream caveat;
            caveat << "C = " << scale << " fitted at n = " << est.fit_n << ", c = " << est.c;
            if (anchor.successes == 0) {
              v.verdict = Verdict::vacuous;
              caveat << "; C undetermined (no events at n = " << est.fit_n << ")";
            }
            v.caveat = caveat.str();
            emit(v, est.path);
            if (small) {
              emit(check_exact("oracle:bad_set",
                               exact::bad_set_prob(*small, est.vertex, est.ps[0], r.n, threshold_fn), r),
                   est.path);
            }
          }
          break;
        }
        case EstimandKind::dgrsy: {
          DgrsyOptions options;
          options.walkers = est.walkers;
          options.max_steps = est.max_steps;
          if (est.p0_known) options.p0 = est.p0;
          emit(dgrsy_cross_check(cfg_.window, est.set, est.ps[0], options, ctx), est.path);
          break;
        }
        case EstimandKind::disconnect_prob:
          if (small) {
            for (const MCResult& r : est_disconnect_prob(cfg_.window, est.set, est.ps, ctx)) {
              emit(check_exact("oracle:disconnect_prob", exact::disconnect_prob(*small, members(est.set), r.p), r),
                   est.path);
            }
          }
          break;
        case EstimandKind::psi_sum:
          if (small) {
            for (const MCResult& r : est_psi_sum(cfg_.window, est.set, est.ps, ctx)) {
              emit(check_exact("oracle:psi_sum", exact::psi_sum(*small, members(est.set), r.p), r), est.path);
            }
          }
          break;
        case EstimandKind::cluster_tail:
          if (small) {
            const ClusterTail tail = est_cluster_tail(cfg_.window, est.vertex, est.ps[0], est.ns, ctx);
            for (const MCResult& r : tail.volume_tail) {
              emit(check_exact("oracle:cluster_tail", exact::volume_tail(*small, est.vertex, r.p, r.n), r), est.path);
            }
            for (const MCResult& r : tail.edge_count) {
              emit(check_exact("oracle:edge_count_exact", exact::edge_count_prob(*small, est.vertex, r.p, r.n), r),
                   est.path);
            }
          }
          break;
        case EstimandKind::capacity:
          if (small) {
            const MCResult r = est_capacity(cfg_.window, est.set, est.walkers, est.max_steps, ctx);
            emit(check_exact("oracle:capacity", exact::capacity(cfg_.window, est.set), r), est.path);
          }
          break;
        case EstimandKind::ir_prob:
          if (small) {
            for (const MCResult& r : est_ir_prob(cfg_.window, est.set, est.ps[0], est.rs, ctx)) {
              emit(check_exact("oracle:ir_prob", exact::ir_prob(*small, members(est.set), r.p, r.r), r), est.path);
            }
          }
          break;
        case EstimandKind::profile:
        case EstimandKind::uniform_isoperimetry:
        case EstimandKind::dimension_fit:
          break;
      }
    }
    return out.str();
  }

  std::string profile(bool& any) {
    std::ostringstream out;
    out << kProfileHeader;
    for (const Estimand& est : cfg_.estimands) {
      if (est.kind == EstimandKind::profile) {
        any = true;
        LocalGraph graph;
        if (est.cluster_graph) {
          const Configuration config = threshold(assign_uniforms(cfg_.window, cfg_.seed, est.sample_index), est.ps[0]);
          graph = LocalGraph::from_cluster(cfg_.window, config, est.vertex);
        } else {
          graph = LocalGraph::from_window(cfg_.window, est.ambient_degree);
        }
        const int anchor = graph.local_of(est.vertex);
        const int max_size = std::min(est.max_size, graph.size());
        for (double d_prime : est.d_primes) {
          const IsoFunction phi = IsoFunction::power(d_prime);
          const AnnealingOptions* heuristic = est.anneal ? &*est.anneal : nullptr;
          for (const ProfileResult& r : anchored_profile(graph, anchor, phi, max_size, est.normalization, heuristic)) {
            out << "profile," << csv_field(est.path) << ',' << num(d_prime) << ',' << r.size << ','
                << num(r.ratio) << ',' << (r.exact ? 1 : 0) << ',' << to_string(r.normalization) << ','
                << r.boundary << ',' << r.volume << ',' << witness_string(r.witness) << ','
                << cfg_.config_hash << '\n';
          }
        }
      } else if (est.kind == EstimandKind::uniform_isoperimetry) {
        any = true;
        const LocalGraph graph = LocalGraph::from_window(cfg_.window, true);
        const UniformCheck check = check_uniform_isoperimetry(graph, est.d, est.max_size);
        for (std::size_t k = 0; k < check.min_by_size.size(); ++k) {
          if (std::isinf(check.min_by_size[k])) continue;
          const bool is_min = check.witness.size() == k + 1;
          out << "uniform_isoperimetry," << csv_field(est.path) << ',' << num(est.d) << ',' << k + 1 << ','
              << num(check.min_by_size[k]) << ",1,degree_volume,,," << (is_min ? witness_string(check.witness) : "")
              << ',' << cfg_.config_hash << '\n';
        }
        log_ << est.path << ": smallest uniform constant " << check.constant << " over "
             << check.sets_examined << " connected sets\n";
      }
    }
    return out.str();
  }

  std::string simulate(bool& any) {
    std::ostringstream out;
    for (const Estimand& est : cfg_.estimands) {
      double p = 0.0;
      switch (est.kind) {
        case EstimandKind::cluster_tail:
        case EstimandKind::dimension_fit:
        case EstimandKind::azuma:
        case EstimandKind::exploration_identities:
        case EstimandKind::bad_set:
          p = est.ps[0];
          break;
        case EstimandKind::repulsion_tail:
          p = est.p2;
          break;
        default:
          continue;
      }
      if (!(p > 0.0 && p < 1.0)) continue;
      any = true;
      struct Lines {
        std::string text;
        void merge(const Lines& o) { text += o.text; }
      };
      const GraphWindow& window = cfg_.window;
      const Vertex v = est.vertex;
      const std::string kind = to_string(est.kind);
      const Lines lines = parallel_reduce<Lines>(
          est.samples, workers_, [] { return Lines{}; },
          [&] {
            return [&](std::uint64_t s, Lines& acc) {
              const EdgeLabels labels = assign_uniforms(window, cfg_.seed, s);
              const ClusterPartition part = clusters(window, threshold(labels, p));
              const ExplorationTrace trace = explore_cluster(window, labels, p, v);
              json row;
              row["estimand"] = est.path;
              row["kind"] = kind;
              row["sample"] = s;
              row["v"] = v;
              row["p"] = p;
              row["finite"] = !part.is_pseudo_infinite(v);
              if (part.is_pseudo_infinite(v)) {
                row["size"] = nullptr;
                row["edge_count"] = nullptr;
                row["T"] = nullptr;
                row["Z_T"] = nullptr;
                row["tau"] = nullptr;
              } else {
                const auto mask = part.infinite_mask();
                long tau = 0;
                const VertexSet members = part.members_of(v);
                for (Vertex u : members) {
                  for (Vertex w : window.neighbors(u)) tau += mask[w];
                }
                row["size"] = part.size_of(v);
                row["edge_count"] = part.edge_count_of(v);
                row["T"] = trace.stopping_time();
                row["Z_T"] = trace.final_value();
                row["tau"] = tau;
              }
              acc.text += row.dump() + "\n";
            };
          });
      out << lines.text;
    }
    return out.str();
  }

 private:
  const ExperimentConfig& cfg_;
  int workers_;
  std::ostream& log_;

  static std::vector<int> members(const VertexSet& set) { return {set.begin(), set.end()}; }

  void note_margin(const Estimand& est) {
    if (est.kind == EstimandKind::markov || est.kind == EstimandKind::uniform_isoperimetry) return;
    const VertexSet anchor = est.set.empty() ? VertexSet{est.vertex} : est.set;
    const int distance = cfg_.window.distance_to_boundary(anchor);
    log_ << est.path << " (" << to_string(est.kind) << "): boundary margin " << distance << ", recommended "
         << cfg_.window.required_margin() << "\n";
  }

  BoundVerdict markov_property(const Estimand& est, double theta, const RunContext& ctx) {
    std::uint64_t failures = 0;
    for (int i = 0; i < est.distributions; ++i) {
      CounterRng rng(cfg_.seed, StreamDomain::property_tests,
                     static_cast<std::uint64_t>(i) * 1000 + static_cast<std::uint64_t>(theta * 997));
      std::vector<double> weights(static_cast<std::size_t>(est.support) + 1);
      double total = 0.0;
      for (double& w : weights) {
        w = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
        total += w;
      }
      if (total == 0.0) {
        weights.back() = 1.0;
        total = 1.0;
      }
      double mean = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) mean += static_cast<double>(k) * weights[k] / total;
      double tail = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        if (static_cast<double>(k) > theta * mean) tail += weights[k] / total;
      }
      const double bound = markov_lower_bound(mean, static_cast<double>(est.support), theta);
      failures += tail < bound - 1e-12;
    }
    BoundVerdict v = identity_verdict("markov", failures, static_cast<std::uint64_t>(est.distributions), ctx);
    v.estimate.p = theta;
    std::ostringstream caveat;
    caveat << "theta = " << theta << "; exact check over random distributions on {0..M}";
    v.caveat = caveat.str();
    return v;
  }
};

// Plot-ready long format from an existing run directory.
std::string report(const fs::path& dir, std::ostream& log) {
  std::ostringstream out;
  out << "series,parameter,x_label,x,y_label,y,y_low,y_high\n";
  auto row = [&](const std::string& series, const std::string& parameter, const std::string& xl, double x,
                 const std::string& yl, double y, double lo, double hi) {
    out << csv_field(series) << ',' << csv_field(parameter) << ',' << xl << ',' << num(x) << ',' << yl << ','
        << num(y) << ',' << num(lo) << ',' << num(hi) << '\n';
  };
  auto to_d = [](const std::string& s) { return s.empty() ? std::nan("") : std::stod(s); };

  const fs::path results = dir / "results.csv";
  if (fs::exists(results)) {
    std::map<std::string, std::vector<MCResult>> tails;
    for (const auto& r : read_csv(results)) {
      const std::string estimand = r.at("estimand");
      const std::string param = r.at("parameter");
      const double est = to_d(r.at("estimate"));
      const double lo = to_d(r.at("ci_low"));
      const double hi = to_d(r.at("ci_high"));
      if (estimand == "cluster_tail" && !r.at("n").empty()) {
        const double n = to_d(r.at("n"));
        MCResult m;
        m.n = static_cast<long>(n);
        m.estimate = est;
        tails[param].push_back(m);
        if (est > 0.0 && est < 1.0 && n > 0) {
          row("cluster_tail", param, "log_n", std::log(n), "log_neg_log_p", std::log(-std::log(est)),
              hi < 1.0 && hi > 0.0 ? std::log(-std::log(hi)) : std::nan(""),
              lo > 0.0 && lo < 1.0 ? std::log(-std::log(lo)) : std::nan(""));
        }
        continue;
      }
      if (estimand == "repulsion_tail") {
        const double n = to_d(r.at("n"));
        const double bound = std::pow((1.0 - to_d(r.at("p2"))) / (1.0 - to_d(r.at("p"))), n);
        row("repulsion_tail", param, "n", n, "probability", est, lo, hi);
        row("repulsion_bound", param, "n", n, "probability", bound, bound, bound);
        continue;
      }
      std::string xl = "p";
      double x = to_d(r.at("p"));
      if (!r.at("n").empty()) {
        xl = "n";
        x = to_d(r.at("n"));
      } else if (!r.at("r").empty()) {
        xl = "r";
        x = to_d(r.at("r"));
      }
      row(estimand, param, xl, x, "estimate", est, lo, hi);
    }
    for (const auto& [param, tail] : tails) {
      const Dimension dim = fit_from_tail(tail);
      if (!dim.refusal.empty()) {
        log << param << ": " << dim.refusal << "\n";
        continue;
      }
      for (const MCResult& m : tail) {
        if (m.n < kFitMinN) continue;
        const double x = std::log(static_cast<double>(m.n));
        row("dimension_fit_line", param, "log_n", x, "log_neg_log_p", dim.fit.intercept + dim.fit.slope * x,
            std::nan(""), std::nan(""));
      }
      log << param << ": d' = " << dim.fit.d_prime << " +/- " << dim.fit.d_prime_se << "\n";
    }
  }
  const fs::path profile = dir / "profile.csv";
  if (fs::exists(profile)) {
    for (const auto& r : read_csv(profile)) {
      const std::string series = r.at("estimand") + ":d=" + r.at("d_prime") + (r.at("exact") == "1" ? "" : ":heuristic");
      row(series, r.at("parameter"), "n", to_d(r.at("n")), "ratio", to_d(r.at("ratio")), std::nan(""), std::nan(""));
    }
  }
  return out.str();
}

int resolve_workers(const CommandOptions& options, int configured) {
  if (options.workers) return std::max(1, *options.workers);
  if (const char* env = std::getenv("PERCOLAB_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, configured);
}

}  // namespace

int run_command(const CommandOptions& options, std::ostream& log, std::ostream& err) {
  const std::string started = utc_now();
  const std::string& cmd = options.command;
  try {
    if (cmd == "report") {
      if (!options.out) throw ConfigError("--out", "report needs the run directory via --out");
      const fs::path dir = *options.out;
      if (!fs::is_directory(dir)) throw ConfigError("--out", "no run directory at " + dir.string());
      std::string hash;
      if (fs::exists(dir / "manifest.json")) {
        std::ifstream in(dir / "manifest.json");
        const json manifest = json::parse(in);
        hash = manifest.value("config_hash", "");
      }
      OutputSet outputs(dir);
      outputs.stage("plot.csv", report(dir, log));
      outputs.commit(cmd, hash, started);
      return kExitOk;
    }
    if (cmd != "simulate" && cmd != "estimate" && cmd != "profile" && cmd != "verify") {
      throw ConfigError("command", "unknown command '" + cmd + "'");
    }
    if (options.config_path.empty()) throw ConfigError("--config", "a config file is required");
    const ExperimentConfig cfg = load_config(options.config_path, options.seed);
    const int workers = resolve_workers(options, cfg.workers);
    const fs::path dir = options.out ? fs::path(*options.out) : fs::path(cfg.output_dir);
    log << "config " << cfg.config_hash << ", seed " << cfg.seed << ", workers " << workers << ", window "
        << cfg.window.num_vertices() << " vertices / " << cfg.window.num_edges() << " edges\n";

    Runner runner(cfg, workers, log);
    OutputSet outputs(dir);
    int code = kExitOk;
    if (cmd == "estimate") {
      outputs.stage("results.csv", runner.estimate());
    } else if (cmd == "verify") {
      bool violated = false;
      outputs.stage("verdicts.csv", runner.verify(violated));
      if (violated) code = kExitViolated;
    } else if (cmd == "profile") {
      bool any = false;
      std::string csv = runner.profile(any);
      if (!any) throw ConfigError("/estimands", "no profile or uniform_isoperimetry estimands");
      outputs.stage("profile.csv", std::move(csv));
    } else {
      bool any = false;
      std::string jsonl = runner.simulate(any);
      if (!any) throw ConfigError("/estimands", "no estimand with a vertex and a level in (0, 1) to simulate");
      outputs.stage("samples.jsonl", std::move(jsonl));
    }
    outputs.stage("config.json", cfg.canonical.dump(2) + "\n");
    outputs.commit(cmd, cfg.config_hash, started);
    log << "wrote " << dir.string() << "\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Refusal& e) {
    err << "refused: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace percolab
