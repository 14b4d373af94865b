#include "percolab/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "percolab/error.hpp"

namespace percolab {

using nlohmann::json;

namespace {

const std::map<std::string, EstimandKind>& kind_table() {
  static const std::map<std::string, EstimandKind> table{
      {"disconnect_prob", EstimandKind::disconnect_prob},
      {"psi_sum", EstimandKind::psi_sum},
      {"cluster_tail", EstimandKind::cluster_tail},
      {"capacity", EstimandKind::capacity},
      {"repulsion_tail", EstimandKind::repulsion_tail},
      {"ir_prob", EstimandKind::ir_prob},
      {"stability", EstimandKind::stability},
      {"azuma", EstimandKind::azuma},
      {"markov", EstimandKind::markov},
      {"exploration_identities", EstimandKind::exploration_identities},
      {"hull_menger", EstimandKind::hull_menger},
      {"bad_set", EstimandKind::bad_set},
      {"dgrsy", EstimandKind::dgrsy},
      {"profile", EstimandKind::profile},
      {"uniform_isoperimetry", EstimandKind::uniform_isoperimetry},
      {"dimension_fit", EstimandKind::dimension_fit},
  };
  return table;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path.empty() ? "/" : path, message);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "required field missing");
  return *it;
}

long as_int(const json& v, const std::string& path, long lo, long hi) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) {
    fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return x;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

// Probability level. Endpoints only where the estimand allows them.
double as_level(const json& v, const std::string& path, bool allow_zero, bool allow_one) {
  const double p = as_number(v, path);
  const bool ok = (p > 0.0 || (allow_zero && p == 0.0)) && (p < 1.0 || (allow_one && p == 1.0));
  if (!ok) {
    std::ostringstream msg;
    msg << "p must lie in " << (allow_zero ? "[0" : "(0") << ", 1" << (allow_one ? "]" : ")");
    fail(path, msg.str());
  }
  return p;
}

std::vector<double> level_list(const json& v, const std::string& path, bool allow_zero, bool allow_one) {
  std::vector<double> out;
  if (v.is_array()) {
    if (v.empty()) fail(path, "expected at least one value");
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_level(v[i], path + "/" + std::to_string(i), allow_zero, allow_one));
    }
  } else {
    out.push_back(as_level(v, path, allow_zero, allow_one));
  }
  return out;
}

std::vector<long> int_list(const json& v, const std::string& path, long lo, long hi) {
  std::vector<long> out;
  if (v.is_array()) {
    if (v.empty()) fail(path, "expected at least one value");
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], path + "/" + std::to_string(i), lo, hi));
  } else if (v.is_object() && v.contains("from") && v.contains("to")) {
    const long a = as_int(v["from"], path + "/from", lo, hi);
    const long b = as_int(v["to"], path + "/to", lo, hi);
    const long step = v.contains("step") ? as_int(v["step"], path + "/step", 1, hi) : 1;
    if (b < a) fail(path, "range is empty");
    for (long x = a; x <= b; x += step) out.push_back(x);
  } else {
    out.push_back(as_int(v, path, lo, hi));
  }
  return out;
}

WindowParams parse_window_params(const json& w, const std::string& path) {
  if (!w.is_object()) fail(path, "expected an object");
  const json& family = require(w, "family", path);
  if (!family.is_string()) fail(path + "/family", "expected a string");
  const std::string name = family.get<std::string>();
  WindowParams params;
  if (name == "hypercubic") {
    const long dim = as_int(require(w, "dim", path), path + "/dim", 1, 12);
    const long side = as_int(require(w, "side", path), path + "/side", 2, 1 << 20);
    params = WindowParams::hypercubic(static_cast<int>(dim), static_cast<int>(side));
  } else if (name == "grid") {
    const json& sides = require(w, "sides", path);
    if (!sides.is_array() || sides.empty()) fail(path + "/sides", "expected a non-empty array");
    std::vector<int> s;
    for (std::size_t i = 0; i < sides.size(); ++i) {
      s.push_back(static_cast<int>(as_int(sides[i], path + "/sides/" + std::to_string(i), 2, 1 << 20)));
    }
    params = WindowParams::grid(std::move(s));
  } else if (name == "regular_tree") {
    const long degree = as_int(require(w, "degree", path), path + "/degree", 3, 64);
    const long radius = as_int(require(w, "radius", path), path + "/radius", 1, 64);
    params = WindowParams::regular_tree(static_cast<int>(degree), static_cast<int>(radius));
  } else if (name == "product") {
    const json& factors = require(w, "factors", path);
    if (!factors.is_array() || factors.size() != 2) fail(path + "/factors", "expected two windows");
    params = WindowParams::product(parse_window_params(factors[0], path + "/factors/0"),
                                   parse_window_params(factors[1], path + "/factors/1"));
  } else {
    fail(path + "/family", "unknown family '" + name + "' (hypercubic, grid, regular_tree, product)");
  }
  try {
    params.validate();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    fail(path + "/" + e.field(), colon == std::string::npos ? what : what.substr(colon + 2));
  }
  return params;
}

Vertex parse_vertex(const json& v, const GraphWindow& window, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "center") return window.center();
    fail(path, "expected \"center\", an index or {\"coords\": [...]}");
  }
  if (v.is_number_integer()) {
    return static_cast<Vertex>(as_int(v, path, 0, window.num_vertices() - 1));
  }
  if (v.is_object() && v.contains("coords")) {
    if (window.params().family != Family::grid) fail(path + "/coords", "coordinates need a grid window");
    const json& c = v["coords"];
    const auto& sides = window.params().sides;
    if (!c.is_array() || c.size() != sides.size()) {
      fail(path + "/coords", "expected " + std::to_string(sides.size()) + " coordinates");
    }
    std::vector<int> coords;
    for (std::size_t i = 0; i < c.size(); ++i) {
      coords.push_back(static_cast<int>(as_int(c[i], path + "/coords/" + std::to_string(i), 0, sides[i] - 1)));
    }
    return window.vertex_at(coords);
  }
  fail(path, "expected \"center\", an index or {\"coords\": [...]}");
}

VertexSet parse_set(const json& v, const GraphWindow& window, const std::string& path) {
  if (v.is_object() && v.contains("ball")) {
    const json& ball = v["ball"];
    const Vertex c = ball.contains("center") ? parse_vertex(ball["center"], window, path + "/ball/center")
                                             : window.center();
    const long radius = as_int(require(ball, "radius", path + "/ball"), path + "/ball/radius", 0, 1 << 20);
    return window.ball(c, static_cast<int>(radius));
  }
  if (v.is_object() && v.contains("vertices")) {
    const json& list = v["vertices"];
    if (!list.is_array() || list.empty()) fail(path + "/vertices", "expected a non-empty array");
    std::vector<Vertex> members;
    for (std::size_t i = 0; i < list.size(); ++i) {
      members.push_back(parse_vertex(list[i], window, path + "/vertices/" + std::to_string(i)));
    }
    return VertexSet(std::move(members));
  }
  return VertexSet{parse_vertex(v, window, path)};
}

template <class T>
T optional_or(const json& obj, const std::string& key, T fallback) {
  return obj.contains(key) ? obj[key].get<T>() : fallback;
}

Estimand parse_estimand(const json& e, const ExperimentConfig& cfg, const std::string& path) {
  if (!e.is_object()) fail(path, "expected an object");
  const json& kind_json = require(e, "kind", path);
  if (!kind_json.is_string()) fail(path + "/kind", "expected a string");
  const auto it = kind_table().find(kind_json.get<std::string>());
  if (it == kind_table().end()) fail(path + "/kind", "unknown estimand kind '" + kind_json.get<std::string>() + "'");

  Estimand est;
  est.kind = it->second;
  est.path = path;
  est.samples = e.contains("samples")
                    ? static_cast<std::uint64_t>(as_int(e["samples"], path + "/samples", 1, 1L << 40))
                    : cfg.samples;
  const GraphWindow& window = cfg.window;
  const long edge_cap = window.num_edges() + 1;

  auto vertex = [&] {
    est.vertex = e.contains("vertex") ? parse_vertex(e["vertex"], window, path + "/vertex") : window.center();
  };
  auto set = [&] {
    est.set = e.contains("set") ? parse_set(e["set"], window, path + "/set") : VertexSet{window.center()};
  };
  auto levels = [&](bool allow_zero) { est.ps = level_list(require(e, "p", path), path + "/p", allow_zero, true); };
  auto single_level = [&](bool allow_zero, bool allow_one) {
    est.ps = {as_level(require(e, "p", path), path + "/p", allow_zero, allow_one)};
  };
  auto pair_levels = [&](bool allow_one) {
    est.p1 = as_level(require(e, "p1", path), path + "/p1", false, false);
    est.p2 = as_level(require(e, "p2", path), path + "/p2", false, allow_one);
    if (!(est.p1 < est.p2)) fail(path + "/p2", "p2 must exceed p1");
  };
  auto walkers = [&] {
    if (e.contains("walkers")) est.walkers = static_cast<std::uint64_t>(as_int(e["walkers"], path + "/walkers", 1, 1L << 40));
    if (e.contains("max_steps")) {
      est.max_steps = static_cast<std::uint64_t>(as_int(e["max_steps"], path + "/max_steps", 1, 1L << 40));
    }
  };

  switch (est.kind) {
    case EstimandKind::disconnect_prob:
    case EstimandKind::psi_sum:
    case EstimandKind::hull_menger:
      set();
      levels(true);
      break;
    case EstimandKind::cluster_tail:
      vertex();
      single_level(true, true);
      est.ns = int_list(require(e, "n", path), path + "/n", 0, window.num_vertices());
      break;
    case EstimandKind::dimension_fit:
      vertex();
      single_level(false, false);
      est.ns = int_list(require(e, "n", path), path + "/n", 1, window.num_vertices());
      break;
    case EstimandKind::capacity:
      set();
      walkers();
      break;
    case EstimandKind::repulsion_tail:
      vertex();
      pair_levels(false);
      est.ns = int_list(require(e, "n", path), path + "/n", 0, edge_cap);
      break;
    case EstimandKind::ir_prob:
      set();
      single_level(true, true);
      est.rs = int_list(require(e, "r", path), path + "/r", 0, edge_cap);
      break;
    case EstimandKind::stability:
      set();
      pair_levels(true);
      est.rs = int_list(require(e, "r", path), path + "/r", 0, edge_cap);
      break;
    case EstimandKind::azuma: {
      vertex();
      single_level(false, false);
      const json& pairs = require(e, "pairs", path);
      if (!pairs.is_array() || pairs.empty()) fail(path + "/pairs", "expected a non-empty array of [m, n]");
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string pp = path + "/pairs/" + std::to_string(i);
        if (!pairs[i].is_array() || pairs[i].size() != 2) fail(pp, "expected [m, n]");
        est.mn.emplace_back(as_int(pairs[i][0], pp + "/0", 1, 1L << 30), as_int(pairs[i][1], pp + "/1", 1, 1L << 30));
      }
      break;
    }
    case EstimandKind::markov:
      est.distributions = static_cast<int>(
          e.contains("distributions") ? as_int(e["distributions"], path + "/distributions", 1, 1000000) : 1000);
      est.support = e.contains("support") ? as_int(e["support"], path + "/support", 1, 100000) : 10;
      if (e.contains("theta")) {
        const json& t = e["theta"];
        const auto list = t.is_array() ? t : json::array({t});
        for (std::size_t i = 0; i < list.size(); ++i) {
          const double theta = as_number(list[i], path + "/theta/" + std::to_string(i));
          if (!(theta > 0.0 && theta < 1.0)) fail(path + "/theta/" + std::to_string(i), "theta must lie in (0, 1)");
          est.thetas.push_back(theta);
        }
      } else {
        est.thetas = {0.1, 0.5, 0.9};
      }
      break;
    case EstimandKind::exploration_identities:
      vertex();
      single_level(false, false);
      if (e.contains("n")) est.ns = int_list(e["n"], path + "/n", 0, 1L << 30);
      break;
    case EstimandKind::bad_set:
      vertex();
      single_level(false, false);
      est.ns = int_list(require(e, "n", path), path + "/n", 1, kMaxBadSetEdges);
      est.c = as_number(require(e, "c", path), path + "/c");
      if (!(est.c > 0.0 && est.c <= 2.0)) fail(path + "/c", "c must lie in (0, 2]");
      if (e.contains("d_prime")) {
        est.d_prime = as_number(e["d_prime"], path + "/d_prime");
        if (!(est.d_prime >= 1.0)) fail(path + "/d_prime", "d_prime must be >= 1");
      }
      est.fit_n = e.contains("fit_n") ? as_int(e["fit_n"], path + "/fit_n", 1, kMaxBadSetEdges) : 4;
      break;
    case EstimandKind::dgrsy:
      set();
      single_level(false, true);
      walkers();
      if (e.contains("p0")) {
        est.p0 = as_level(e["p0"], path + "/p0", false, true);
        est.p0_known = true;
      }
      break;
    case EstimandKind::profile: {
      vertex();
      const json& d = require(e, "d_prime", path);
      const auto list = d.is_array() ? d : json::array({d});
      for (std::size_t i = 0; i < list.size(); ++i) {
        const double x = as_number(list[i], path + "/d_prime/" + std::to_string(i));
        if (!(x >= 1.0)) fail(path + "/d_prime/" + std::to_string(i), "d_prime must be >= 1");
        est.d_primes.push_back(x);
      }
      est.max_size = static_cast<int>(as_int(require(e, "max_size", path), path + "/max_size", 1, kMaxEnumerationSize));
      if (e.contains("normalization")) {
        const std::string norm = e["normalization"].is_string() ? e["normalization"].get<std::string>() : "";
        if (norm == "degree_volume") {
          est.normalization = Normalization::degree_volume;
        } else if (norm == "vertex_count") {
          est.normalization = Normalization::vertex_count;
        } else {
          fail(path + "/normalization", "expected \"degree_volume\" or \"vertex_count\"");
        }
      }
      if (e.contains("graph")) {
        const std::string g = e["graph"].is_string() ? e["graph"].get<std::string>() : "";
        if (g == "cluster") {
          est.cluster_graph = true;
          single_level(false, true);
          if (e.contains("sample")) est.sample_index = static_cast<std::uint64_t>(as_int(e["sample"], path + "/sample", 0, 1L << 40));
        } else if (g != "window") {
          fail(path + "/graph", "expected \"window\" or \"cluster\"");
        }
      }
      if (e.contains("ambient_degree")) {
        if (!e["ambient_degree"].is_boolean()) fail(path + "/ambient_degree", "expected a boolean");
        est.ambient_degree = e["ambient_degree"].get<bool>();
      }
      if (e.contains("anneal")) {
        const json& a = e["anneal"];
        const std::string ap = path + "/anneal";
        AnnealingOptions opt;
        opt.max_size = static_cast<int>(as_int(require(a, "max_size", ap), ap + "/max_size", est.max_size, 100000));
        if (a.contains("budget")) opt.budget = as_int(a["budget"], ap + "/budget", 1, 1L << 32);
        if (a.contains("restarts")) opt.restarts = static_cast<int>(as_int(a["restarts"], ap + "/restarts", 1, 1000));
        if (a.contains("initial_temperature")) opt.initial_temperature = as_number(a["initial_temperature"], ap + "/initial_temperature");
        if (a.contains("cooling")) {
          opt.cooling = as_number(a["cooling"], ap + "/cooling");
          if (!(opt.cooling > 0.0 && opt.cooling <= 1.0)) fail(ap + "/cooling", "cooling must lie in (0, 1]");
        }
        opt.seed = cfg.seed;
        est.anneal = opt;
      }
      break;
    }
    case EstimandKind::uniform_isoperimetry:
      est.d = as_number(require(e, "d", path), path + "/d");
      if (!(est.d > 1.0)) fail(path + "/d", "d must exceed 1");
      est.max_size = static_cast<int>(as_int(require(e, "max_size", path), path + "/max_size", 1, kMaxEnumerationSize));
      break;
  }
  return est;
}

}  // namespace

std::string to_string(EstimandKind kind) {
  for (const auto& [name, k] : kind_table()) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) fail("", "config must be a JSON object");
  ExperimentConfig cfg;
  const long version = as_int(require(doc, "schema_version", ""), "/schema_version", 1, 1000);
  if (version != kSchemaVersion) fail("/schema_version", "unsupported schema version " + std::to_string(version));

  static const char* known[] = {"schema_version", "window", "samples", "seed", "ci_level", "workers",
                                "output_dir", "exhaustive", "estimands", "description"};
  for (const auto& item : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) fail("/" + item.key(), "unknown field");
  }

  const json& window_json = require(doc, "window", "");
  cfg.window = GraphWindow::build(parse_window_params(window_json, "/window"));
  if (window_json.contains("boundary")) {
    const json& b = window_json["boundary"];
    if (!b.is_array() || b.empty()) fail("/window/boundary", "expected a non-empty array of vertices");
    std::vector<Vertex> members;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string bp = "/window/boundary/" + std::to_string(i);
      const Vertex v = parse_vertex(b[i], cfg.window, bp);
      if (!cfg.window.is_geometric_boundary(v)) fail(bp, "vertex lies in the interior of the infinite graph");
      members.push_back(v);
    }
    cfg.window = cfg.window.with_boundary(VertexSet(std::move(members)));
  }

  if (doc.contains("samples")) cfg.samples = static_cast<std::uint64_t>(as_int(doc["samples"], "/samples", 1, 1L << 40));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) fail("/seed", "expected a non-negative integer");
    if (doc["seed"].is_number_integer() && doc["seed"].get<long long>() < 0) fail("/seed", "expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (seed_override) cfg.seed = *seed_override;
  if (doc.contains("ci_level")) {
    cfg.ci_level = as_number(doc["ci_level"], "/ci_level");
    if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0)) fail("/ci_level", "must lie in (0, 1)");
  }
  if (doc.contains("workers")) cfg.workers = static_cast<int>(as_int(doc["workers"], "/workers", 1, 1024));
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) fail("/output_dir", "expected a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("exhaustive")) {
    if (!doc["exhaustive"].is_boolean()) fail("/exhaustive", "expected a boolean");
    cfg.exhaustive = doc["exhaustive"].get<bool>();
  }

  const json& estimands = require(doc, "estimands", "");
  if (!estimands.is_array()) fail("/estimands", "expected an array");
  if (estimands.empty()) fail("/estimands", "no estimands");
  for (std::size_t i = 0; i < estimands.size(); ++i) {
    cfg.estimands.push_back(parse_estimand(estimands[i], cfg, "/estimands/" + std::to_string(i)));
  }

  cfg.canonical = doc;
  cfg.canonical.erase("workers");
  cfg.canonical.erase("output_dir");
  cfg.canonical["seed"] = cfg.seed;
  cfg.config_hash = sha256_hex(cfg.canonical.dump()).substr(0, 16);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, seed_override);
}

}  // namespace percolab
