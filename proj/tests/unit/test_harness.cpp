#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "percolab/config.hpp"
#include "percolab/harness.hpp"

using namespace percolab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("percolab-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.in.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

int run(const std::string& command, const fs::path& config, const fs::path& out, std::string* err_text = nullptr,
        std::optional<int> workers = std::nullopt) {
  CommandOptions o;
  o.command = command;
  o.config_path = config.string();
  o.out = out.string();
  o.workers = workers;
  std::ostringstream log, err;
  const int code = run_command(o, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

json small_config() {
  return json::parse(R"({
    "schema_version": 1,
    "window": {"family": "hypercubic", "dim": 2, "side": 11},
    "samples": 1500,
    "seed": 2,
    "estimands": [
      {"kind": "disconnect_prob", "set": {"ball": {"radius": 1}}, "p": [0.5, 0.6]},
      {"kind": "cluster_tail", "p": 0.55, "n": [1, 2, 4, 8]},
      {"kind": "repulsion_tail", "p1": 0.55, "p2": 0.7, "n": [0, 1, 2, 3]},
      {"kind": "azuma", "p": 0.6, "pairs": [[50, 20], [100, 40]]},
      {"kind": "exploration_identities", "p": 0.6, "n": [5, 20]},
      {"kind": "markov", "distributions": 200},
      {"kind": "profile", "d_prime": [2], "max_size": 5},
      {"kind": "uniform_isoperimetry", "d": 2, "max_size": 4}
    ]
  })");
}

}  // namespace

TEST_CASE("empty estimand list is a config error") {
  TempDir tmp;
  json doc = small_config();
  doc["estimands"] = json::array();
  std::string err;
  CHECK(run("estimate", write_config(tmp.path, doc), tmp.path / "out", &err) == kExitConfig);
  CHECK(err.find("no estimands") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "out"));
}

TEST_CASE("missing config file is a config error") {
  TempDir tmp;
  CHECK(run("estimate", tmp.path / "absent.json", tmp.path / "out") == kExitConfig);
}

TEST_CASE("commands write outputs and a consistent manifest") {
  TempDir tmp;
  const fs::path cfg = write_config(tmp.path, small_config());
  const fs::path out = tmp.path / "run";
  CHECK(run("estimate", cfg, out) == kExitOk);
  CHECK(run("verify", cfg, out) == kExitOk);
  CHECK(run("profile", cfg, out) == kExitOk);
  CHECK(run("simulate", cfg, out) == kExitOk);
  CommandOptions rep;
  rep.command = "report";
  rep.out = out.string();
  std::ostringstream log, err;
  CHECK(run_command(rep, log, err) == kExitOk);

  for (const char* f : {"results.csv", "verdicts.csv", "profile.csv", "samples.jsonl", "plot.csv", "config.json"}) {
    CHECK(fs::exists(out / f));
  }
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["config_hash"] == parse_config(small_config()).config_hash);
  for (const auto& [name, entry] : manifest["outputs"].items()) {
    CHECK(entry["sha256"] == sha256_hex(slurp(out / name)));
  }
  const std::string verdicts = slurp(out / "verdicts.csv");
  CHECK(verdicts.find(",violated,") == std::string::npos);
  CHECK(verdicts.find("markov") != std::string::npos);
  CHECK(slurp(out / "results.csv").find("cluster_tail") != std::string::npos);
  CHECK(slurp(out / "plot.csv").find("log_n") != std::string::npos);
  for (const auto& entry : fs::directory_iterator(out)) CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("reruns are byte-identical across worker counts") {
  TempDir tmp;
  const fs::path cfg = write_config(tmp.path, small_config());
  std::string first_results, first_verdicts;
  for (int workers : {1, 3}) {
    const fs::path out = tmp.path / ("w" + std::to_string(workers));
    REQUIRE(run("estimate", cfg, out, nullptr, workers) == kExitOk);
    REQUIRE(run("verify", cfg, out, nullptr, workers) == kExitOk);
    if (workers == 1) {
      first_results = slurp(out / "results.csv");
      first_verdicts = slurp(out / "verdicts.csv");
    } else {
      CHECK(slurp(out / "results.csv") == first_results);
      CHECK(slurp(out / "verdicts.csv") == first_verdicts);
    }
  }
}

TEST_CASE("exhaustive verification on the corner square") {
  TempDir tmp;
  const json doc = json::parse(R"({
    "schema_version": 1,
    "window": {"family": "hypercubic", "dim": 2, "side": 2, "boundary": [3]},
    "samples": 20000,
    "seed": 1,
    "exhaustive": true,
    "estimands": [
      {"kind": "disconnect_prob", "set": {"vertices": [0]}, "p": [0.3, 0.6]},
      {"kind": "psi_sum", "set": {"vertices": [0]}, "p": [0.3, 0.6]},
      {"kind": "cluster_tail", "vertex": 0, "p": 0.5, "n": [1, 2, 3, 4]},
      {"kind": "repulsion_tail", "vertex": 0, "p1": 0.4, "p2": 0.7, "n": [0, 1, 2]},
      {"kind": "ir_prob", "set": {"vertices": [0]}, "p": 0.6, "r": [0, 1]},
      {"kind": "azuma", "vertex": 0, "p": 0.5, "pairs": [[4, 1], [4, 2]]},
      {"kind": "capacity", "set": {"vertices": [0]}, "walkers": 20000}
    ]
  })");
  const fs::path out = tmp.path / "run";
  std::string err;
  CHECK(run("verify", write_config(tmp.path, doc), out, &err) == kExitOk);
  const std::string verdicts = slurp(out / "verdicts.csv");
  CHECK(verdicts.find("oracle:disconnect_prob") != std::string::npos);
  CHECK(verdicts.find("oracle:conditional_law_tv") != std::string::npos);
  CHECK(verdicts.find(",violated,") == std::string::npos);
}

TEST_CASE("report needs a run directory") {
  CommandOptions o;
  o.command = "report";
  o.out = "/nonexistent/percolab";
  std::ostringstream log, err;
  CHECK(run_command(o, log, err) == kExitConfig);
}
