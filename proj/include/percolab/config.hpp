#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "percolab/graph.hpp"
#include "percolab/isoperimetry.hpp"

namespace percolab {

inline constexpr int kSchemaVersion = 1;

enum class EstimandKind {
  disconnect_prob,
  psi_sum,
  cluster_tail,
  capacity,
  repulsion_tail,
  ir_prob,
  stability,
  azuma,
  markov,
  exploration_identities,
  hull_menger,
  bad_set,
  dgrsy,
  profile,
  uniform_isoperimetry,
  dimension_fit,
};

std::string to_string(EstimandKind kind);

// One validated estimand. Only the fields its kind uses are meaningful.
struct Estimand {
  EstimandKind kind = EstimandKind::disconnect_prob;
  std::string path;  // JSON pointer, e.g. "/estimands/2"
  std::uint64_t samples = 0;

  VertexSet set;
  Vertex vertex = 0;
  std::vector<double> ps;
  double p1 = 0.0;
  double p2 = 0.0;
  std::vector<long> ns;
  std::vector<long> rs;
  std::vector<std::pair<long, long>> mn;

  std::uint64_t walkers = 10000;
  std::uint64_t max_steps = 100000;
  double p0 = 0.0;
  bool p0_known = false;

  double c = 0.0;
  double d_prime = 2.0;
  long fit_n = 4;

  std::vector<double> d_primes;
  int max_size = 8;
  Normalization normalization = Normalization::degree_volume;
  bool cluster_graph = false;
  bool ambient_degree = true;
  std::uint64_t sample_index = 0;
  std::optional<AnnealingOptions> anneal;

  double d = 2.0;

  int distributions = 1000;
  long support = 10;
  std::vector<double> thetas;
};

struct ExperimentConfig {
  nlohmann::json canonical;  // hashed form: no workers, no output_dir
  GraphWindow window;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  double ci_level = 0.99;
  int workers = 1;
  std::string output_dir = "percolab-out";
  bool exhaustive = false;
  std::vector<Estimand> estimands;
  std::string config_hash;
};

// Throws ConfigError whose field() is the JSON pointer of the offending value.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace percolab
