#include <doctest.h>

#include "percolab/config.hpp"
#include "percolab/error.hpp"

using namespace percolab;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "schema_version": 1,
    "window": {"family": "hypercubic", "dim": 2, "side": 9},
    "samples": 100,
    "seed": 3,
    "estimands": [{"kind": "disconnect_prob", "set": {"ball": {"center": "center", "radius": 1}}, "p": [0.5, 0.6]}]
  })");
}

std::string error_field(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("a valid config parses") {
  const auto cfg = parse_config(base());
  CHECK(cfg.window.num_vertices() == 81);
  CHECK(cfg.seed == 3);
  REQUIRE(cfg.estimands.size() == 1);
  CHECK(cfg.estimands[0].set.size() == 5);
  CHECK(cfg.estimands[0].ps.size() == 2);
  CHECK(cfg.config_hash.size() == 16);
}

TEST_CASE("errors name the offending path") {
  json doc = base();
  doc["estimands"] = json::array();
  CHECK(error_field(doc) == "/estimands");

  doc = base();
  doc["estimands"][0]["p"] = {0.5, 1.5};
  CHECK(error_field(doc) == "/estimands/0/p/1");

  doc = base();
  doc["estimands"][0]["kind"] = "nonsense";
  CHECK(error_field(doc) == "/estimands/0/kind");

  doc = base();
  doc["window"]["side"] = 1;
  CHECK(error_field(doc).rfind("/window", 0) == 0);

  doc = base();
  doc["surprise"] = true;
  CHECK(error_field(doc) == "/surprise");

  doc = base();
  doc.erase("schema_version");
  CHECK(error_field(doc) == "/schema_version");
}

TEST_CASE("workers and output directory do not change the hash") {
  json doc = base();
  const auto a = parse_config(doc);
  doc["workers"] = 4;
  doc["output_dir"] = "elsewhere";
  const auto b = parse_config(doc);
  CHECK(a.config_hash == b.config_hash);
  const auto c = parse_config(base(), 99);
  CHECK(c.seed == 99);
  CHECK(c.config_hash != a.config_hash);
}

TEST_CASE("integer ranges and vertex specs") {
  json doc = base();
  doc["estimands"] = json::parse(R"([{"kind": "cluster_tail", "vertex": {"coords": [1, 2]}, "p": 0.5,
                                     "n": {"from": 1, "to": 10, "step": 3}}])");
  const auto cfg = parse_config(doc);
  CHECK(cfg.estimands[0].ns == std::vector<long>{1, 4, 7, 10});
  const int coords[] = {1, 2};
  CHECK(cfg.estimands[0].vertex == cfg.window.vertex_at(coords));
}

TEST_CASE("narrowed boundary must lie on the geometric boundary") {
  json doc = base();
  doc["window"] = json::parse(R"({"family": "hypercubic", "dim": 2, "side": 3, "boundary": [4]})");
  CHECK(error_field(doc) == "/window/boundary/0");
  doc["window"]["boundary"] = {8};
  CHECK(parse_config(doc).window.boundary().size() == 1);
}

TEST_CASE("sha256 reference") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
