#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "percolab/graph.hpp"
#include "percolab/percolation.hpp"

namespace percolab {

// Largest set size the public enumerators accept.
inline constexpr int kMaxEnumerationSize = 14;
// Largest touching-edge count accepted by bad_set_search.
inline constexpr int kMaxBadSetEdges = 40;

// Graph on which isoperimetric ratios are measured: the full window or one
// percolation cluster. `degree` is the degree used for volumes and edge
// boundaries; it may exceed adj[v].size() when edges leaving the graph
// (e.g. out of the window) still count as boundary.
struct LocalGraph {
  std::vector<std::vector<int>> adj;
  std::vector<int> degree;
  std::vector<Vertex> origin;

  int size() const noexcept { return static_cast<int>(adj.size()); }
  // Local index of a window vertex, or -1.
  int local_of(Vertex v) const;

  // ambient_degree: count missing neighbours of window-boundary vertices
  // as boundary edges, so ratios refer to the infinite graph.
  static LocalGraph from_window(const GraphWindow& window, bool ambient_degree);
  // The open cluster of v as a graph in its own right, v at local index 0.
  // With max_depth >= 0 only vertices within that open-graph distance of v
  // are kept; degrees stay the full open degree.
  static LocalGraph from_cluster(const GraphWindow& window, const Configuration& config, Vertex v,
                                 int max_depth = -1);
  static LocalGraph from_edges(int vertices, std::span<const std::pair<int, int>> edges);
};

// Isoperimetric function phi. Increasing with phi(t) <= t.
class IsoFunction {
 public:
  // t^((d'-1)/d'), d' >= 1.
  static IsoFunction power(double d_prime);
  // Piecewise linear through (0, 0) and the given points, extended with the
  // last slope. Points must be strictly increasing in both coordinates with
  // phi(t) <= t and a last slope of at most 1.
  static IsoFunction tabulated(std::vector<std::pair<double, double>> points);

  double operator()(double t) const;
  bool is_power() const noexcept { return table_.empty(); }
  double dimension() const noexcept { return d_prime_; }
  std::string describe() const;

 private:
  double d_prime_ = 2.0;
  std::vector<std::pair<double, double>> table_;
};

// phi(t) / log(2 t / phi(t)). Throws DomainError if t <= 0 or phi(t) > t.
double psi(const IsoFunction& phi, double t);

// Calls visit(members) once for every connected vertex set of size at most
// max_size that contains `anchor`. Each set is generated from a unique
// parent, so no set is reported twice. Throws Refusal above
// kMaxEnumerationSize.
void enumerate_anchored_sets(const LocalGraph& graph, int anchor, int max_size,
                             const std::function<void(std::span<const int>)>& visit);
std::uint64_t count_anchored_sets(const LocalGraph& graph, int anchor, int max_size);

enum class Normalization {
  degree_volume,  // |dW| / phi(sum of degrees)
  vertex_count,   // |dW| / phi(|W|)
};
std::string to_string(Normalization norm);

struct ProfileResult {
  int size = 0;                // |W|
  std::vector<Vertex> witness;  // window vertex ids
  double ratio = 0.0;
  long boundary = 0;
  long volume = 0;
  bool exact = false;
  Normalization normalization = Normalization::degree_volume;
};

struct AnnealingOptions {
  int max_size = 0;          // heuristic sizes run from (exact max_size + 1) up to this
  long budget = 20000;       // proposals per restart
  int restarts = 4;
  double initial_temperature = 0.5;
  double cooling = 0.9995;   // geometric, per proposal
  std::uint64_t seed = 0;
};

// Minimum ratio for each set size 1..max_size (exact enumeration), then
// annealed upper bounds for larger sizes when `heuristic` is given.
std::vector<ProfileResult> anchored_profile(const LocalGraph& graph, int anchor,
                                            const IsoFunction& phi, int max_size,
                                            Normalization norm,
                                            const AnnealingOptions* heuristic = nullptr);

// Annealed upper bound on the minimum ratio over anchored connected sets of
// exactly `size` vertices. nullopt when the graph is too small.
std::optional<ProfileResult> anneal_anchored(const LocalGraph& graph, int anchor, int size,
                                             const IsoFunction& phi, Normalization norm,
                                             const AnnealingOptions& options);

struct UniformCheck {
  double constant = 0.0;  // smallest observed |dW| / (sum deg)^((d-1)/d)
  std::vector<Vertex> witness;
  std::vector<double> min_by_size;  // index k -> minimum over sets of size k+1
  std::uint64_t sets_examined = 0;
};

// Minimum over every connected set of the graph with at most max_size vertices.
UniformCheck check_uniform_isoperimetry(const LocalGraph& graph, double d, int max_size);

struct BadSetWitness {
  std::vector<Vertex> members;
  long touching_edges = 0;  // |E(W)| in the window
  long open_boundary = 0;   // |d_p W|
  double threshold = 0.0;
};

// Searches for a connected W in the open cluster of v with v in W,
// |E(W)| = n and |d_p W| <= threshold(|W|). nullopt certifies that none
// exists. Throws Refusal when n exceeds kMaxBadSetEdges.
std::optional<BadSetWitness> bad_set_search(const GraphWindow& window, const Configuration& config,
                                            Vertex v, int n,
                                            const std::function<double(int)>& threshold);
std::optional<BadSetWitness> bad_set_search(const GraphWindow& window, const Configuration& config,
                                            Vertex v, int n, double threshold);

struct DimensionFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  double d_prime = 0.0;
  double d_prime_se = 0.0;
  int points = 0;
};

// Minimum n used by fit_dimension; smaller n are dropped.
inline constexpr double kFitMinN = 8.0;

// Least-squares slope of log(-log p_n) on log n, d' = 1/(1 - slope).
// Input pairs are (n, -log p_n). Throws Refusal on fewer than five usable
// points or a slope outside (0, 1).
DimensionFit fit_dimension(std::span<const std::pair<double, double>> tail);

// c minimising sum (y - c n^exponent)^2 over the (n, y = -log p_n) pairs.
double fit_tail_constant(std::span<const std::pair<double, double>> tail, double exponent);

}  // namespace percolab
