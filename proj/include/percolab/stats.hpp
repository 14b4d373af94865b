#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace percolab {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Two-sided standard normal quantile for a confidence level, e.g. 0.99 -> 2.5758.
double normal_z(double level);

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level);

// Running sums for a bounded per-sample statistic.
struct MeanAccumulator {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) noexcept {
    ++count;
    sum += x;
    sum_sq += x * x;
  }
  void merge(const MeanAccumulator& other) noexcept {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }
};

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct MCResult {
  std::string estimand;
  double p = kNoValue;
  double p2 = kNoValue;
  long n = -1;
  long r = -1;
  long m = -1;

  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::int64_t successes = -1;  // -1 for non-indicator estimands
  std::uint64_t seed = 0;
  std::string config_hash;
  double ci_level = 0.99;
  // Indicator estimands with zero successes sit below what the sample can
  // resolve.
  bool censored = false;
  std::vector<std::string> warnings;
};

// Proportion with a Wilson interval.
MCResult proportion_result(std::uint64_t successes, std::uint64_t trials, double level);
// Sample mean with a normal interval, clamped to [lo, hi].
MCResult mean_result(const MeanAccumulator& acc, double level, double lo, double hi);

enum class Direction {
  upper,  // the bound claims quantity <= bound
  lower,  // the bound claims quantity >= bound
  two_sided,  // the bound is the exact value
};

enum class Verdict { consistent, violated, vacuous };

std::string to_string(Verdict verdict);
std::string to_string(Direction direction);

struct BoundVerdict {
  std::string check;
  double bound = 0.0;
  Direction direction = Direction::upper;
  MCResult estimate;
  // Positive when the interval sits on the permitted side: bound - ci_low
  // for upper bounds, ci_high - bound for lower bounds.
  double slack = 0.0;
  Verdict verdict = Verdict::consistent;
  bool informative = true;
  std::string caveat;
};

// Violated only when the whole interval lies on the wrong side of the
// bound. An upper bound >= vacuous_at (a lower bound <= vacuous_at) is
// reported vacuous.
BoundVerdict check_upper(std::string check, double bound, const MCResult& estimate,
                         double vacuous_at = 1.0);
BoundVerdict check_lower(std::string check, double bound, const MCResult& estimate,
                         double vacuous_at = 0.0);
// Exact reference value: violated when it falls outside the interval.
BoundVerdict check_exact(std::string check, double exact, const MCResult& estimate);

}  // namespace percolab
