#include "percolab/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "percolab/error.hpp"

namespace percolab {

double normal_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + level / 2.0);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw DomainError("wilson_interval: successes exceed trials");
  const double z = normal_z(level);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // Keep the point estimate inside the interval despite rounding.
  out.low = std::min(out.low, phat);
  out.high = std::max(out.high, phat);
  if (successes == 0) out.low = 0.0;
  if (successes == trials) out.high = 1.0;
  return out;
}

MCResult proportion_result(std::uint64_t successes, std::uint64_t trials, double level) {
  MCResult r;
  r.samples = trials;
  r.successes = static_cast<std::int64_t>(successes);
  r.ci_level = level;
  r.estimate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  r.std_error = trials ? std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials)) : 0.0;
  const Interval ci = wilson_interval(successes, trials, level);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.censored = trials > 0 && successes == 0;
  return r;
}

MCResult mean_result(const MeanAccumulator& acc, double level, double lo, double hi) {
  MCResult r;
  r.samples = acc.count;
  r.ci_level = level;
  if (acc.count == 0) {
    r.ci_low = lo;
    r.ci_high = hi;
    return r;
  }
  const double n = static_cast<double>(acc.count);
  r.estimate = std::clamp(acc.sum / n, lo, hi);
  double variance = 0.0;
  if (acc.count > 1) variance = std::max(0.0, (acc.sum_sq - acc.sum * acc.sum / n) / (n - 1.0));
  r.std_error = std::sqrt(variance / n);
  const double half = normal_z(level) * r.std_error;
  r.ci_low = std::clamp(r.estimate - half, lo, hi);
  r.ci_high = std::clamp(r.estimate + half, lo, hi);
  return r;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::consistent: return "consistent";
    case Verdict::violated: return "violated";
    case Verdict::vacuous: return "vacuous";
  }
  return "unknown";
}

std::string to_string(Direction direction) {
  switch (direction) {
    case Direction::upper: return "upper";
    case Direction::lower: return "lower";
    case Direction::two_sided: return "two_sided";
  }
  return "unknown";
}

BoundVerdict check_upper(std::string check, double bound, const MCResult& estimate,
                         double vacuous_at) {
  BoundVerdict v;
  v.check = std::move(check);
  v.bound = bound;
  v.direction = Direction::upper;
  v.estimate = estimate;
  v.slack = bound - estimate.ci_low;
  if (bound >= vacuous_at) {
    v.verdict = Verdict::vacuous;
  } else {
    v.verdict = estimate.ci_low > bound ? Verdict::violated : Verdict::consistent;
  }
  return v;
}

BoundVerdict check_lower(std::string check, double bound, const MCResult& estimate,
                         double vacuous_at) {
  BoundVerdict v;
  v.check = std::move(check);
  v.bound = bound;
  v.direction = Direction::lower;
  v.estimate = estimate;
  v.slack = estimate.ci_high - bound;
  if (bound <= vacuous_at) {
    v.verdict = Verdict::vacuous;
  } else {
    v.verdict = estimate.ci_high < bound ? Verdict::violated : Verdict::consistent;
  }
  return v;
}

BoundVerdict check_exact(std::string check, double exact, const MCResult& estimate) {
  BoundVerdict v;
  v.check = std::move(check);
  v.bound = exact;
  v.direction = Direction::two_sided;
  v.estimate = estimate;
  v.slack = std::min(exact - estimate.ci_low, estimate.ci_high - exact);
  v.verdict = v.slack < 0.0 ? Verdict::violated : Verdict::consistent;
  return v;
}

}  // namespace percolab
