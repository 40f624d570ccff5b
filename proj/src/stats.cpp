#include "evobo/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "evobo/errors.hpp"

namespace evobo::stats {

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthMismatch("paired test needs equal-length samples");
  if (a.size() < 2) throw InvalidConfig("paired test needs at least two pairs");

  PairedTest out;
  out.n = static_cast<int>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= out.n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (out.n - 1));
  out.mean_difference = mean;

  if (sd == 0.0) {
    out.t_statistic = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
    out.p_greater = mean > 0.0 ? 0.0 : (mean == 0.0 ? 0.5 : 1.0);
    return out;
  }
  out.t_statistic = mean / (sd / std::sqrt(static_cast<double>(out.n)));
  const boost::math::students_t dist(out.n - 1);
  out.p_greater = boost::math::cdf(boost::math::complement(dist, out.t_statistic));
  return out;
}

}  // namespace evobo::stats
