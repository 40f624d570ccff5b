#pragma once

#include <span>

namespace evobo::stats {

struct PairedTest {
  double mean_difference = 0.0;  // mean of (a - b)
  double t_statistic = 0.0;
  double p_greater = 1.0;  // one-sided p-value for H1: mean(a - b) > 0
  int n = 0;
};

/// Paired Student t-test on a[i] - b[i]. Requires equal lengths >= 2.
PairedTest paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace evobo::stats
