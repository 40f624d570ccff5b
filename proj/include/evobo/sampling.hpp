#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

namespace evobo::sampling {

/// Axis-aligned box [lower, upper]^dim.
struct Box {
  int dim = 0;
  double lower = -5.0;
  double upper = 5.0;

  double range() const noexcept { return upper - lower; }
  double center() const noexcept { return 0.5 * (lower + upper); }
};

/// First `n` points of a digitally shifted Sobol sequence in [0,1)^dim, one
/// point per row. The shift is derived from `seed`.
Eigen::MatrixXd sobol(int n, int dim, std::uint64_t seed);

/// Sobol points scaled to [-1,1]^d, projected onto the unit sphere, scaled to
/// `radius`, translated to `center` and clipped to the box. One point per row.
Eigen::MatrixXd sample_points(int n, const Eigen::VectorXd& center, double radius, const Box& box,
                              std::uint64_t seed);

/// Sobol points spread over the whole box, one per row.
Eigen::MatrixXd sample_box(int n, const Box& box, std::uint64_t seed);

}  // namespace evobo::sampling
