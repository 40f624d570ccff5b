#include "evobo/sampling.hpp"

#include <random>

#include <boost/random/sobol.hpp>

#include "evobo/errors.hpp"

namespace evobo::sampling {

Eigen::MatrixXd sobol(int n, int dim, std::uint64_t seed) {
  if (n < 0 || dim < 1) throw InvalidConfig("sobol needs n >= 0 and dim >= 1");
  // 64-bit engine; the leading bits carry the sequence.
  boost::random::sobol_engine<std::uint64_t, 64> engine(static_cast<std::size_t>(dim));
  std::mt19937_64 shift_rng(seed);
  std::vector<std::uint64_t> shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = shift_rng();

  // Boost starts at the second point; the origin goes first so that every
  // prefix of length 2^m is a full net.
  Eigen::MatrixXd out(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) {
      const std::uint64_t raw = i == 0 ? 0 : engine();
      out(i, j) = static_cast<double>((raw ^ shift[static_cast<std::size_t>(j)]) >> 11) * 0x1.0p-53;
    }
  return out;
}

Eigen::MatrixXd sample_points(int n, const Eigen::VectorXd& center, double radius, const Box& box,
                              std::uint64_t seed) {
  if (center.size() != box.dim) throw DimensionMismatch("sample center does not match box dimension");
  Eigen::MatrixXd pts = (2.0 * sobol(n, box.dim, seed).array() - 1.0).matrix();
  for (int i = 0; i < n; ++i) {
    const double norm = pts.row(i).norm();
    if (norm > 0.0) {
      pts.row(i) /= norm;
    } else {
      pts.row(i).setZero();
      pts(i, 0) = 1.0;
    }
  }
  pts *= radius;
  pts.rowwise() += center.transpose();
  return pts.cwiseMax(box.lower).cwiseMin(box.upper);
}

Eigen::MatrixXd sample_box(int n, const Box& box, std::uint64_t seed) {
  return (box.lower + box.range() * sobol(n, box.dim, seed).array()).matrix();
}

}  // namespace evobo::sampling
