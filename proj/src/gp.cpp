#include "evobo/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "evobo/errors.hpp"

namespace evobo::gp {

namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * A * B.transpose()).colwise() + a2;
  d.rowwise() += b2.transpose();
  return d.cwiseMax(0.0);
}

}  // namespace

std::vector<double> lengthscale_grid() {
  constexpr int kPoints = 25;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) grid[i] = std::pow(10.0, -2.0 + 4.0 * i / (kPoints - 1));
  return grid;
}

GPModel gp_fit(const Eigen::MatrixXd& X, std::span<const double> y) {
  const auto n = X.rows();
  if (n < 2) throw InvalidConfig("gp_fit needs at least two observations");
  if (static_cast<Eigen::Index>(y.size()) != n) throw LengthMismatch("X and y row counts differ");
  if (!X.allFinite()) throw InvalidConfig("gp_fit inputs must be finite");
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  if (!yv.allFinite()) throw InvalidConfig("gp_fit targets must be finite");

  GPModel model;
  model.X_ = X;
  model.y_mean_ = yv.mean();
  const double var = (yv.array() - model.y_mean_).square().sum() / static_cast<double>(n);
  model.y_scale_ = std::sqrt(var);
  if (!(model.y_scale_ > 1e-12 * std::max(1.0, std::abs(model.y_mean_)))) {
    model.degenerate_ = true;
    model.y_scale_ = 1.0;
  }
  const Eigen::VectorXd z = model.degenerate_ ? Eigen::VectorXd::Zero(n)
                                              : Eigen::VectorXd((yv.array() - model.y_mean_) / model.y_scale_);

  const Eigen::MatrixXd d2 = squared_distances(X, X);
  constexpr double log2pi = 1.8378770664093453;  // log(2*pi)

  bool found = false;
  for (double ell : lengthscale_grid()) {
    const Eigen::MatrixXd K = (-0.5 * d2 / (ell * ell)).array().exp().matrix() * model.signal_variance_;
    for (double jitter = kInitialJitter; jitter <= kMaxJitter * 1.0000001; jitter *= 10.0) {
      Eigen::MatrixXd Kj = K;
      Kj.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(Kj);
      if (llt.info() != Eigen::Success) continue;
      const Eigen::MatrixXd& L = llt.matrixL();
      if ((L.diagonal().array() <= 0.0).any()) continue;
      const Eigen::VectorXd alpha = llt.solve(z);
      const double lml = -0.5 * z.dot(alpha) - L.diagonal().array().log().sum() -
                         0.5 * static_cast<double>(n) * log2pi;
      if (!std::isfinite(lml)) continue;
      if (!found || lml > model.lml_) {
        found = true;
        model.lml_ = lml;
        model.lengthscale_ = ell;
        model.jitter_ = jitter;
        model.alpha_ = alpha;
        model.llt_ = std::move(llt);
      }
      break;
    }
  }
  if (!found) throw SingularKernel("kernel matrix not positive definite at maximum jitter");
  return model;
}

GPModel::Prediction GPModel::predict(const Eigen::MatrixXd& queries) const {
  Prediction p;
  const auto m = queries.rows();
  if (m == 0) {
    p.mean.resize(0);
    p.stddev.resize(0);
    return p;
  }
  if (queries.cols() != X_.cols())
    throw DimensionMismatch("query dimension " + std::to_string(queries.cols()) + " does not match " +
                            std::to_string(X_.cols()));

  const Eigen::MatrixXd Ks =
      (-0.5 * squared_distances(queries, X_) / (lengthscale_ * lengthscale_)).array().exp().matrix() *
      signal_variance_;
  p.mean = (Ks * alpha_).array() * y_scale_ + y_mean_;
  const Eigen::MatrixXd V = llt_.matrixL().solve(Ks.transpose());
  const Eigen::VectorXd var = (signal_variance_ - V.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
  p.stddev = var.array().sqrt() * y_scale_;
  return p;
}

Eigen::VectorXd lcb(const Eigen::VectorXd& means, const Eigen::VectorXd& stds, double kappa) {
  if (means.size() != stds.size()) throw LengthMismatch("means and stds differ in length");
  if (kappa < 0.0) throw InvalidConfig("kappa must be non-negative");
  return means - kappa * stds;
}

Eigen::Index argmin(const Eigen::VectorXd& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  return best;
}

}  // namespace evobo::gp
