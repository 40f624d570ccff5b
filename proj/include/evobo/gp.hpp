#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace evobo::gp {

/// Isotropic squared-exponential Gaussian process on standardized targets.
/// Immutable after fit.
class GPModel {
 public:
  struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
  };

  /// Posterior mean and standard deviation for each row of `queries`, on the
  /// original target scale. Throws DimensionMismatch.
  Prediction predict(const Eigen::MatrixXd& queries) const;

  double lengthscale() const noexcept { return lengthscale_; }
  double signal_variance() const noexcept { return signal_variance_; }
  double jitter() const noexcept { return jitter_; }
  double log_marginal_likelihood() const noexcept { return lml_; }
  double target_mean() const noexcept { return y_mean_; }
  double target_scale() const noexcept { return y_scale_; }
  /// True when all targets were equal; predictions then return that constant.
  bool degenerate_targets() const noexcept { return degenerate_; }
  int dim() const noexcept { return static_cast<int>(X_.cols()); }
  int size() const noexcept { return static_cast<int>(X_.rows()); }

 private:
  friend GPModel gp_fit(const Eigen::MatrixXd& X, std::span<const double> y);

  Eigen::MatrixXd X_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double lengthscale_ = 1.0;
  double signal_variance_ = 1.0;
  double jitter_ = 0.0;
  double lml_ = 0.0;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  bool degenerate_ = false;
};

/// Fixed log-spaced lengthscale grid searched by gp_fit.
std::vector<double> lengthscale_grid();

inline constexpr double kInitialJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-2;

/// Standardizes targets, picks the lengthscale with the highest log marginal
/// likelihood on the grid and factorizes with escalating jitter.
/// Needs at least two rows. Throws SingularKernel when no jitter level works.
GPModel gp_fit(const Eigen::MatrixXd& X, std::span<const double> y);

/// mean - kappa * std, elementwise. Throws LengthMismatch.
Eigen::VectorXd lcb(const Eigen::VectorXd& means, const Eigen::VectorXd& stds, double kappa);

/// Index of the smallest value; ties go to the lowest index.
Eigen::Index argmin(const Eigen::VectorXd& values);

}  // namespace evobo::gp
