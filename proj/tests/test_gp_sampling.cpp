#include <doctest.h>

#include <cmath>
#include <random>

#include "evobo/errors.hpp"
#include "evobo/gp.hpp"
#include "evobo/sampling.hpp"

using namespace evobo;

TEST_CASE("sobol points are deterministic and seed-dependent") {
  const auto a = sampling::sobol(64, 3, 7);
  const auto b = sampling::sobol(64, 3, 7);
  const auto c = sampling::sobol(64, 3, 8);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() < 1.0);
  // A shifted Sobol net still puts exactly one point in each of the 64 cells
  // of a 8 x 8 grid over the first two coordinates.
  std::vector<int> cells(64, 0);
  for (int i = 0; i < 64; ++i) ++cells[static_cast<std::size_t>(int(a(i, 0) * 8) * 8 + int(a(i, 1) * 8))];
  for (int n : cells) CHECK(n == 1);
}

TEST_CASE("sample_points projects onto the sphere, then clips") {
  const sampling::Box box{3, -5.0, 5.0};
  const auto unit = sampling::sample_points(4, Eigen::VectorXd::Zero(3), 1.0, box, 1);
  CHECK(unit.rows() == 4);
  for (int i = 0; i < unit.rows(); ++i) CHECK(unit.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));

  const auto corner = sampling::sample_points(50, Eigen::VectorXd::Constant(3, 5.0), 2.0, box, 2);
  CHECK(corner.minCoeff() >= -5.0);
  CHECK(corner.maxCoeff() <= 5.0);

  CHECK(sampling::sample_points(16, Eigen::VectorXd::Zero(3), 2.0, box, 9) ==
        sampling::sample_points(16, Eigen::VectorXd::Zero(3), 2.0, box, 9));

  const auto full = sampling::sample_box(100, box, 3);
  CHECK(full.minCoeff() >= -5.0);
  CHECK(full.maxCoeff() <= 5.0);
}

TEST_CASE("gp fit on three distinct points needs little jitter") {
  Eigen::MatrixXd X(3, 2);
  X << 0.0, 0.0, 1.0, 0.5, -1.0, 2.0;
  const std::vector<double> y{1.0, 2.0, 0.5};
  const auto model = gp::gp_fit(X, y);
  CHECK(model.jitter() <= 1e-6);
  CHECK(model.size() == 3);
  CHECK(model.dim() == 2);
}

TEST_CASE("duplicate rows succeed through jitter escalation") {
  Eigen::MatrixXd X(4, 2);
  X << 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0;
  const std::vector<double> y{1.0, 1.1, 2.0, 2.1};
  const auto model = gp::gp_fit(X, y);
  CHECK(model.jitter() >= gp::kInitialJitter);
  CHECK(model.jitter() <= gp::kMaxJitter);
  const auto p = model.predict(X);
  for (int i = 0; i < 4; ++i) CHECK(std::isfinite(p.mean(i)));
}

TEST_CASE("constant targets give constant predictions") {
  Eigen::MatrixXd X(3, 1);
  X << -1.0, 0.0, 2.0;
  const std::vector<double> y{4.0, 4.0, 4.0};
  const auto model = gp::gp_fit(X, y);
  CHECK(model.degenerate_targets());
  Eigen::MatrixXd Q(2, 1);
  Q << 0.5, 10.0;
  const auto p = model.predict(Q);
  CHECK(p.mean(0) == 4.0);
  CHECK(p.mean(1) == 4.0);
}

TEST_CASE("gp interpolates training data and reverts to the prior far away") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::MatrixXd X(12, 2);
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    X(i, 0) = u(rng);
    X(i, 1) = u(rng);
    y.push_back(std::sin(X(i, 0)) + X(i, 1) * X(i, 1));
  }
  const auto model = gp::gp_fit(X, y);
  REQUIRE(model.jitter() == gp::kInitialJitter);
  const auto at_data = model.predict(X);
  for (int i = 0; i < 12; ++i) {
    CHECK(std::abs(at_data.mean(i) - y[static_cast<std::size_t>(i)]) <= 1e-4);
    CHECK(at_data.stddev(i) <= 1e-3);
  }

  Eigen::MatrixXd far(1, 2);
  far << 1e4, -1e4;
  const auto p = model.predict(far);
  const double prior_std = model.target_scale() * std::sqrt(model.signal_variance());
  CHECK(std::abs(p.stddev(0) - prior_std) <= 1e-3);
  CHECK(std::abs(p.mean(0) - model.target_mean()) <= 1e-3);

  const auto empty = model.predict(Eigen::MatrixXd(0, 2));
  CHECK(empty.mean.size() == 0);
  CHECK(empty.stddev.size() == 0);
  CHECK_THROWS_AS(model.predict(Eigen::MatrixXd::Zero(1, 3)), DimensionMismatch);

  // Predictive spread is never negative.
  for (int i = 0; i < 500; ++i) {
    Eigen::MatrixXd q(1, 2);
    q << 3 * u(rng), 3 * u(rng);
    CHECK(model.predict(q).stddev(0) >= 0.0);
  }
}

TEST_CASE("lengthscale grid and fit preconditions") {
  const auto grid = gp::lengthscale_grid();
  CHECK(grid.size() == 25);
  CHECK(grid.front() == doctest::Approx(1e-2));
  CHECK(grid.back() == doctest::Approx(1e2));
  CHECK_THROWS_AS(gp::gp_fit(Eigen::MatrixXd::Zero(1, 2), std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(gp::gp_fit(Eigen::MatrixXd::Zero(3, 2), std::vector<double>{1.0, 2.0}), LengthMismatch);
}

TEST_CASE("lower confidence bound and argmin") {
  Eigen::VectorXd m(2), s(2);
  m << 1.0, 1.0;
  s << 0.1, 0.5;
  const auto a = gp::lcb(m, s, 2.0);
  CHECK(a(0) == doctest::Approx(0.8));
  CHECK(a(1) == doctest::Approx(0.0));
  CHECK(gp::argmin(a) == 1);
  CHECK(gp::lcb(m, s, 0.0) == m);

  Eigen::VectorXd ties(4);
  ties << 3.0, 1.0, 1.0, 2.0;
  CHECK(gp::argmin(ties) == 1);
  CHECK_THROWS_AS(gp::lcb(m, Eigen::VectorXd::Zero(3), 1.0), LengthMismatch);

  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> small(0, 5);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd v(30);
    for (int i = 0; i < 30; ++i) v(i) = small(rng);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
      if (v(i) < v(best)) best = i;
    CHECK(gp::argmin(v) == best);
  }
}
