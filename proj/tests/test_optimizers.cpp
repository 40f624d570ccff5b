#include <doctest.h>

#include <cmath>

#include "evobo/errors.hpp"
#include "evobo/optimizers.hpp"
#include "evobo/session.hpp"

using namespace evobo;
using namespace evobo::optimizers;

TEST_CASE("initial design size") {
  CHECK(initial_design_size(5, 100) == 20);
  CHECK(initial_design_size(2, 100) == 20);
  CHECK(initial_design_size(2, 50) == 10);
  CHECK(initial_design_size(5, 300) == 50);
  CHECK(initial_design_size(2, 5) == 1);
  CHECK(initial_design_size(2, 5, 5) == 5);
}

TEST_CASE("trust region recurrence with defaults") {
  TrustRegionState s;
  for (int i = 0; i < 10; ++i) s.adapt(true, true);
  CHECK(std::abs(s.r - 2.5 * std::pow(0.95, 10)) <= 1e-12);
  CHECK(std::abs(s.kappa - 2.0 / std::pow(0.95, 10)) <= 1e-12);
  CHECK(s.r == doctest::Approx(1.497).epsilon(1e-3));
  CHECK(s.kappa == doctest::Approx(3.340).epsilon(1e-3));

  TrustRegionState k;
  for (int i = 1; i <= 31; ++i) k.adapt(true, true);
  CHECK(k.kappa < 10.0);
  k.adapt(true, true);
  CHECK(k.kappa == 10.0);
  for (int i = 0; i < 100; ++i) {
    k.adapt(true, true);
    CHECK(k.kappa == 10.0);
    CHECK(k.r >= kMinRadius);
  }
  CHECK(k.r == kMinRadius);

  TrustRegionState fixed;
  for (int i = 0; i < 50; ++i) fixed.adapt(false, false);
  CHECK(fixed.r == 2.5);
  CHECK(fixed.kappa == 2.0);
}

TEST_CASE("atrbo run dynamics, bounds and monotone trace") {
  const auto f = suite::make_instance({6, 1, 3});
  RunDiagnostics diag;
  EvalSession session(f, 60, 4);
  atrbo(session, {}, &diag);
  CHECK(session.evaluations() == 60);
  CHECK(diag.n_init == 12);
  CHECK(diag.iterations.size() == 48);
  for (const auto& p : session.points())
    for (double v : p) {
      CHECK(v >= -5.0);
      CHECK(v <= 5.0);
    }
  const auto& v = session.trace().values();
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] <= v[i - 1]);

  for (std::size_t i = 0; i < diag.iterations.size(); ++i) {
    const auto& it = diag.iterations[i];
    CHECK(std::abs(it.r - std::max(kMinRadius, 2.5 * std::pow(0.95, double(i + 1)))) <= 1e-12);
    CHECK(std::abs(it.kappa - std::min(kMaxKappa, 2.0 / std::pow(0.95, double(i + 1)))) <= 1e-12);
    if (i > 0) {
      const auto& prev = diag.iterations[i - 1];
      if (prev.r > kMinRadius) CHECK(it.r < prev.r);
      if (prev.kappa < kMaxKappa) CHECK(it.kappa > prev.kappa);
      if (prev.kappa == kMaxKappa) CHECK(it.kappa == kMaxKappa);
    }
  }
  CHECK(diag.iterations[31].kappa == kMaxKappa);
  CHECK(diag.iterations[30].kappa < kMaxKappa);
}

TEST_CASE("atrbo with adaptation off keeps the initial radius and kappa") {
  AtrboParams p;
  p.adaptive_r = false;
  p.adaptive_kappa = false;
  RunDiagnostics diag;
  atrbo_run(suite::make_instance({2, 1, 2}), 30, 1, p, &diag);
  for (const auto& it : diag.iterations) {
    CHECK(it.r == 2.5);
    CHECK(it.kappa == 2.0);
  }
}

TEST_CASE("atrbo is deterministic per seed") {
  const auto f = suite::make_instance({8, 2, 2});
  CHECK(atrbo_run(f, 25, 3).values() == atrbo_run(f, 25, 3).values());
  CHECK(atrbo_run(f, 25, 3).values() != atrbo_run(f, 25, 4).values());
}

TEST_CASE("random search") {
  const auto f = suite::make_instance({1, 1, 3});
  CHECK(random_search_run(f, 1, 0).size() == 1);
  CHECK(random_search_run(f, 40, 9).values() == random_search_run(f, 40, 9).values());
  EvalSession s(f, 200, 2);
  random_search(s);
  for (const auto& p : s.points())
    for (double v : p) {
      CHECK(v >= -5.0);
      CHECK(v <= 5.0);
    }
}

TEST_CASE("gp-lcb boundary and structural equivalence with atrbo") {
  const auto f = suite::make_instance({1, 1, 2});
  RunDiagnostics diag;
  CHECK(gp_lcb_run(f, 5, 0, &diag).size() == 5);
  CHECK(diag.n_init == 5);
  CHECK(diag.iterations.empty());

  const auto params = gp_lcb_params();
  CHECK(params.region == CandidateRegion::FullBox);
  CHECK_FALSE(params.adaptive_r);
  CHECK_FALSE(params.adaptive_kappa);
  CHECK(params.kappa0 == 2.0);
  for (std::int64_t seed = 0; seed < 3; ++seed)
    CHECK(gp_lcb_run(f, 30, seed).values() == atrbo_run(f, 30, seed, params).values());
}

TEST_CASE("gp-lcb reaches 0.1 precision on the 2-d sphere in most seeds") {
  const auto f = suite::make_instance({1, 1, 2});
  int hits = 0;
  for (std::int64_t seed = 0; seed < 5; ++seed) {
    const auto t = gp_lcb_run(f, 30, seed);
    if (t.values().back() - f.f_opt() < 1e-1) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("registry and wrappers") {
  CHECK(registered_names() == std::vector<std::string>{"atrbo", "gp-lcb", "random"});
  CHECK_THROWS_AS(atrbo_run(suite::make_instance({1, 1, 2}), 4, 0), InvalidConfig);
  AtrboParams bad;
  bad.rho = 0.0;
  CHECK_THROWS_AS(atrbo_run(suite::make_instance({1, 1, 2}), 10, 0, bad), InvalidConfig);
}
