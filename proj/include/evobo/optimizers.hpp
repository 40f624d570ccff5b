#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "evobo/metrics.hpp"
#include "evobo/session.hpp"
#include "evobo/suite.hpp"

namespace evobo::optimizers {

inline constexpr double kMinRadius = 1e-2;
inline constexpr double kMinKappa = 0.1;
inline constexpr double kMaxKappa = 10.0;

/// ATRBO's evolving trust region: radius r, shrink factor rho, exploration
/// weight kappa and the incumbent.
struct TrustRegionState {
  double r = 2.5;
  double rho = 0.95;
  double kappa = 2.0;
  double max_radius = 5.0;  // half the largest box range
  Eigen::VectorXd x_best;
  double y_best = std::numeric_limits<double>::infinity();
  int n_evals = 0;

  /// r <- r * rho and kappa <- kappa / rho (each only if enabled), then clip
  /// r to [1e-2, max_radius] and kappa to [0.1, 10].
  void adapt(bool adapt_radius, bool adapt_kappa);
};

enum class CandidateRegion {
  TrustRegion,  // sphere of radius r around the incumbent
  FullBox,      // Sobol points over the whole box
};

struct AtrboParams {
  double r0 = 2.5;
  double rho = 0.95;
  double kappa0 = 2.0;
  bool adaptive_r = true;
  bool adaptive_kappa = true;
  CandidateRegion region = CandidateRegion::TrustRegion;
  int candidates_per_dim = 100;
  int min_initial = 1;
};

/// Per-iteration record of a surrogate-loop run.
struct IterationRecord {
  int evaluation = 0;  // 1-based index of the evaluation this iteration produced
  double r = 0.0;      // after adaptation
  double kappa = 0.0;  // after adaptation
  double y_best = 0.0;
  bool fallback = false;  // GP unavailable; a uniform random point was used
};

struct RunDiagnostics {
  int n_init = 0;
  std::vector<IterationRecord> iterations;
  int fallbacks = 0;
};

/// Number of initial design points: min(10 d, B / 5), at least `min_initial`.
int initial_design_size(int dim, int budget, int min_initial = 1);

/// ATRBO over any objective. Consumes the objective's whole budget.
void atrbo(Objective& objective, const AtrboParams& params, RunDiagnostics* diagnostics = nullptr);

/// Uniform random search.
void random_search(Objective& objective);

/// GP with LCB (kappa fixed at 2) over candidates spread across the whole box.
void gp_lcb(Objective& objective, RunDiagnostics* diagnostics = nullptr);

AtrboParams gp_lcb_params();

/// Convenience wrappers running one in-process session and returning its trace.
metrics::Trace atrbo_run(const suite::ProblemInstance& instance, int budget, std::int64_t seed,
                         const AtrboParams& params = {}, RunDiagnostics* diagnostics = nullptr);
metrics::Trace random_search_run(const suite::ProblemInstance& instance, int budget, std::int64_t seed);
metrics::Trace gp_lcb_run(const suite::ProblemInstance& instance, int budget, std::int64_t seed,
                          RunDiagnostics* diagnostics = nullptr);

using Algorithm = std::function<void(Objective&)>;

/// Algorithms addressable by name: "atrbo", "random", "gp-lcb".
const std::map<std::string, Algorithm>& registry();

std::vector<std::string> registered_names();

}  // namespace evobo::optimizers
