#include "evobo/optimizers.hpp"

#include <algorithm>
#include <random>

#include "evobo/errors.hpp"
#include "evobo/gp.hpp"
#include "evobo/sampling.hpp"

namespace evobo::optimizers {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::int64_t seed, std::uint64_t stream) {
  return mix(mix(static_cast<std::uint64_t>(seed)) ^ stream);
}

// Observations gathered so far; one row per evaluated point.
struct History {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(points.size()), points.front().size());
    for (std::size_t i = 0; i < points.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = points[i];
    return X;
  }
};

double evaluate(Objective& objective, const Eigen::VectorXd& x, History& history) {
  const double y = objective(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  Eigen::VectorXd clipped = x.cwiseMax(objective.lower()).cwiseMin(objective.upper());
  history.points.push_back(std::move(clipped));
  history.values.push_back(y);
  return y;
}

}  // namespace

void TrustRegionState::adapt(bool adapt_radius, bool adapt_kappa) {
  if (adapt_radius) r *= rho;
  if (adapt_kappa) kappa /= rho;
  r = std::clamp(r, kMinRadius, max_radius);
  kappa = std::clamp(kappa, kMinKappa, kMaxKappa);
}

int initial_design_size(int dim, int budget, int min_initial) {
  const int n = std::min(10 * dim, budget / 5);
  return std::clamp(std::max(n, min_initial), 1, std::max(1, budget));
}

void atrbo(Objective& objective, const AtrboParams& params, RunDiagnostics* diagnostics) {
  const int d = objective.dim();
  const int budget = objective.budget();
  if (params.rho <= 0.0) throw InvalidConfig("rho must be positive");
  const sampling::Box box{d, objective.lower(), objective.upper()};

  RunDiagnostics local;
  RunDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = {};

  TrustRegionState state;
  state.r = params.r0;
  state.rho = params.rho;
  state.kappa = params.kappa0;
  state.max_radius = box.range() / 2.0;

  History history;
  auto update_best = [&] {
    const auto it = std::min_element(history.values.begin(), history.values.end());
    const auto idx = static_cast<std::size_t>(it - history.values.begin());
    state.x_best = history.points[idx];
    state.y_best = *it;
    state.n_evals = static_cast<int>(history.values.size());
  };

  // Initial design over the whole box: center = box mean, radius = half range.
  const int n_init = std::min(initial_design_size(d, budget, params.min_initial), objective.remaining());
  diag.n_init = n_init;
  const Eigen::MatrixXd init = sampling::sample_points(
      n_init, Eigen::VectorXd::Constant(d, box.center()), box.range() / 2.0, box, stream_seed(objective.seed(), 0));
  for (int i = 0; i < n_init; ++i) evaluate(objective, init.row(i).transpose(), history);
  if (history.values.empty()) return;
  update_best();

  std::mt19937_64 fallback_rng(stream_seed(objective.seed(), 1));
  std::uniform_real_distribution<double> uniform(box.lower, box.upper);
  const int n_candidates = params.candidates_per_dim * d;

  for (std::uint64_t iter = 1; objective.remaining() > 0; ++iter) {
    Eigen::VectorXd next(d);
    bool fallback = false;
    try {
      if (history.values.size() < 2) throw SingularKernel("not enough data for a surrogate");
      const gp::GPModel model = gp::gp_fit(history.matrix(), history.values);
      const Eigen::MatrixXd candidates =
          params.region == CandidateRegion::TrustRegion
              ? sampling::sample_points(n_candidates, state.x_best, state.r, box,
                                        stream_seed(objective.seed(), 100 + iter))
              : sampling::sample_box(n_candidates, box, stream_seed(objective.seed(), 100 + iter));
      const auto pred = model.predict(candidates);
      const Eigen::VectorXd acq = gp::lcb(pred.mean, pred.stddev, state.kappa);
      next = candidates.row(gp::argmin(acq)).transpose();
    } catch (const Error&) {
      fallback = true;
      ++diag.fallbacks;
      for (int j = 0; j < d; ++j) next[j] = uniform(fallback_rng);
    }

    evaluate(objective, next, history);
    update_best();
    state.adapt(params.adaptive_r, params.adaptive_kappa);
    diag.iterations.push_back({state.n_evals, state.r, state.kappa, state.y_best, fallback});
  }
}

void random_search(Objective& objective) {
  std::mt19937_64 rng(stream_seed(objective.seed(), 7));
  std::uniform_real_distribution<double> uniform(objective.lower(), objective.upper());
  std::vector<double> x(static_cast<std::size_t>(objective.dim()));
  while (objective.remaining() > 0) {
    for (auto& v : x) v = uniform(rng);
    objective(x);
  }
}

AtrboParams gp_lcb_params() {
  AtrboParams p;
  p.kappa0 = 2.0;
  p.adaptive_r = false;
  p.adaptive_kappa = false;
  p.region = CandidateRegion::FullBox;
  p.min_initial = 5;
  return p;
}

void gp_lcb(Objective& objective, RunDiagnostics* diagnostics) {
  atrbo(objective, gp_lcb_params(), diagnostics);
}

metrics::Trace atrbo_run(const suite::ProblemInstance& instance, int budget, std::int64_t seed,
                         const AtrboParams& params, RunDiagnostics* diagnostics) {
  if (budget < 5) throw InvalidConfig("atrbo needs a budget of at least 5");
  EvalSession session(instance, budget, seed);
  atrbo(session, params, diagnostics);
  return session.trace();
}

metrics::Trace random_search_run(const suite::ProblemInstance& instance, int budget, std::int64_t seed) {
  EvalSession session(instance, budget, seed);
  random_search(session);
  return session.trace();
}

metrics::Trace gp_lcb_run(const suite::ProblemInstance& instance, int budget, std::int64_t seed,
                          RunDiagnostics* diagnostics) {
  if (budget < 5) throw InvalidConfig("gp-lcb needs a budget of at least 5");
  EvalSession session(instance, budget, seed);
  gp_lcb(session, diagnostics);
  return session.trace();
}

const std::map<std::string, Algorithm>& registry() {
  static const std::map<std::string, Algorithm> algos = {
      {"atrbo", [](Objective& o) { atrbo(o, AtrboParams{}); }},
      {"random", [](Objective& o) { random_search(o); }},
      {"gp-lcb", [](Objective& o) { gp_lcb(o); }},
  };
  return algos;
}

std::vector<std::string> registered_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

}  // namespace evobo::optimizers
