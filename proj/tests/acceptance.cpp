// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "evobo/evolution.hpp"
#include "evobo/harness.hpp"
#include "evobo/metrics.hpp"
#include "evobo/optimizers.hpp"
#include "evobo/protocol.hpp"
#include "evobo/stats.hpp"
#include "evobo/suite.hpp"
#include "oracles.hpp"

using namespace evobo;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail, double seconds) {
  std::printf("%s  %-28s %s (%.1fs)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void check(const std::string& name, const std::function<bool(std::string&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  report(name, ok, detail, elapsed.count());
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

metrics::Trace from_precisions(const std::vector<double>& p) {
  std::vector<double> best;
  for (double v : p) best.push_back(best.empty() ? v : std::min(best.back(), v));
  return metrics::Trace(best, 0.0);
}

// Per-(function, instance) AOCC averaged over seeds, for the training subset at d = 5.
using Runner = std::function<metrics::Trace(const suite::ProblemInstance&, int, std::int64_t)>;

std::vector<double> cell_scores(const Runner& run) {
  constexpr int dim = 5, budget = 20 * dim, seeds = 5;
  const auto cfg = metrics::AOCCConfig::for_dimension(dim, budget);
  std::vector<double> cells;
  for (int fid : suite::training_subset())
    for (int iid : {1, 2, 3}) {
      const auto f = suite::make_instance({fid, iid, dim});
      double sum = 0.0;
      for (std::int64_t seed = 0; seed < seeds; ++seed) sum += metrics::aocc(run(f, budget, seed), cfg);
      cells.push_back(sum / seeds);
    }
  return cells;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Candidate cand(const std::string& id, double fitness, int loc, long index) {
  Candidate c;
  c.id = id;
  c.name = "N" + id;
  c.fitness = fitness;
  c.loc = loc;
  c.creation_index = index;
  return c;
}

}  // namespace

int main() {
  check("aocc-oracle-values", [](std::string& d) {
    metrics::AOCCConfig cfg;
    cfg.budget = 2;
    const double half = metrics::precision_contribution(1e-2, cfg);
    const double third = metrics::aocc(from_precisions({1e2, 1e-2}), cfg);
    const double at_ub = metrics::precision_contribution(1e4, cfg);
    const double above_ub = metrics::precision_contribution(1e7, cfg);
    const double at_lb = metrics::precision_contribution(1e-8, cfg);
    const double below_lb = metrics::precision_contribution(0.0, cfg);
    d = fmt("c(1e-2)=%.15g aocc=%.15g", half, third);
    return std::abs(half - 0.5) <= 1e-12 && std::abs(third - 1.0 / 3.0) <= 1e-12 && std::abs(at_ub) <= 1e-12 &&
           std::abs(above_ub) <= 1e-12 && std::abs(at_lb - 1.0) <= 1e-12 && std::abs(below_lb - 1.0) <= 1e-12;
  });

  check("aocc-cdf-equivalence", [](std::string& d) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> exponent(-10.0, 6.0);
    std::uniform_int_distribution<int> length(1, 60);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      const int budget = 60;
      std::vector<double> p(static_cast<std::size_t>(length(rng)));
      for (auto& v : p) v = std::pow(10.0, exponent(rng));
      const auto trace = from_precisions(p);
      metrics::AOCCConfig cfg;
      cfg.budget = budget;
      const double closed = metrics::aocc(trace, cfg);
      const double brute = oracle::aocc_cdf(trace.values(), budget, cfg.lb, cfg.ub);
      worst = std::max(worst, std::abs(closed - brute));
    }
    d = fmt("max |diff| = %.3g over 50 traces", worst);
    return worst <= 1e-3;
  });

  check("suite-invariants", [](std::string& d) {
    double worst_opt = 0.0, worst_orth = 0.0;
    int count = 0;
    for (int fid : suite::implemented_functions())
      for (int iid = 1; iid <= 6; ++iid)
        for (int dim : {2, 5}) {
          const auto f = suite::make_instance({fid, iid, dim});
          worst_opt = std::max(worst_opt, std::abs(f.evaluate(f.x_opt()) - f.f_opt()));
          for (const auto* r : {&f.rotation(), &f.second_rotation()}) {
            if (r->size() == 0) continue;
            const Eigen::MatrixXd e = r->transpose() * *r - Eigen::MatrixXd::Identity(dim, dim);
            worst_orth = std::max(worst_orth, e.cwiseAbs().maxCoeff());
          }
          ++count;
        }
    d = fmt("%g instances, max |f(x_opt)-f_opt| = %.3g, max orth err = %.3g", count, worst_opt, worst_orth);
    return worst_opt <= 1e-9 && worst_orth <= 1e-10;
  });

  check("atrbo-dynamics", [](std::string& d) {
    optimizers::TrustRegionState s;
    for (int i = 0; i < 10; ++i) s.adapt(true, true);
    const bool radius_ok = std::abs(s.r - 2.5 * std::pow(0.95, 10)) <= 1e-12;
    optimizers::TrustRegionState k;
    int first_cap = 0;
    bool stays = true;
    for (int i = 1; i <= 200; ++i) {
      k.adapt(true, true);
      if (first_cap == 0 && k.kappa == 10.0) first_cap = i;
      if (first_cap != 0 && k.kappa != 10.0) stays = false;
    }
    d = fmt("r10 = %.15g, kappa capped at iteration %g", s.r, first_cap);
    return radius_ok && first_cap == 32 && stays;
  });

  std::vector<double> atrbo_cells;
  check("atrbo-beats-random", [&](std::string& d) {
    atrbo_cells = cell_scores([](const suite::ProblemInstance& f, int b, std::int64_t s) {
      return optimizers::atrbo_run(f, b, s);
    });
    const auto random_cells = cell_scores([](const suite::ProblemInstance& f, int b, std::int64_t s) {
      return optimizers::random_search_run(f, b, s);
    });
    const auto t = stats::paired_t_test(atrbo_cells, random_cells);
    d = fmt("atrbo %.4f vs random %.4f, one-sided p = %.3g", mean(atrbo_cells), mean(random_cells), t.p_greater);
    return t.n == 30 && t.mean_difference > 0.0 && t.p_greater < 0.05;
  });

  check("ablation-both-fixed", [&](std::string& d) {
    if (atrbo_cells.empty()) {
      d = "baseline unavailable";
      return false;
    }
    optimizers::AtrboParams fixed;
    fixed.adaptive_r = false;
    fixed.adaptive_kappa = false;
    const auto fixed_cells = cell_scores([&](const suite::ProblemInstance& f, int b, std::int64_t s) {
      return optimizers::atrbo_run(f, b, s, fixed);
    });
    const auto t = stats::paired_t_test(fixed_cells, atrbo_cells);
    d = fmt("both-fixed - baseline = %.4f, one-sided p = %.3g", t.mean_difference, t.p_greater);
    return t.mean_difference <= 0.0 || t.p_greater >= 0.05;
  });

  check("evolution-mock-llm", [](std::string& d) {
    std::vector<std::string> responses;
    for (int i = 0; i < 16; ++i) {
      std::string body;
      for (int k = 0; k < i % 5; ++k) body += "    a" + std::to_string(k) + " = 0\n";
      responses.push_back("# Description: mock\n```python\nclass Mock" + std::to_string(i) + ":\n" + body +
                          "    pass\n```\n");
    }
    llm::Client client(std::make_shared<llm::HashedBackend>(responses), {});
    evolution::FunctionEvaluator eval([](Candidate& c) {
      c.fitness = static_cast<double>(std::hash<std::string>{}(c.name) % 997) / 997.0;
    });
    evolution::ESConfig config;
    config.mu = 4;
    config.lambda = 8;
    config.total_budget = 20;
    config.crossover_rate = 0.6;
    const auto result = evolution::Search(config, client, eval).run();
    bool monotone = true;
    const auto& h = result.best_fitness_per_generation;
    for (std::size_t i = 1; i < h.size(); ++i) monotone = monotone && h[i] >= h[i - 1];

    evolution::Population pop{{cand("a", 0.1, 1, 0), cand("b", 0.4, 1, 1), cand("c", 0.3, 1, 2),
                               cand("d", 0.2, 1, 3)}, 1};
    std::mt19937_64 rng(2024);
    const auto plan = evolution::get_prompts(pop, 1000, 0.6, rng);
    const double fraction = plan.crossovers / 1000.0;

    bool pairs_ok = true;
    for (std::size_t n : {2, 3, 4}) pairs_ok = pairs_ok && evolution::crossover_pairs(n) == oracle::pairs_by_enumeration(n);

    d = fmt("generated %g, crossover fraction %.3f, generations %g", result.generated_count, fraction,
            static_cast<double>(h.size()));
    return result.generated_count <= 20 && result.generated_count == static_cast<int>(result.archive.size()) &&
           monotone && std::abs(fraction - 0.6) <= 0.046 && pairs_ok;
  });

  check("protocol-budget-enforcement", [](std::string& d) {
    const auto dir = fs::temp_directory_path() / "evobo_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto log = (dir / "replies.txt").string();
    const int budget = 7;
    harness::EvalSettings s;
    s.specs = {{1, 1, 2}};
    s.budget = budget;
    s.time_limit = std::chrono::seconds(20);
    s.min_session_slice = std::chrono::seconds(10);
    const auto over = harness::run_candidate(
        harness::ProcessRunner(std::string(EVOBO_FIXTURE_WORKER) + " overask '" + log + "'"), s);
    std::ifstream is(log);
    std::string line, last;
    int lines = 0;
    while (std::getline(is, line)) ++lines, last = line;
    const bool error_reply = !last.empty() && std::holds_alternative<protocol::ErrorMessage>(protocol::decode_message(last));
    const bool over_ok = over.cells.at(0).trace.size() == static_cast<std::size_t>(budget) && lines == budget + 1 &&
                         error_reply;

    s.specs = {{1, 1, 2}, {2, 1, 2}, {3, 1, 2}};
    const auto crash = harness::run_candidate(harness::ProcessRunner(std::string(EVOBO_FIXTURE_WORKER) + " crash"), s);
    const bool crash_ok = crash.report.aggregate == 0.0 && crash.cells.size() == 3;
    d = fmt("overask trace %g with %g replies, crash fitness %g", static_cast<double>(over.cells.at(0).trace.size()),
            lines, crash.report.aggregate);
    return over_ok && crash_ok;
  });

  check("selection-oracle", [](std::string& d) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> fit(0, 6), loc(3, 8), size(1, 10);
    int mismatches = 0;
    for (int rep = 0; rep < 200; ++rep) {
      long index = 0;
      std::vector<Candidate> parents, offspring;
      const int np = size(rng), no = size(rng);
      for (int i = 0; i < np; ++i) parents.push_back(cand("p" + std::to_string(i), fit(rng) / 6.0, loc(rng), index++));
      for (int i = 0; i < no; ++i) offspring.push_back(cand("o" + std::to_string(i), fit(rng) / 6.0, loc(rng), index++));
      std::shuffle(offspring.begin(), offspring.end(), rng);
      const int mu = std::uniform_int_distribution<int>(1, np)(rng);
      for (bool elitist : {true, false}) {
        std::vector<std::string> got;
        for (const auto& c : evolution::select(parents, offspring, mu, elitist).population.members) got.push_back(c.id);
        if (got != oracle::select_reference(parents, offspring, mu, elitist)) ++mismatches;
      }
    }
    d = fmt("%g mismatches over 200 populations x {plus, comma}", mismatches);
    return mismatches == 0;
  });

  std::printf("%s\n", failures == 0 ? "ALL PASS" : "SOME CHECKS FAILED");
  return failures == 0 ? 0 : 1;
}
