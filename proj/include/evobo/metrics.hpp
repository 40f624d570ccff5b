#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evobo::metrics {

/// Precision bounds and budget for the anytime AOCC score.
struct AOCCConfig {
  double lb = 1e-8;
  double ub = 1e4;
  int budget = 1;

  /// 1e4 for dimension 5 (and below), 1e9 for higher dimensions.
  static AOCCConfig for_dimension(int dim, int budget);
  void validate() const;
};

/// Upper precision bound used for a given problem dimension.
double default_upper_bound(int dim) noexcept;

/// Best-so-far objective values of one run, one entry per consumed evaluation.
class Trace {
 public:
  Trace() = default;
  /// Throws InvalidTrace when `values` increases anywhere or drops below f_opt.
  Trace(std::vector<double> values, double f_opt);

  /// Builds a best-so-far trace from raw objective values.
  static Trace from_raw(std::span<const double> raw, double f_opt);

  const std::vector<double>& values() const noexcept { return values_; }
  double f_opt() const noexcept { return f_opt_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  /// Appends a raw value, keeping the running minimum.
  void push_raw(double value);

 private:
  std::vector<double> values_;
  double f_opt_ = 0.0;
};

/// Log-normalized contribution of one precision value: 1 at lb, 0 at ub.
double precision_contribution(double delta_f, const AOCCConfig& cfg);

/// Mean precision contribution over cfg.budget evaluations; short traces are
/// padded with their final value. Throws EmptyTrace.
double aocc(const Trace& trace, const AOCCConfig& cfg);

/// One scored (or failed) cell of a benchmark grid.
struct CellScore {
  int function_id = 0;
  int instance_id = 0;
  int seed = 0;
  std::optional<double> aocc;  // empty when the cell failed
  std::string error;

  bool failed() const noexcept { return !aocc.has_value(); }
};

/// Unweighted mean over all cells, failed cells counting as 0. Throws NoCells.
double aggregate_fitness(std::span<const CellScore> cells);
double aggregate_fitness(std::span<const std::optional<double>> cells);

struct FitnessReport {
  std::vector<CellScore> cells;
  double aggregate = 0.0;

  std::vector<const CellScore*> failures() const;
};

/// values[t] - f_opt for each entry. Throws EmptyTrace.
std::vector<double> loss_series(const Trace& trace);

/// Running minimum of scores, rescaled to [0, 1] by (s - s_min) / (s_max - s_min).
/// Throws DegenerateRange when s_max <= s_min.
std::vector<double> normalized_regret(std::span<const double> scores, double s_min, double s_max);

}  // namespace evobo::metrics
