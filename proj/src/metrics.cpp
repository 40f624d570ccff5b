#include "evobo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evobo/errors.hpp"

namespace evobo::metrics {

namespace {

// Slack for values that land a few ulps below the optimum.
double optimum_slack(double f_opt) { return 1e-9 * std::max(1.0, std::abs(f_opt)); }

}  // namespace

double default_upper_bound(int dim) noexcept { return dim <= 5 ? 1e4 : 1e9; }

AOCCConfig AOCCConfig::for_dimension(int dim, int budget) {
  AOCCConfig cfg;
  cfg.ub = default_upper_bound(dim);
  cfg.budget = budget;
  return cfg;
}

void AOCCConfig::validate() const {
  if (!(lb > 0.0 && lb < ub)) throw InvalidConfig("AOCC bounds must satisfy 0 < lb < ub");
  if (budget < 1) throw InvalidConfig("AOCC budget must be at least 1");
}

Trace::Trace(std::vector<double> values, double f_opt) : values_(std::move(values)), f_opt_(f_opt) {
  const double floor = f_opt_ - optimum_slack(f_opt_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < floor) throw InvalidTrace("trace value below the known optimum");
    if (i > 0 && values_[i] > values_[i - 1]) throw InvalidTrace("trace is not best-so-far");
  }
}

Trace Trace::from_raw(std::span<const double> raw, double f_opt) {
  Trace t;
  t.f_opt_ = f_opt;
  for (double v : raw) t.push_raw(v);
  return t;
}

void Trace::push_raw(double value) {
  if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
  values_.push_back(values_.empty() ? value : std::min(values_.back(), value));
}

double precision_contribution(double delta_f, const AOCCConfig& cfg) {
  if (std::isnan(delta_f)) return 0.0;
  const double clipped = std::clamp(delta_f, cfg.lb, cfg.ub);
  const double log_lb = std::log10(cfg.lb);
  return 1.0 - (std::log10(clipped) - log_lb) / (std::log10(cfg.ub) - log_lb);
}

double aocc(const Trace& trace, const AOCCConfig& cfg) {
  if (trace.empty()) throw EmptyTrace("cannot score an empty trace");
  cfg.validate();
  const auto& v = trace.values();
  const auto n = static_cast<std::size_t>(cfg.budget);
  double sum = 0.0;
  const std::size_t used = std::min(n, v.size());
  for (std::size_t i = 0; i < used; ++i) sum += precision_contribution(v[i] - trace.f_opt(), cfg);
  if (used < n)
    sum += static_cast<double>(n - used) * precision_contribution(v.back() - trace.f_opt(), cfg);
  return sum / static_cast<double>(n);
}

double aggregate_fitness(std::span<const CellScore> cells) {
  if (cells.empty()) throw NoCells("no cells to aggregate");
  double sum = 0.0;
  for (const auto& c : cells) sum += c.aocc.value_or(0.0);
  return sum / static_cast<double>(cells.size());
}

double aggregate_fitness(std::span<const std::optional<double>> cells) {
  if (cells.empty()) throw NoCells("no cells to aggregate");
  double sum = 0.0;
  for (const auto& c : cells) sum += c.value_or(0.0);
  return sum / static_cast<double>(cells.size());
}

std::vector<const CellScore*> FitnessReport::failures() const {
  std::vector<const CellScore*> out;
  for (const auto& c : cells)
    if (c.failed()) out.push_back(&c);
  return out;
}

std::vector<double> loss_series(const Trace& trace) {
  if (trace.empty()) throw EmptyTrace("cannot compute loss of an empty trace");
  std::vector<double> out;
  out.reserve(trace.size());
  for (double v : trace.values()) out.push_back(std::max(0.0, v - trace.f_opt()));
  return out;
}

std::vector<double> normalized_regret(std::span<const double> scores, double s_min, double s_max) {
  if (!(s_max > s_min)) throw DegenerateRange("normalized regret needs s_max > s_min");
  std::vector<double> out;
  out.reserve(scores.size());
  double running = std::numeric_limits<double>::infinity();
  for (double s : scores) {
    running = std::min(running, s);
    out.push_back(std::clamp((running - s_min) / (s_max - s_min), 0.0, 1.0));
  }
  return out;
}

}  // namespace evobo::metrics
