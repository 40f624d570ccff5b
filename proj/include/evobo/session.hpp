#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evobo/metrics.hpp"
#include "evobo/suite.hpp"

namespace evobo {

/// What an optimizer sees: a bounded box, a budget and a callable objective.
/// Implemented in-process by EvalSession and across a pipe by the worker side
/// of the wire protocol.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual int budget() const = 0;
  virtual double lower() const = 0;
  virtual double upper() const = 0;
  virtual std::int64_t seed() const = 0;
  virtual int evaluations() const = 0;

  int remaining() const { return budget() - evaluations(); }

  /// Evaluates one point. Throws BudgetExhausted once the budget is spent.
  virtual double operator()(std::span<const double> x) = 0;
};

/// In-process evaluation of one (problem, seed) cell. Points are clipped to
/// the box before evaluation and the clipped point is what gets recorded.
class EvalSession final : public Objective {
 public:
  EvalSession(suite::ProblemInstance instance, int budget, std::int64_t seed);

  int dim() const override { return instance_.dim(); }
  int budget() const override { return budget_; }
  double lower() const override { return instance_.spec().lower(); }
  double upper() const override { return instance_.spec().upper(); }
  std::int64_t seed() const override { return seed_; }
  int evaluations() const override { return static_cast<int>(points_.size()); }

  double operator()(std::span<const double> x) override;

  const suite::ProblemInstance& instance() const noexcept { return instance_; }
  const metrics::Trace& trace() const noexcept { return trace_; }
  const std::vector<std::vector<double>>& points() const noexcept { return points_; }
  const std::vector<double>& raw_values() const noexcept { return raw_; }

 private:
  suite::ProblemInstance instance_;
  int budget_;
  std::int64_t seed_;
  metrics::Trace trace_;
  std::vector<std::vector<double>> points_;
  std::vector<double> raw_;
};

/// Re-evaluates a recorded ask sequence against an instance.
metrics::Trace replay(const suite::ProblemInstance& instance, int budget,
                      std::span<const std::vector<double>> points);

}  // namespace evobo
