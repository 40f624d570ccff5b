#include "evobo/session.hpp"

#include <algorithm>
#include <string>

#include "evobo/errors.hpp"

namespace evobo {

EvalSession::EvalSession(suite::ProblemInstance instance, int budget, std::int64_t seed)
    : instance_(std::move(instance)), budget_(budget), seed_(seed), trace_({}, instance_.f_opt()) {
  if (budget_ < 1) throw InvalidConfig("session budget must be at least 1");
}

double EvalSession::operator()(std::span<const double> x) {
  if (evaluations() >= budget_) throw BudgetExhausted("budget exhausted");
  if (static_cast<int>(x.size()) != dim())
    throw DimensionMismatch("expected point of length " + std::to_string(dim()) + ", got " +
                            std::to_string(x.size()));
  std::vector<double> clipped(x.begin(), x.end());
  for (auto& v : clipped) v = std::clamp(v, lower(), upper());
  const double y = instance_.evaluate(clipped);
  points_.push_back(std::move(clipped));
  raw_.push_back(y);
  trace_.push_raw(y);
  return y;
}

metrics::Trace replay(const suite::ProblemInstance& instance, int budget,
                      std::span<const std::vector<double>> points) {
  EvalSession session(instance, budget, 0);
  for (const auto& p : points) {
    if (session.remaining() == 0) break;
    session(p);
  }
  return session.trace();
}

}  // namespace evobo
