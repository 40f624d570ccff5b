#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evobo/optimizers.hpp"

namespace evobo::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kData = 3;

struct AblationArm {
  std::string label;  // file-name safe
  optimizers::AtrboParams params;
};

/// Arms for an ATRBO parameter sweep. `param` is one of rho, kappa0, r0,
/// adaptive; empty `values` selects the default grid. Throws UnknownParameter.
std::vector<AblationArm> ablation_arms(const std::string& param, const std::vector<double>& values = {});

/// Default evaluation budget: 10 d + 50 for validation, 20 d for search.
int default_budget(int dim, const std::string& mode);

/// Runs the command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evobo::cli
