#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace evobo::suite {

inline constexpr double kLowerBound = -5.0;
inline constexpr double kUpperBound = 5.0;

/// Identifies one test problem: function id (1..24), instance id and dimension.
/// The search box is always [-5, 5]^dim.
struct ProblemSpec {
  int function_id = 1;
  int instance_id = 1;
  int dim = 2;

  double lower() const noexcept { return kLowerBound; }
  double upper() const noexcept { return kUpperBound; }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct InstanceData;

/// An immutable, fully materialized test problem. Copies share state.
class ProblemInstance {
 public:
  explicit ProblemInstance(std::shared_ptr<const InstanceData> data);

  const ProblemSpec& spec() const noexcept;
  int dim() const noexcept { return spec().dim; }
  const std::vector<double>& x_opt() const noexcept;
  double f_opt() const noexcept;
  std::uint64_t rotation_seed() const noexcept;

  /// Rotation matrices used by the instance transform. Identity for functions
  /// without rotation.
  const Eigen::MatrixXd& rotation() const noexcept;
  const Eigen::MatrixXd& second_rotation() const noexcept;
  bool uses_rotation() const noexcept;

  /// core(transform(x)) + f_opt. Throws DimensionMismatch. No clipping.
  double evaluate(std::span<const double> x) const;

  /// {function_id, instance_id, dim, x_opt, f_opt, rotation_seed}
  nlohmann::json to_record() const;

 private:
  std::shared_ptr<const InstanceData> data_;
};

/// Deterministic for a fixed spec. Throws UnknownFunction or InvalidDim.
ProblemInstance make_instance(const ProblemSpec& spec);

/// Rebuilds an instance from a serialized record and checks that the stored
/// optimum matches the regenerated one.
ProblemInstance instance_from_record(const nlohmann::json& record);

/// The ten functions used for fitness during the search: two per function class.
std::vector<int> training_subset();

/// Every function id this registry can build.
std::vector<int> implemented_functions();

bool is_implemented(int function_id) noexcept;

std::string function_name(int function_id);

}  // namespace evobo::suite
