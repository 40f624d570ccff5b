#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace evobo {

enum class Operator { Initialization, Mutation, Crossover };

std::string_view to_string(Operator op) noexcept;
Operator operator_from_string(std::string_view s);

/// How a candidate came to be: the operator and the ids of its parents.
struct Origin {
  Operator op = Operator::Initialization;
  std::vector<std::string> parents;

  friend bool operator==(const Origin&, const Origin&) = default;
};

/// One generated optimizer program and its evaluation outcome.
struct Candidate {
  std::string id;
  std::string name;
  std::string description;
  std::string code;
  Origin origin;
  std::optional<double> fitness;
  std::optional<std::string> error;
  int loc = 0;
  int generation = 0;
  long creation_index = 0;  // order of creation within a run
  std::vector<std::string> warnings;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Number of non-blank lines.
int count_loc(std::string_view code);

nlohmann::json to_json(const Candidate& c);
Candidate candidate_from_json(const nlohmann::json& j);

}  // namespace evobo
