#include "evobo/candidate.hpp"

#include <cctype>

#include "evobo/errors.hpp"

namespace evobo {

std::string_view to_string(Operator op) noexcept {
  switch (op) {
    case Operator::Initialization: return "init";
    case Operator::Mutation: return "mutation";
    case Operator::Crossover: return "crossover";
  }
  return "init";
}

Operator operator_from_string(std::string_view s) {
  if (s == "init") return Operator::Initialization;
  if (s == "mutation") return Operator::Mutation;
  if (s == "crossover") return Operator::Crossover;
  throw CorruptSnapshot("unknown operator '" + std::string(s) + "'");
}

int count_loc(std::string_view code) {
  int count = 0;
  bool blank = true;
  for (char ch : code) {
    if (ch == '\n') {
      if (!blank) ++count;
      blank = true;
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      blank = false;
    }
  }
  if (!blank) ++count;
  return count;
}

nlohmann::json to_json(const Candidate& c) {
  nlohmann::json j = {{"id", c.id},
                      {"name", c.name},
                      {"description", c.description},
                      {"code", c.code},
                      {"operator", to_string(c.origin.op)},
                      {"parents", c.origin.parents},
                      {"fitness", c.fitness ? nlohmann::json(*c.fitness) : nlohmann::json()},
                      {"error", c.error ? nlohmann::json(*c.error) : nlohmann::json()},
                      {"loc", c.loc},
                      {"generation", c.generation},
                      {"creation_index", c.creation_index},
                      {"warnings", c.warnings}};
  return j;
}

Candidate candidate_from_json(const nlohmann::json& j) {
  try {
    Candidate c;
    c.id = j.at("id").get<std::string>();
    c.name = j.at("name").get<std::string>();
    c.description = j.value("description", "");
    c.code = j.at("code").get<std::string>();
    c.origin.op = operator_from_string(j.at("operator").get<std::string>());
    c.origin.parents = j.at("parents").get<std::vector<std::string>>();
    if (!j.at("fitness").is_null()) c.fitness = j.at("fitness").get<double>();
    if (!j.at("error").is_null()) c.error = j.at("error").get<std::string>();
    c.loc = j.at("loc").get<int>();
    c.generation = j.at("generation").get<int>();
    c.creation_index = j.at("creation_index").get<long>();
    c.warnings = j.value("warnings", std::vector<std::string>{});
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptSnapshot(std::string("bad candidate record: ") + e.what());
  }
}

}  // namespace evobo
