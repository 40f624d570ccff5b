#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evobo/candidate.hpp"

namespace evobo::prompts {

/// Summary of an earlier candidate as shown in the initialization prompt.
struct HistoryEntry {
  std::string name;
  std::string description;
  std::optional<double> fitness;
  std::optional<std::string> error;

  static HistoryEntry of(const Candidate& c);
};

/// A prompt to be rendered: Initialization has no parents, Mutation one,
/// Crossover two.
struct PromptRequest {
  Operator kind = Operator::Initialization;
  std::vector<Candidate> parents;
  std::vector<HistoryEntry> history;

  /// Throws InvalidConfig when the parent count does not fit the kind.
  void validate() const;
};

/// Named template texts. Placeholders look like `{name}`.
/// Keys: role, task, code_template, output_format, initialization, mutation, crossover.
class Templates {
 public:
  /// Built-in texts.
  static Templates defaults();
  /// Defaults, overridden by any `<key>.txt` present in `dir`.
  static Templates from_directory(const std::filesystem::path& dir);

  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string text);

 private:
  std::map<std::string, std::string> texts_;
};

struct RenderOptions {
  /// Rough cap on the rendered size of the algorithm list, in tokens
  /// (4 characters per token). Oldest entries are dropped first.
  std::size_t history_token_budget = 4000;
};

std::string render_initialization(const std::vector<HistoryEntry>& history, const Templates& t,
                                  const RenderOptions& options = {});

/// Throws MissingFitness when the parent was never evaluated.
std::string render_mutation(const Candidate& parent, const Templates& t);

/// Throws DuplicateParent when both parents are the same candidate, and
/// MissingFitness when either lacks a fitness.
std::string render_crossover(const Candidate& first, const Candidate& second, const Templates& t);

std::string render(const PromptRequest& request, const Templates& t, const RenderOptions& options = {});

/// Substitutes `{key}` placeholders. Unknown placeholders are left intact.
std::string fill(std::string_view text, const std::map<std::string, std::string>& values);

struct ParseFailure {
  std::string reason;
};

/// Extracts the first fenced code block and the class it declares. The
/// returned candidate has name, description, code, loc and warnings set.
std::variant<Candidate, ParseFailure> parse_response(std::string_view text);

}  // namespace evobo::prompts
