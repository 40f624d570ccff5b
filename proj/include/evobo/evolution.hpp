#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evobo/candidate.hpp"
#include "evobo/harness.hpp"
#include "evobo/llm.hpp"
#include "evobo/prompts.hpp"

namespace evobo::store {
class RunStore;
}

namespace evobo::evolution {

/// How candidates are benchmarked during the search.
struct EvalConfig {
  std::vector<int> function_ids;  // defaults to the training subset
  std::vector<int> instances{1, 2, 3};
  int dim = 5;
  std::vector<std::int64_t> seeds{0};
  std::optional<int> budget;  // defaults to 20 * dim
  std::chrono::milliseconds time_limit = std::chrono::minutes(30);
  std::chrono::milliseconds min_session_slice = std::chrono::seconds(30);
  std::chrono::milliseconds smoke_time_limit = std::chrono::seconds(30);
  int workers = 1;
  std::optional<double> ub;
  /// Launch command for a candidate; `{source}` and `{class}` are substituted.
  std::string command_template = "python3 -m candidate_shim {source} {class}";

  EvalConfig();
  int effective_budget() const { return budget.value_or(20 * dim); }
  harness::EvalSettings settings() const;
};

struct ESConfig {
  int total_budget = 100;  // T: candidates generated over the whole run
  int mu = 4;
  int lambda = 16;
  double crossover_rate = 0.6;
  bool elitist = true;
  std::int64_t seed = 0;
  llm::LLMParams llm;
  EvalConfig eval;
  std::size_t history_token_budget = 4000;
  std::optional<std::filesystem::path> templates_dir;
  /// Wall-clock limit for the whole search, checked between generations.
  std::optional<std::chrono::milliseconds> run_time_limit;

  void validate() const;
};

void to_json(nlohmann::json& j, const EvalConfig& c);
void from_json(const nlohmann::json& j, EvalConfig& c);
void to_json(nlohmann::json& j, const ESConfig& c);
void from_json(const nlohmann::json& j, ESConfig& c);

struct Population {
  std::vector<Candidate> members;
  int generation = 0;
};

/// Sorts by fitness descending, then fewer lines of code, then earlier creation.
/// Missing fitness counts as 0.
std::vector<Candidate> rank(std::vector<Candidate> members);

/// Strict ordering used by rank(): true when `a` is better than `b`.
bool better(const Candidate& a, const Candidate& b);

/// ceil(n / 2).
std::size_t mating_pool_size(std::size_t population_size);

/// Index pairs over a ranked pool: the best with every other, then the second
/// best with the rest, and so on.
std::vector<std::pair<std::size_t, std::size_t>> crossover_pairs(std::size_t pool_size);

struct PromptPlan {
  std::vector<prompts::PromptRequest> requests;
  int crossovers = 0;
  int mutations = 0;
  std::vector<std::string> notes;  // e.g. PoolTooSmall fallbacks
};

/// One draw u ~ U[0,1) per slot: u < p_cr takes the next crossover pair,
/// otherwise the next mutation parent. Empty queues are refilled from the
/// ranked population.
PromptPlan get_prompts(const Population& population, int size, double crossover_rate, std::mt19937_64& rng);

struct Selection {
  Population population;
  std::vector<std::string> warnings;
};

/// Plus selection keeps the best mu of parents and offspring; comma selection
/// keeps the best mu offspring, padding from parents (with a warning) when
/// there are fewer than mu.
Selection select(const std::vector<Candidate>& parents, const std::vector<Candidate>& offspring, int mu,
                 bool elitist);

/// Sets fitness and error on a parsed candidate.
class CandidateEvaluator {
 public:
  virtual ~CandidateEvaluator() = default;
  virtual void evaluate(Candidate& candidate) = 0;
};

/// Wraps a callable; handy for tests and scripted runs.
class FunctionEvaluator final : public CandidateEvaluator {
 public:
  explicit FunctionEvaluator(std::function<void(Candidate&)> fn) : fn_(std::move(fn)) {}
  void evaluate(Candidate& candidate) override { fn_(candidate); }

 private:
  std::function<void(Candidate&)> fn_;
};

/// Writes the candidate source to disk, smoke-tests it through the launch
/// command, then benchmarks it on the configured grid.
class ProcessEvaluator final : public CandidateEvaluator {
 public:
  ProcessEvaluator(EvalConfig config, std::filesystem::path work_dir);
  void evaluate(Candidate& candidate) override;

 private:
  EvalConfig config_;
  std::filesystem::path work_dir_;
};

struct SearchState {
  Population population;
  std::vector<Candidate> archive;
  int t = 0;  // counter advanced as in the reference loop: by |P| per generation
  int generated_count = 0;
  long next_creation_index = 0;
  std::string rng_state;
  bool finished = false;
};

struct SearchResult {
  std::vector<Candidate> archive;
  std::optional<Candidate> best;
  Population population;
  int t = 0;
  int generated_count = 0;
  bool finished = false;
  std::vector<double> best_fitness_per_generation;
};

struct SearchOptions {
  /// Stop after this many evolutionary generations (a controlled interruption).
  std::optional<int> max_generations;
};

class Search {
 public:
  Search(ESConfig config, llm::Client& client, CandidateEvaluator& evaluator,
         store::RunStore* store = nullptr);

  SearchResult run(const SearchOptions& options = {});
  /// Continues from the store's last snapshot. Throws CorruptSnapshot.
  SearchResult resume(const SearchOptions& options = {});

  const SearchState& state() const noexcept { return state_; }

 private:
  Candidate make_candidate(const llm::Outcome& outcome, Origin origin, int generation,
                           std::vector<std::string> notes = {});
  void snapshot();
  SearchResult result() const;
  SearchResult loop(const SearchOptions& options);

  ESConfig config_;
  llm::Client& client_;
  CandidateEvaluator& evaluator_;
  store::RunStore* store_;
  prompts::Templates templates_;
  std::mt19937_64 rng_;
  SearchState state_;
  std::vector<double> best_history_;
};

}  // namespace evobo::evolution
