#include "evobo/evolution.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "evobo/errors.hpp"
#include "evobo/run_store.hpp"
#include "evobo/suite.hpp"

namespace evobo::evolution {

namespace fs = std::filesystem;
using nlohmann::json;

EvalConfig::EvalConfig() : function_ids(suite::training_subset()) {}

harness::EvalSettings EvalConfig::settings() const {
  harness::EvalSettings s;
  for (int fid : function_ids)
    for (int iid : instances) s.specs.push_back({fid, iid, dim});
  s.seeds = seeds;
  s.budget = effective_budget();
  s.time_limit = time_limit;
  s.min_session_slice = min_session_slice;
  s.workers = workers;
  s.ub_override = ub;
  return s;
}

void ESConfig::validate() const {
  if (total_budget < 1) throw InvalidConfig("total budget must be >= 1");
  if (mu < 1) throw InvalidConfig("mu must be >= 1");
  if (lambda < 1) throw InvalidConfig("lambda must be >= 1");
  if (!elitist && lambda < mu) throw InvalidConfig("comma selection needs lambda >= mu");
  if (crossover_rate < 0.0 || crossover_rate > 1.0) throw InvalidConfig("crossover rate must be in [0, 1]");
  if (eval.function_ids.empty() || eval.instances.empty() || eval.seeds.empty())
    throw InvalidConfig("evaluation grid is empty");
  if (eval.dim < 1) throw InvalidConfig("dim must be >= 1");
  if (eval.effective_budget() < 1) throw InvalidConfig("evaluation budget must be >= 1");
  if (eval.workers < 1) throw InvalidConfig("workers must be >= 1");
  llm.validate();
}

void to_json(json& j, const EvalConfig& c) {
  j = {{"function_ids", c.function_ids},
       {"instances", c.instances},
       {"dim", c.dim},
       {"seeds", c.seeds},
       {"budget", c.effective_budget()},
       {"time_limit_ms", c.time_limit.count()},
       {"min_session_slice_ms", c.min_session_slice.count()},
       {"smoke_time_limit_ms", c.smoke_time_limit.count()},
       {"workers", c.workers},
       {"ub", c.ub ? json(*c.ub) : json()},
       {"command_template", c.command_template}};
}

void from_json(const json& j, EvalConfig& c) {
  EvalConfig d;
  c.function_ids = j.value("function_ids", d.function_ids);
  c.instances = j.value("instances", d.instances);
  c.dim = j.value("dim", d.dim);
  c.seeds = j.value("seeds", d.seeds);
  if (j.contains("budget") && !j.at("budget").is_null()) c.budget = j.at("budget").get<int>();
  c.time_limit = std::chrono::milliseconds(j.value("time_limit_ms", static_cast<long long>(d.time_limit.count())));
  c.min_session_slice = std::chrono::milliseconds(
      j.value("min_session_slice_ms", static_cast<long long>(d.min_session_slice.count())));
  c.smoke_time_limit = std::chrono::milliseconds(
      j.value("smoke_time_limit_ms", static_cast<long long>(d.smoke_time_limit.count())));
  c.workers = j.value("workers", d.workers);
  if (j.contains("ub") && !j.at("ub").is_null()) c.ub = j.at("ub").get<double>();
  c.command_template = j.value("command_template", d.command_template);
}

void to_json(json& j, const ESConfig& c) {
  j = {{"total_budget", c.total_budget},
       {"mu", c.mu},
       {"lambda", c.lambda},
       {"crossover_rate", c.crossover_rate},
       {"elitist", c.elitist},
       {"seed", c.seed},
       {"llm", c.llm},
       {"eval", c.eval},
       {"history_token_budget", c.history_token_budget},
       {"templates_dir", c.templates_dir ? json(c.templates_dir->string()) : json()},
       {"run_time_limit_ms", c.run_time_limit ? json(c.run_time_limit->count()) : json()}};
}

void from_json(const json& j, ESConfig& c) {
  ESConfig d;
  c.total_budget = j.value("total_budget", d.total_budget);
  c.mu = j.value("mu", d.mu);
  c.lambda = j.value("lambda", d.lambda);
  c.crossover_rate = j.value("crossover_rate", d.crossover_rate);
  c.elitist = j.value("elitist", d.elitist);
  c.seed = j.value("seed", d.seed);
  c.llm = j.contains("llm") ? j.at("llm").get<llm::LLMParams>() : d.llm;
  c.eval = j.contains("eval") ? j.at("eval").get<EvalConfig>() : d.eval;
  c.history_token_budget = j.value("history_token_budget", d.history_token_budget);
  if (j.contains("templates_dir") && !j.at("templates_dir").is_null())
    c.templates_dir = fs::path(j.at("templates_dir").get<std::string>());
  if (j.contains("run_time_limit_ms") && !j.at("run_time_limit_ms").is_null())
    c.run_time_limit = std::chrono::milliseconds(j.at("run_time_limit_ms").get<long long>());
}

// ---------------------------------------------------------------------------

bool better(const Candidate& a, const Candidate& b) {
  const double fa = a.fitness.value_or(0.0);
  const double fb = b.fitness.value_or(0.0);
  if (fa != fb) return fa > fb;
  if (a.loc != b.loc) return a.loc < b.loc;
  return a.creation_index < b.creation_index;
}

std::vector<Candidate> rank(std::vector<Candidate> members) {
  std::stable_sort(members.begin(), members.end(), better);
  return members;
}

std::size_t mating_pool_size(std::size_t population_size) { return (population_size + 1) / 2; }

std::vector<std::pair<std::size_t, std::size_t>> crossover_pairs(std::size_t pool_size) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < pool_size; ++i)
    for (std::size_t j = i + 1; j < pool_size; ++j) pairs.emplace_back(i, j);
  return pairs;
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string rng_to_string(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void rng_from_string(std::mt19937_64& rng, const std::string& s) {
  std::istringstream is(s);
  is >> rng;
  if (!is) throw CorruptSnapshot("bad rng state in snapshot");
}

std::string candidate_id(long creation_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%05ld", creation_index);
  return buf;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'')
      out += "'\\''";
    else
      out += ch;
  }
  return out + "'";
}

}  // namespace

PromptPlan get_prompts(const Population& population, int size, double crossover_rate, std::mt19937_64& rng) {
  if (population.members.empty()) throw InvalidConfig("cannot build prompts from an empty population");
  const auto ranked = rank(population.members);
  const std::size_t pool = mating_pool_size(ranked.size());
  const auto pairs = crossover_pairs(pool);

  PromptPlan plan;
  std::size_t next_pair = 0;
  std::size_t next_parent = 0;
  for (int slot = 0; slot < size; ++slot) {
    const bool want_crossover = uniform01(rng) < crossover_rate;
    if (want_crossover && pairs.empty()) {
      plan.notes.push_back("PoolTooSmall: mating pool of " + std::to_string(pool) +
                           " cannot form a pair; slot " + std::to_string(slot) + " uses mutation");
    }
    if (want_crossover && !pairs.empty()) {
      if (next_pair == pairs.size()) next_pair = 0;
      const auto [a, b] = pairs[next_pair++];
      plan.requests.push_back({Operator::Crossover, {ranked[a], ranked[b]}, {}});
      ++plan.crossovers;
    } else {
      if (next_parent == ranked.size()) next_parent = 0;
      plan.requests.push_back({Operator::Mutation, {ranked[next_parent++]}, {}});
      ++plan.mutations;
    }
  }
  return plan;
}

Selection select(const std::vector<Candidate>& parents, const std::vector<Candidate>& offspring, int mu,
                 bool elitist) {
  if (mu < 1) throw InvalidConfig("mu must be >= 1");
  Selection out;
  std::vector<Candidate> chosen;
  if (elitist) {
    chosen = parents;
    chosen.insert(chosen.end(), offspring.begin(), offspring.end());
    chosen = rank(std::move(chosen));
    if (chosen.size() > static_cast<std::size_t>(mu)) chosen.resize(static_cast<std::size_t>(mu));
  } else {
    chosen = rank(offspring);
    if (chosen.size() > static_cast<std::size_t>(mu)) chosen.resize(static_cast<std::size_t>(mu));
    if (chosen.size() < static_cast<std::size_t>(mu)) {
      out.warnings.push_back("InsufficientOffspring: " + std::to_string(offspring.size()) +
                             " offspring for " + std::to_string(mu) + " slots; padding with parents");
      for (const auto& p : rank(parents)) {
        if (chosen.size() == static_cast<std::size_t>(mu)) break;
        chosen.push_back(p);
      }
      chosen = rank(std::move(chosen));
    }
  }
  out.population.members = std::move(chosen);
  return out;
}

// ---------------------------------------------------------------------------

ProcessEvaluator::ProcessEvaluator(EvalConfig config, fs::path work_dir)
    : config_(std::move(config)), work_dir_(std::move(work_dir)) {}

void ProcessEvaluator::evaluate(Candidate& candidate) {
  const fs::path dir = work_dir_ / candidate.id;
  fs::create_directories(dir);
  const fs::path source = dir / (candidate.name + ".py");
  {
    std::ofstream os(source);
    os << candidate.code;
    if (!candidate.code.empty() && candidate.code.back() != '\n') os << '\n';
  }

  const harness::ProcessRunner runner(harness::expand_command(
      config_.command_template,
      {{"source", shell_quote(fs::absolute(source).string())}, {"class", shell_quote(candidate.name)}}));

  const auto smoke = harness::smoke_test(runner, config_.smoke_time_limit);
  if (!smoke.passed) {
    candidate.fitness = 0.0;
    candidate.error = "smoke test failed: " + smoke.error;
    return;
  }

  auto settings = config_.settings();
  settings.transcript_dir = dir / "sessions";
  const auto evaluation = harness::run_candidate(runner, settings);
  candidate.fitness = evaluation.report.aggregate;
  const auto failures = evaluation.report.failures();
  if (!failures.empty()) {
    const auto* first = failures.front();
    candidate.error = std::to_string(failures.size()) + " of " + std::to_string(evaluation.report.cells.size()) +
                      " runs failed; first (f" + std::to_string(first->function_id) + " instance " +
                      std::to_string(first->instance_id) + "): " + first->error;
  }
}

// ---------------------------------------------------------------------------

Search::Search(ESConfig config, llm::Client& client, CandidateEvaluator& evaluator, store::RunStore* store)
    : config_(std::move(config)), client_(client), evaluator_(evaluator), store_(store) {
  config_.validate();
  templates_ = config_.templates_dir ? prompts::Templates::from_directory(*config_.templates_dir)
                                     : prompts::Templates::defaults();
  rng_.seed(static_cast<std::uint64_t>(config_.seed));
}

Candidate Search::make_candidate(const llm::Outcome& outcome, Origin origin, int generation,
                                 std::vector<std::string> notes) {
  Candidate c;
  if (const auto* failure = std::get_if<llm::Failure>(&outcome)) {
    c.error = failure->message;
  } else {
    auto parsed = prompts::parse_response(std::get<std::string>(outcome));
    if (auto* ok = std::get_if<Candidate>(&parsed))
      c = std::move(*ok);
    else
      c.error = "unparseable response: " + std::get<prompts::ParseFailure>(parsed).reason;
  }
  c.creation_index = state_.next_creation_index++;
  c.id = candidate_id(c.creation_index);
  if (c.name.empty()) c.name = "Invalid" + c.id;
  c.origin = std::move(origin);
  c.generation = generation;
  c.warnings.insert(c.warnings.end(), notes.begin(), notes.end());
  ++state_.generated_count;

  if (c.error) {
    c.fitness = 0.0;
  } else {
    try {
      evaluator_.evaluate(c);
    } catch (const std::exception& e) {
      c.error = std::string("evaluation failed: ") + e.what();
    }
    if (!c.fitness) c.fitness = 0.0;
  }
  state_.archive.push_back(c);
  if (store_) store_->append_candidate(c);
  return c;
}

void Search::snapshot() {
  state_.rng_state = rng_to_string(rng_);
  if (!store_) return;
  store::Snapshot s;
  s.generation = state_.population.generation;
  s.t = state_.t;
  s.generated_count = state_.generated_count;
  s.next_creation_index = state_.next_creation_index;
  for (const auto& m : state_.population.members) s.population.push_back(m.id);
  s.rng_state = state_.rng_state;
  s.finished = state_.finished;
  const auto init_size = std::min(config_.mu, config_.total_budget);
  s.phase = static_cast<int>(state_.population.members.size()) < init_size && state_.population.generation == 0
                ? "init"
                : "evolve";
  store_->append_snapshot(s);
}

SearchResult Search::result() const {
  SearchResult r;
  r.archive = state_.archive;
  r.population = state_.population;
  r.t = state_.t;
  r.generated_count = state_.generated_count;
  r.finished = state_.finished;
  r.best_fitness_per_generation = best_history_;
  for (const auto& c : state_.archive)
    if (!r.best || better(c, *r.best)) r.best = c;
  return r;
}

SearchResult Search::run(const SearchOptions& options) {
  state_ = {};
  best_history_.clear();
  rng_.seed(static_cast<std::uint64_t>(config_.seed));
  return loop(options);
}

SearchResult Search::resume(const SearchOptions& options) {
  if (!store_) throw CorruptSnapshot("resume needs a run store");
  const auto snapshots = store_->snapshots();
  if (snapshots.empty()) throw CorruptSnapshot("run has no snapshot to resume from");
  const auto& last = snapshots.back();

  std::map<std::string, Candidate> by_id;
  state_ = {};
  for (auto& c : store_->candidates()) {
    if (c.creation_index >= last.next_creation_index) continue;  // written after the snapshot
    by_id.emplace(c.id, c);
    state_.archive.push_back(std::move(c));
  }
  std::sort(state_.archive.begin(), state_.archive.end(),
            [](const Candidate& a, const Candidate& b) { return a.creation_index < b.creation_index; });

  auto population_of = [&](const store::Snapshot& s) {
    Population p;
    p.generation = s.generation;
    for (const auto& id : s.population) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw CorruptSnapshot("snapshot references unknown candidate " + id);
      p.members.push_back(it->second);
    }
    return p;
  };

  state_.population = population_of(last);
  state_.t = last.t;
  state_.generated_count = last.generated_count;
  state_.next_creation_index = last.next_creation_index;
  state_.finished = last.finished;
  state_.rng_state = last.rng_state;
  rng_from_string(rng_, last.rng_state);

  best_history_.clear();
  for (const auto& s : snapshots) {
    if (s.phase == "init") continue;
    const auto p = population_of(s);
    if (p.members.empty()) continue;
    const auto top = rank(p.members).front();
    if (static_cast<int>(best_history_.size()) <= s.generation)
      best_history_.resize(static_cast<std::size_t>(s.generation) + 1, 0.0);
    best_history_[static_cast<std::size_t>(s.generation)] = top.fitness.value_or(0.0);
  }
  if (state_.finished) return result();
  return loop(options);
}

SearchResult Search::loop(const SearchOptions& options) {
  const prompts::RenderOptions render_options{config_.history_token_budget};
  const int init_size = std::min(config_.mu, config_.total_budget);
  const auto started = std::chrono::steady_clock::now();

  // Initialization: one candidate at a time, each prompt listing everything so far.
  while (state_.population.generation == 0 && static_cast<int>(state_.population.members.size()) < init_size) {
    std::vector<prompts::HistoryEntry> history;
    for (const auto& c : state_.archive) history.push_back(prompts::HistoryEntry::of(c));
    const auto prompt = prompts::render_initialization(history, templates_, render_options);
    const auto outcomes = client_.generate_batch({prompt});
    state_.population.members.push_back(make_candidate(outcomes.front(), {Operator::Initialization, {}}, 0));
    if (static_cast<int>(state_.population.members.size()) == init_size) {
      state_.population.members = rank(std::move(state_.population.members));
      state_.t = static_cast<int>(state_.population.members.size());
      best_history_.assign(1, state_.population.members.front().fitness.value_or(0.0));
    }
    snapshot();
  }

  int generations_run = 0;
  while (state_.generated_count < config_.total_budget) {
    if (options.max_generations && generations_run >= *options.max_generations) return result();
    if (config_.run_time_limit && std::chrono::steady_clock::now() - started >= *config_.run_time_limit) break;

    const int size = std::min(config_.lambda, config_.total_budget - state_.generated_count);
    const auto plan = get_prompts(state_.population, size, config_.crossover_rate, rng_);
    std::vector<std::string> texts;
    for (const auto& req : plan.requests) texts.push_back(prompts::render(req, templates_, render_options));
    const auto outcomes = client_.generate_batch(texts);

    const int generation = state_.population.generation + 1;
    std::vector<Candidate> offspring;
    for (std::size_t i = 0; i < plan.requests.size(); ++i) {
      Origin origin{plan.requests[i].kind, {}};
      for (const auto& p : plan.requests[i].parents) origin.parents.push_back(p.id);
      // Fallback notes ride along on the first child of the batch.
      offspring.push_back(make_candidate(outcomes[i], std::move(origin), generation,
                                         i == 0 ? plan.notes : std::vector<std::string>{}));
    }

    auto selection = select(state_.population.members, offspring, config_.mu, config_.elitist);
    state_.population = std::move(selection.population);
    state_.population.generation = generation;
    state_.t += static_cast<int>(state_.population.members.size());
    best_history_.push_back(state_.population.members.front().fitness.value_or(0.0));
    ++generations_run;
    if (state_.generated_count >= config_.total_budget) state_.finished = true;
    snapshot();
  }
  if (!state_.finished) {
    // T used up during initialization, or the run time limit was hit.
    state_.finished = true;
    snapshot();
  }
  return result();
}

}  // namespace evobo::evolution
