#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>

#include "evobo/errors.hpp"
#include "evobo/evolution.hpp"
#include "evobo/run_store.hpp"
#include "oracles.hpp"

using namespace evobo;
using namespace evobo::evolution;
namespace fs = std::filesystem;

namespace {

Candidate cand(const std::string& id, double fitness, int loc, long index) {
  Candidate c;
  c.id = id;
  c.name = "N" + id;
  c.fitness = fitness;
  c.loc = loc;
  c.creation_index = index;
  return c;
}

std::string response(const std::string& name, int extra_lines = 0) {
  std::string body;
  for (int i = 0; i < extra_lines; ++i) body += "    v" + std::to_string(i) + " = " + std::to_string(i) + "\n";
  return "# Description: " + name + " variant\n# Code:\n```python\nclass " + name + ":\n" + body + "    pass\n```\n";
}

std::vector<std::string> mock_responses() {
  std::vector<std::string> out;
  for (int i = 0; i < 12; ++i) out.push_back(response("Algo" + std::to_string(i), i % 4));
  out.push_back("Sorry, no code this time.");
  return out;
}

// Fitness is a fixed function of the class name, so runs are reproducible.
FunctionEvaluator name_fitness() {
  return FunctionEvaluator([](Candidate& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (char ch : c.name) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
    c.fitness = static_cast<double>(h % 1000) / 1000.0;
  });
}

ESConfig small_config(int total, int mu, int lambda) {
  ESConfig c;
  c.total_budget = total;
  c.mu = mu;
  c.lambda = lambda;
  c.seed = 11;
  return c;
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("evobo_test_evolution_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> ids(const std::vector<Candidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.id);
  return out;
}

}  // namespace

TEST_CASE("ranking breaks ties on loc, then creation order") {
  const auto ranked = rank({cand("a", 0.5, 30, 0), cand("b", 0.7, 50, 1), cand("c", 0.5, 20, 2),
                            cand("d", 0.5, 20, 3)});
  CHECK(ids(ranked) == std::vector<std::string>{"b", "c", "d", "a"});
  Candidate missing = cand("m", 0.0, 1, 9);
  missing.fitness.reset();
  CHECK(better(cand("z", 0.0, 1, 0), missing));
  CHECK(better(missing, cand("y", 0.0, 2, 0)));
}

TEST_CASE("mating pool and crossover pairs") {
  CHECK(mating_pool_size(1) == 1);
  CHECK(mating_pool_size(4) == 2);
  CHECK(mating_pool_size(5) == 3);
  CHECK(crossover_pairs(3) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 2}});
  for (std::size_t n = 0; n < 12; ++n) {
    CHECK(crossover_pairs(n) == oracle::pairs_by_enumeration(n));
    CHECK(crossover_pairs(n).size() == n * (n - (n > 0 ? 1 : 0)) / 2);
  }
}

TEST_CASE("get_prompts with a one-member population mutates only") {
  Population p{{cand("a", 0.3, 10, 0)}, 1};
  std::mt19937_64 rng(0);
  const auto plan = get_prompts(p, 5, 1.0, rng);
  CHECK(plan.mutations == 5);
  CHECK(plan.crossovers == 0);
  CHECK(plan.notes.size() == 5);
  CHECK(plan.notes[0].rfind("PoolTooSmall", 0) == 0);
  CHECK_THROWS_AS(get_prompts(Population{}, 3, 0.5, rng), InvalidConfig);
}

TEST_CASE("get_prompts pairs and mutation queue follow the ranking") {
  Population p{{cand("a", 0.1, 1, 0), cand("b", 0.4, 1, 1), cand("c", 0.3, 1, 2), cand("d", 0.2, 1, 3)}, 1};
  std::mt19937_64 rng(0);
  const auto all_cross = get_prompts(p, 3, 1.0, rng);
  REQUIRE(all_cross.crossovers == 3);
  // Pool is {b, c}; the only pair repeats.
  for (const auto& r : all_cross.requests) {
    CHECK(r.kind == Operator::Crossover);
    CHECK(r.parents[0].id == "b");
    CHECK(r.parents[1].id == "c");
  }
  const auto all_mut = get_prompts(p, 6, 0.0, rng);
  std::vector<std::string> order;
  for (const auto& r : all_mut.requests) order.push_back(r.parents.at(0).id);
  CHECK(order == std::vector<std::string>{"b", "c", "d", "a", "b", "c"});
}

TEST_CASE("get_prompts consumes one draw per slot") {
  Population p{{cand("a", 0.1, 1, 0), cand("b", 0.4, 1, 1), cand("c", 0.3, 1, 2), cand("d", 0.2, 1, 3)}, 1};
  std::mt19937_64 rng(5), mirror(5);
  const auto plan = get_prompts(p, 20, 0.6, rng);
  for (const auto& r : plan.requests) {
    const bool cross = static_cast<double>(mirror() >> 11) * 0x1.0p-53 < 0.6;
    CHECK((r.kind == Operator::Crossover) == cross);
  }
  CHECK(rng == mirror);
}

TEST_CASE("crossover fraction over many draws") {
  Population p{{cand("a", 0.1, 1, 0), cand("b", 0.4, 1, 1), cand("c", 0.3, 1, 2), cand("d", 0.2, 1, 3)}, 1};
  std::mt19937_64 rng(2024);
  const auto plan = get_prompts(p, 1000, 0.6, rng);
  CHECK(plan.crossovers + plan.mutations == 1000);
  CHECK(std::abs(plan.crossovers / 1000.0 - 0.6) <= 0.046);
}

TEST_CASE("selection examples") {
  const std::vector<Candidate> parents{cand("p1", 0.5, 10, 0), cand("p2", 0.2, 10, 1)};
  const std::vector<Candidate> offspring{cand("o1", 0.3, 10, 2), cand("o2", 0.9, 10, 3), cand("o3", 0.1, 10, 4)};
  CHECK(ids(select(parents, offspring, 2, true).population.members) == std::vector<std::string>{"o2", "p1"});
  CHECK(ids(select(parents, offspring, 2, false).population.members) == std::vector<std::string>{"o2", "o1"});

  const auto padded = select(parents, {cand("o1", 0.3, 10, 2)}, 2, false);
  CHECK(ids(padded.population.members) == std::vector<std::string>{"p1", "o1"});
  REQUIRE(padded.warnings.size() == 1);
  CHECK(padded.warnings[0].rfind("InsufficientOffspring", 0) == 0);
  CHECK_THROWS_AS(select(parents, offspring, 0, true), InvalidConfig);
}

TEST_CASE("selection matches the reference on random populations") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> fit(0, 9), loc(5, 9), size(1, 8);
  for (int rep = 0; rep < 200; ++rep) {
    long index = 0;
    std::vector<Candidate> parents, offspring;
    const int np = size(rng), no = size(rng) - 1;
    for (int i = 0; i < np; ++i) parents.push_back(cand("p" + std::to_string(i), fit(rng) / 10.0, loc(rng), index++));
    for (int i = 0; i < no; ++i) offspring.push_back(cand("o" + std::to_string(i), fit(rng) / 10.0, loc(rng), index++));
    std::shuffle(parents.begin(), parents.end(), rng);
    const int mu = std::uniform_int_distribution<int>(1, np)(rng);
    for (bool elitist : {true, false}) {
      const auto got = select(parents, offspring, mu, elitist);
      CHECK(ids(got.population.members) == oracle::select_reference(parents, offspring, mu, elitist));
      CHECK(got.population.members.size() == static_cast<std::size_t>(mu));
      if (elitist) {
        double best = 0.0;
        for (const auto& c : parents) best = std::max(best, *c.fitness);
        CHECK(*got.population.members.front().fitness >= best);
      }
    }
  }
}

TEST_CASE("config validation and JSON") {
  ESConfig c;
  CHECK_NOTHROW(c.validate());
  c.mu = 0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = {};
  c.crossover_rate = 1.5;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = {};
  c.elitist = false;
  c.lambda = 2;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);

  ESConfig d = small_config(30, 3, 5);
  d.run_time_limit = std::chrono::seconds(90);
  d.eval.function_ids = {1, 2};
  const nlohmann::json j = d;
  const auto back = j.get<ESConfig>();
  CHECK(back.total_budget == 30);
  CHECK(back.mu == 3);
  CHECK(back.run_time_limit == std::chrono::seconds(90));
  CHECK(back.eval.function_ids == std::vector<int>{1, 2});
  CHECK(EvalConfig().effective_budget() == 100);
}

TEST_CASE("initialization prompts grow with history") {
  auto backend = std::make_shared<llm::ScriptedBackend>(mock_responses(), true);
  llm::Client client(backend, {});
  auto eval = name_fitness();
  Search search(small_config(4, 4, 4), client, eval);
  const auto result = search.run();
  CHECK(result.archive.size() == 4);
  CHECK(result.finished);
  CHECK(result.t == 4);
  const auto prompts = backend->prompts();
  REQUIRE(prompts.size() == 4);
  CHECK(prompts[0].find("0 algorithms have been designed") != std::string::npos);
  CHECK(prompts[3].find("3 algorithms have been designed") != std::string::npos);
  CHECK(prompts[3].find("Algo2") != std::string::npos);
}

TEST_CASE("an unparseable reply becomes a zero-fitness candidate") {
  auto backend = std::make_shared<llm::ScriptedBackend>(std::vector<std::string>{"just prose", response("Good")});
  llm::Client client(backend, {});
  int evaluated = 0;
  FunctionEvaluator eval([&](Candidate& c) {
    ++evaluated;
    c.fitness = 0.4;
  });
  const auto result = Search(small_config(2, 2, 2), client, eval).run();
  REQUIRE(result.archive.size() == 2);
  CHECK(result.archive[0].fitness == 0.0);
  CHECK(result.archive[0].error->rfind("unparseable response", 0) == 0);
  CHECK(result.archive[0].name == "Invalidc00000");
  CHECK(evaluated == 1);
  CHECK(result.best->name == "Good");
}

TEST_CASE("a (1+1) run with T = 3") {
  auto backend = std::make_shared<llm::HashedBackend>(mock_responses());
  llm::Client client(backend, {});
  auto eval = name_fitness();
  const auto result = Search(small_config(3, 1, 1), client, eval).run();
  CHECK(result.generated_count == 3);
  CHECK(result.t == 3);
  CHECK(result.population.members.size() == 1);
  CHECK(result.best_fitness_per_generation.size() == 3);
  for (std::size_t i = 1; i < result.best_fitness_per_generation.size(); ++i)
    CHECK(result.best_fitness_per_generation[i] >= result.best_fitness_per_generation[i - 1]);
  CHECK(result.archive[1].origin.op == Operator::Mutation);
  CHECK(result.archive[1].origin.parents == std::vector<std::string>{"c00000"});
}

TEST_CASE("generation stops exactly at T and the elitist best never drops") {
  auto backend = std::make_shared<llm::HashedBackend>(mock_responses());
  llm::Client client(backend, {});
  auto eval = name_fitness();
  const auto result = Search(small_config(100, 4, 16), client, eval).run();
  CHECK(result.archive.size() == 100);
  CHECK(result.generated_count == 100);
  // 4 initial, then 6 batches of 16.
  CHECK(result.best_fitness_per_generation.size() == 7);
  CHECK(result.t == 4 + 6 * 4);
  for (std::size_t i = 1; i < result.best_fitness_per_generation.size(); ++i)
    CHECK(result.best_fitness_per_generation[i] >= result.best_fitness_per_generation[i - 1]);
  double best = 0.0;
  for (const auto& c : result.archive) best = std::max(best, *c.fitness);
  CHECK(*result.best->fitness == best);

  const auto partial = Search(small_config(10, 4, 16), client, eval).run();
  CHECK(partial.archive.size() == 10);
  CHECK(partial.archive.back().generation == 1);
}

TEST_CASE("comma selection survives an all-failure generation") {
  auto backend = std::make_shared<llm::ScriptedBackend>(
      std::vector<llm::ScriptedBackend::Step>{{llm::BackendReply::Kind::Ok, response("A")},
                                              {llm::BackendReply::Kind::Ok, response("B")},
                                              {llm::BackendReply::Kind::Fatal, "down"}},
      false);
  llm::Client client(backend, {});
  auto eval = name_fitness();
  auto config = small_config(6, 2, 4);
  config.elitist = false;
  const auto result = Search(config, client, eval).run();
  CHECK(result.archive.size() == 6);
  for (std::size_t i = 2; i < 6; ++i) {
    CHECK(result.archive[i].fitness == 0.0);
    CHECK(result.archive[i].error.has_value());
  }
  CHECK(result.population.members.size() == 2);
}

TEST_CASE("evaluator exceptions are recorded, not propagated") {
  llm::Client client(std::make_shared<llm::HashedBackend>(mock_responses()), {});
  FunctionEvaluator eval([](Candidate&) { throw std::runtime_error("kaput"); });
  const auto result = Search(small_config(2, 2, 2), client, eval).run();
  for (const auto& c : result.archive) {
    CHECK(c.fitness == 0.0);
    CHECK(c.error == "evaluation failed: kaput");
  }
}

TEST_CASE("an interrupted run resumes to the same result") {
  const auto config = small_config(30, 3, 6);
  auto eval = name_fitness();

  llm::Client straight_client(std::make_shared<llm::HashedBackend>(mock_responses()), {});
  const auto straight = Search(config, straight_client, eval).run();

  const auto dir = temp_dir("resume");
  auto store = store::RunStore::create(dir, nlohmann::json(config));
  llm::Client client(std::make_shared<llm::HashedBackend>(mock_responses()), {});
  const auto first = Search(config, client, eval, &store).run({2});
  CHECK_FALSE(first.finished);
  CHECK(first.generated_count == 3 + 2 * 6);

  // Simulate a crash mid-generation: a stray record beyond the last snapshot.
  Candidate stray = first.archive.back();
  stray.id = "c99999";
  stray.creation_index = 99999;
  store.append_candidate(stray);

  auto reopened = store::RunStore::open(dir);
  const auto resumed = Search(config, client, eval, &reopened).resume();
  CHECK(resumed.finished);
  CHECK(resumed.generated_count == straight.generated_count);
  CHECK(resumed.t == straight.t);
  CHECK(ids(resumed.archive) == ids(straight.archive));
  CHECK(ids(resumed.population.members) == ids(straight.population.members));
  CHECK(resumed.best_fitness_per_generation == straight.best_fitness_per_generation);

  const auto again = Search(config, client, eval, &reopened).resume();
  CHECK(again.generated_count == resumed.generated_count);

  // Every stored snapshot reproduces its population from the stored candidates.
  std::map<std::string, Candidate> by_id;
  for (const auto& c : reopened.candidates()) by_id[c.id] = c;
  const auto snaps = reopened.snapshots();
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    if (snaps[i].phase != "evolve" || snaps[i - 1].phase != "evolve" || snaps[i].generation != snaps[i - 1].generation + 1)
      continue;
    std::vector<Candidate> parents, offspring;
    for (const auto& id : snaps[i - 1].population) parents.push_back(by_id.at(id));
    for (const auto& [id, c] : by_id)
      if (c.generation == snaps[i].generation && c.creation_index < snaps[i].next_creation_index) offspring.push_back(c);
    CHECK(oracle::select_reference(parents, offspring, config.mu, config.elitist) == snaps[i].population);
  }
}

TEST_CASE("resume needs a run") {
  llm::Client client(std::make_shared<llm::HashedBackend>(mock_responses()), {});
  auto eval = name_fitness();
  CHECK_THROWS_AS(store::RunStore::open(temp_dir("missing")), CorruptSnapshot);
  CHECK_THROWS_AS(Search(small_config(4, 2, 2), client, eval).resume(), CorruptSnapshot);
  auto empty = store::RunStore::create(temp_dir("empty"), nlohmann::json::object());
  CHECK_THROWS_AS(Search(small_config(4, 2, 2), client, eval, &empty).resume(), CorruptSnapshot);
}

TEST_CASE("process evaluator scores a worker and catches a broken one") {
  EvalConfig config;
  config.function_ids = {1, 2};
  config.instances = {1};
  config.dim = 2;
  config.budget = 8;
  config.smoke_time_limit = std::chrono::seconds(10);
  config.time_limit = std::chrono::seconds(30);
  config.min_session_slice = std::chrono::seconds(5);
  const auto dir = temp_dir("process");

  config.command_template = std::string(EVOBO_FIXTURE_WORKER) + " greedy";
  ProcessEvaluator good(config, dir);
  Candidate c;
  c.id = "c00000";
  c.name = "Greedy";
  c.code = "class Greedy:\n    pass";
  good.evaluate(c);
  REQUIRE(c.fitness);
  CHECK(*c.fitness > 0.0);
  CHECK_FALSE(c.error);
  CHECK(fs::exists(dir / "c00000" / "Greedy.py"));
  CHECK(fs::exists(dir / "c00000" / "sessions"));

  config.command_template = std::string(EVOBO_FIXTURE_WORKER) + " malformed";
  ProcessEvaluator bad(config, dir);
  Candidate b;
  b.id = "c00001";
  b.name = "Broken";
  bad.evaluate(b);
  CHECK(b.fitness == 0.0);
  CHECK(b.error->rfind("smoke test failed", 0) == 0);

  config.command_template = std::string(EVOBO_CLI) + " worker --algo random # {source} {class}";
  ProcessEvaluator cli_worker(config, dir);
  Candidate r;
  r.id = "c00002";
  r.name = "Rand";
  cli_worker.evaluate(r);
  CHECK(*r.fitness > 0.0);
}
