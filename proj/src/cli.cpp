#include "evobo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "evobo/errors.hpp"
#include "evobo/evolution.hpp"
#include "evobo/harness.hpp"
#include "evobo/llm.hpp"
#include "evobo/report.hpp"
#include "evobo/run_store.hpp"
#include "evobo/suite.hpp"
#include "evobo/worker.hpp"

namespace evobo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::vector<std::int64_t> seed_list(int count) {
  if (count < 1) throw InvalidConfig("--seeds must be >= 1");
  std::vector<std::int64_t> seeds(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) seeds[static_cast<std::size_t>(i)] = i;
  return seeds;
}

void check_functions(const std::vector<int>& fids) {
  for (int fid : fids)
    if (!suite::is_implemented(fid)) throw UnknownFunction("function " + std::to_string(fid) + " is not available");
}

std::vector<std::string> read_responses(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw InvalidConfig("cannot read mock responses from " + file.string());
  try {
    return json::parse(is).get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InvalidConfig("mock responses must be a JSON array of strings: " + std::string(e.what()));
  }
}

std::shared_ptr<llm::Backend> make_backend(const std::optional<std::string>& mock_file) {
  if (mock_file) return std::make_shared<llm::HashedBackend>(read_responses(*mock_file));
  return std::make_shared<llm::HttpBackend>();
}

// Mean of log10 loss (clipped at 1e-8) at a given evaluation count.
double mean_log_loss_at(const std::vector<report::TraceFile>& traces, std::size_t evals) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : traces) {
    if (t.best_so_far.empty()) continue;
    const double v = t.best_so_far[std::min(evals, t.best_so_far.size()) - 1];
    sum += std::log10(std::max(v - t.f_opt, 1e-8));
    ++n;
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string algo;
  std::string worker_cmd;
  std::string label;
  std::vector<int> fids;
  std::vector<int> iids{1};
  std::vector<int> dims{5};
  std::optional<int> budget;
  std::string mode = "validation";
  int seeds = 1;
  std::string out_dir = "eval_out";
  std::optional<double> ub;
  double time_limit_s = 1800;
  int workers = 1;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  std::unique_ptr<harness::CandidateRunner> runner;
  std::string label = a.label;
  if (!a.worker_cmd.empty()) {
    runner = std::make_unique<harness::ProcessRunner>(a.worker_cmd);
    if (label.empty()) label = "worker";
  } else {
    const auto& reg = optimizers::registry();
    const auto it = reg.find(a.algo);
    if (it == reg.end()) {
      err << "error: unknown algorithm '" << a.algo << "'; registered: " << join(optimizers::registered_names(), ", ")
          << "\n";
      return kUsage;
    }
    runner = std::make_unique<harness::NativeRunner>(a.algo, it->second);
    if (label.empty()) label = a.algo;
  }
  const auto fids = a.fids.empty() ? suite::implemented_functions() : a.fids;
  check_functions(fids);

  const fs::path out_dir(a.out_dir);
  std::vector<report::TraceFile> traces;
  json summary = {{"algorithm", label}, {"runner", runner->describe()}, {"mode", a.mode}, {"dims", json::array()}};
  for (int dim : a.dims) {
    if (dim < 1) throw InvalidDim("dimension must be >= 1");
    harness::EvalSettings settings;
    for (int fid : fids)
      for (int iid : a.iids) settings.specs.push_back({fid, iid, dim});
    settings.seeds = seed_list(a.seeds);
    settings.budget = a.budget.value_or(default_budget(dim, a.mode));
    if (settings.budget < 1) throw InvalidConfig("--budget must be >= 1");
    settings.time_limit = harness::Millis(static_cast<long long>(a.time_limit_s * 1000.0));
    settings.workers = a.workers;
    settings.ub_override = a.ub;

    const auto evaluation = harness::run_candidate(*runner, settings);
    json cells = json::array();
    for (const auto& cell : evaluation.cells) {
      auto t = report::from_cell(label, cell, settings.budget);
      report::write_trace_file(out_dir / "traces" / report::file_name(t), t);
      json c = {{"function_id", t.function_id},
                {"instance_id", t.instance_id},
                {"seed", t.seed},
                {"evaluations", t.best_so_far.size()},
                {"aocc", cell.aocc ? json(*cell.aocc) : json()},
                {"final_loss", t.best_so_far.empty() ? json() : json(t.best_so_far.back() - t.f_opt)},
                {"status", harness::to_string(cell.outcome.status)}};
      if (!cell.outcome.error.empty()) c["error"] = cell.outcome.error;
      cells.push_back(std::move(c));
      traces.push_back(std::move(t));
    }
    summary["dims"].push_back({{"dim", dim},
                               {"budget", settings.budget},
                               {"ub", a.ub.value_or(metrics::default_upper_bound(dim))},
                               {"mean_aocc", evaluation.report.aggregate},
                               {"failures", evaluation.report.failures().size()},
                               {"cells", std::move(cells)}});
  }
  fs::create_directories(out_dir);
  std::ofstream(out_dir / "report.json") << summary.dump(2) << '\n';
  report::print_table(out, report::aocc_table(traces, a.ub));
  out << "traces written to " << (out_dir / "traces").string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct AblateArgs {
  std::string param;
  std::vector<double> values;
  std::vector<int> fids;
  std::vector<int> iids{1, 2, 3};
  int dim = 5;
  std::optional<int> budget;
  int seeds = 5;
  std::string out_dir = "ablate_out";
  std::optional<double> ub;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out) {
  const auto arms = ablation_arms(a.param, a.values);
  const auto fids = a.fids.empty() ? suite::training_subset() : a.fids;
  check_functions(fids);
  const int budget = a.budget.value_or(default_budget(a.dim, "search"));
  if (budget < 5) throw InvalidConfig("ATRBO needs a budget of at least 5");

  harness::EvalSettings settings;
  for (int fid : fids)
    for (int iid : a.iids) settings.specs.push_back({fid, iid, a.dim});
  settings.seeds = seed_list(a.seeds);
  settings.budget = budget;
  settings.ub_override = a.ub;

  const fs::path out_dir(a.out_dir);
  std::vector<report::TraceFile> all;
  out << "arm" << std::string(20, ' ') << "mean_aocc   log10 loss at 25% / 50% / 75% / 100% of budget\n";
  for (const auto& arm : arms) {
    const auto params = arm.params;
    const harness::NativeRunner runner(arm.label, [params](Objective& f) { optimizers::atrbo(f, params); });
    const auto evaluation = harness::run_candidate(runner, settings);
    std::vector<report::TraceFile> traces;
    for (const auto& cell : evaluation.cells) {
      auto t = report::from_cell(arm.label, cell, budget);
      report::write_trace_file(out_dir / "traces" / report::file_name(t), t);
      traces.push_back(std::move(t));
    }
    char line[160];
    const auto at = [&](double frac) {
      return mean_log_loss_at(traces, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(frac * budget))));
    };
    std::snprintf(line, sizeof line, "%-22s %9.4f   %7.3f %7.3f %7.3f %7.3f\n", arm.label.c_str(),
                  evaluation.report.aggregate, at(0.25), at(0.5), at(0.75), at(1.0));
    out << line;
    all.insert(all.end(), traces.begin(), traces.end());
  }
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir / "convergence.csv");
  report::write_convergence_csv(csv, all);
  out << "convergence table written to " << (out_dir / "convergence.csv").string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::string& dir, std::optional<double> ub, const std::string& csv_path, std::ostream& out) {
  const auto traces = report::load_traces(dir);
  report::print_table(out, report::aocc_table(traces, ub));
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw InvalidConfig("cannot write " + csv_path);
    report::write_convergence_csv(csv, traces);
    out << "convergence table written to " << csv_path << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SearchArgs {
  std::string run_dir;
  std::string config_file;
  std::optional<int> total, mu, lambda, dim, budget, parallelism;
  std::optional<double> crossover_rate;
  std::optional<std::int64_t> seed;
  bool comma = false;
  std::string command, endpoint, model;
  std::optional<std::string> mock_responses;
  std::optional<int> max_generations;
};

void print_result(const evolution::SearchResult& r, std::ostream& out) {
  out << "generated " << r.generated_count << " candidates (t = " << r.t << ")"
      << (r.finished ? "" : ", stopped early") << "\n";
  if (r.best) {
    out << "best: " << r.best->id << " " << r.best->name;
    char buf[32];
    std::snprintf(buf, sizeof buf, " fitness %.4f", r.best->fitness.value_or(0.0));
    out << buf << "\n";
  }
}

int run_search(evolution::ESConfig config, store::RunStore& store, const std::optional<std::string>& mock,
               std::optional<int> max_generations, bool resume, std::ostream& out) {
  auto transcript = std::make_shared<llm::TranscriptLog>(store.transcript_path());
  llm::Client client(make_backend(mock), config.llm, transcript);
  evolution::ProcessEvaluator evaluator(config.eval, store.dir() / "candidates");
  evolution::Search search(config, client, evaluator, &store);
  evolution::SearchOptions options;
  options.max_generations = max_generations;
  print_result(resume ? search.resume(options) : search.run(options), out);
  return kOk;
}

int cmd_search(const SearchArgs& a, std::ostream& out) {
  evolution::ESConfig config;
  if (!a.config_file.empty()) {
    std::ifstream is(a.config_file);
    if (!is) throw InvalidConfig("cannot read config " + a.config_file);
    try {
      config = json::parse(is).get<evolution::ESConfig>();
    } catch (const json::exception& e) {
      throw InvalidConfig("bad config " + a.config_file + ": " + e.what());
    }
  }
  if (a.total) config.total_budget = *a.total;
  if (a.mu) config.mu = *a.mu;
  if (a.lambda) config.lambda = *a.lambda;
  if (a.crossover_rate) config.crossover_rate = *a.crossover_rate;
  if (a.seed) config.seed = *a.seed;
  if (a.comma) config.elitist = false;
  if (a.dim) config.eval.dim = *a.dim;
  if (a.budget) config.eval.budget = *a.budget;
  if (a.parallelism) config.llm.parallelism = *a.parallelism;
  if (!a.command.empty()) config.eval.command_template = a.command;
  if (!a.endpoint.empty()) config.llm.endpoint = a.endpoint;
  if (!a.model.empty()) config.llm.model = a.model;
  config.validate();
  if (!a.mock_responses && config.llm.endpoint.empty())
    throw InvalidConfig("no LLM endpoint configured (use --endpoint or --mock-responses)");

  if (fs::exists(fs::path(a.run_dir) / "config.json"))
    throw InvalidConfig("run directory " + a.run_dir + " already holds a run; use resume");
  json snapshot = {{"es", config}, {"mock_responses", a.mock_responses ? json(*a.mock_responses) : json()}};
  auto store = store::RunStore::create(a.run_dir, snapshot);
  return run_search(config, store, a.mock_responses, a.max_generations, false, out);
}

int cmd_resume(const std::string& run_dir, std::optional<std::string> mock, std::optional<int> max_generations,
               std::ostream& out) {
  auto store = store::RunStore::open(run_dir);
  const auto last = store.last_snapshot();
  if (!last) throw CorruptSnapshot("run " + run_dir + " has no snapshot to resume from");
  if (last->finished) {
    out << "run " << run_dir << " already finished; nothing to do\n";
    return kOk;
  }
  const json cfg = store.config();
  evolution::ESConfig config;
  try {
    config = cfg.at("es").get<evolution::ESConfig>();
    if (!mock && cfg.contains("mock_responses") && !cfg.at("mock_responses").is_null())
      mock = cfg.at("mock_responses").get<std::string>();
  } catch (const json::exception& e) {
    throw CorruptSnapshot("bad config.json: " + std::string(e.what()));
  }
  return run_search(config, store, mock, max_generations, true, out);
}

// ---------------------------------------------------------------------------

int cmd_suite_list(std::ostream& out) {
  const auto training = suite::training_subset();
  for (int fid : suite::implemented_functions()) {
    char buf[96];
    const bool train = std::find(training.begin(), training.end(), fid) != training.end();
    if (train)
      std::snprintf(buf, sizeof buf, "f%-3d %-36s training\n", fid, suite::function_name(fid).c_str());
    else
      std::snprintf(buf, sizeof buf, "f%-3d %s\n", fid, suite::function_name(fid).c_str());
    out << buf;
  }
  return kOk;
}

int cmd_suite_show(int fid, int iid, int dim, std::ostream& out) {
  out << suite::make_instance({fid, iid, dim}).to_record().dump(2) << "\n";
  return kOk;
}

}  // namespace

std::vector<AblationArm> ablation_arms(const std::string& param, const std::vector<double>& values) {
  std::vector<AblationArm> arms;
  auto sweep = [&](std::vector<double> grid, auto apply) {
    if (!values.empty()) grid = values;
    for (double v : grid) {
      AblationArm arm;
      arm.label = "atrbo-" + param + format_value(v);
      apply(arm.params, v);
      arms.push_back(std::move(arm));
    }
  };
  if (param == "rho") {
    sweep({0.65, 0.80, 0.95}, [](optimizers::AtrboParams& p, double v) { p.rho = v; });
  } else if (param == "kappa0") {
    sweep({1.0, 2.0, 4.0}, [](optimizers::AtrboParams& p, double v) { p.kappa0 = v; });
  } else if (param == "r0") {
    sweep({1.0, 2.5, 5.0}, [](optimizers::AtrboParams& p, double v) { p.r0 = v; });
  } else if (param == "adaptive") {
    if (!values.empty()) throw InvalidConfig("the adaptive sweep takes no values");
    const std::pair<const char*, std::pair<bool, bool>> grid[] = {{"baseline", {true, true}},
                                                                  {"fixed-kappa", {true, false}},
                                                                  {"fixed-radius", {false, true}},
                                                                  {"both-fixed", {false, false}}};
    for (const auto& [name, flags] : grid) {
      AblationArm arm;
      arm.label = std::string("atrbo-") + name;
      arm.params.adaptive_r = flags.first;
      arm.params.adaptive_kappa = flags.second;
      arms.push_back(std::move(arm));
    }
  } else {
    throw UnknownParameter("unknown ablation parameter '" + param + "'; expected rho, kappa0, r0 or adaptive");
  }
  return arms;
}

int default_budget(int dim, const std::string& mode) {
  if (mode == "validation") return 10 * dim + 50;
  if (mode == "search") return 20 * dim;
  throw InvalidConfig("unknown budget mode '" + mode + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evolutionary discovery and benchmarking of Bayesian optimization algorithms", "evobo"};
  app.require_subcommand(1);
  const std::vector<std::string> modes{"validation", "search"};

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Benchmark an optimizer over a function/instance/seed grid");
  auto* algo_opt = eval->add_option("--algo", ev.algo, "Registered algorithm: " + join(optimizers::registered_names(), ", "));
  auto* worker_opt = eval->add_option("--worker-cmd", ev.worker_cmd, "Shell command of a wire-protocol worker");
  algo_opt->excludes(worker_opt);
  eval->add_option("--label", ev.label, "Algorithm name written to the traces");
  eval->add_option("--fid", ev.fids, "Function ids (default: all)");
  eval->add_option("--iid", ev.iids, "Instance ids")->capture_default_str();
  eval->add_option("--dim", ev.dims, "Dimensions")->capture_default_str();
  eval->add_option("--budget", ev.budget, "Evaluations per run (default from --budget-mode)");
  eval->add_option("--budget-mode,--mode", ev.mode, "validation: 10d+50, search: 20d")
      ->check(CLI::IsMember(modes))
      ->capture_default_str();
  eval->add_option("--seeds", ev.seeds, "Number of seeds per cell")->capture_default_str();
  eval->add_option("--out", ev.out_dir, "Output directory")->capture_default_str();
  eval->add_option("--ub", ev.ub, "AOCC upper bound (default 1e4 for d<=5, else 1e9)");
  eval->add_option("--time-limit", ev.time_limit_s, "Wall-clock limit for the whole grid, seconds")->capture_default_str();
  eval->add_option("--workers", ev.workers, "Concurrent sessions")->capture_default_str();

  AblateArgs ab;
  auto* ablate = app.add_subcommand("ablate", "Sweep one ATRBO parameter");
  ablate->add_option("--param", ab.param, "rho, kappa0, r0 or adaptive")->required();
  ablate->add_option("--values", ab.values, "Grid values (default: the standard grid)");
  ablate->add_option("--fid", ab.fids, "Function ids (default: training subset)");
  ablate->add_option("--iid", ab.iids, "Instance ids")->capture_default_str();
  ablate->add_option("--dim", ab.dim, "Dimension")->capture_default_str();
  ablate->add_option("--budget", ab.budget, "Evaluations per run (default 20d)");
  ablate->add_option("--seeds", ab.seeds, "Number of seeds per cell")->capture_default_str();
  ablate->add_option("--out", ab.out_dir, "Output directory")->capture_default_str();
  ablate->add_option("--ub", ab.ub, "AOCC upper bound override");

  std::string report_dir, report_csv;
  std::optional<double> report_ub;
  auto* rep = app.add_subcommand("report", "Summarize trace files: mean AOCC per algorithm and dimension");
  rep->add_option("dir", report_dir, "Directory searched recursively for trace files")->required();
  rep->add_option("--ub", report_ub, "AOCC upper bound override");
  rep->add_option("--csv", report_csv, "Write the per-function convergence table here");

  SearchArgs se;
  auto* search = app.add_subcommand("search", "Run the LLM-driven evolution strategy");
  search->add_option("--run-dir", se.run_dir, "New run directory")->required();
  search->add_option("--config", se.config_file, "JSON configuration file");
  search->add_option("--total,-T", se.total, "Candidates to generate");
  search->add_option("--mu", se.mu, "Parent population size");
  search->add_option("--lambda", se.lambda, "Offspring per generation");
  search->add_option("--crossover-rate", se.crossover_rate, "Probability of a crossover slot");
  search->add_flag("--comma", se.comma, "Non-elitist (mu, lambda) selection");
  search->add_option("--seed", se.seed, "Seed for operator choice");
  search->add_option("--dim", se.dim, "Benchmark dimension");
  search->add_option("--budget", se.budget, "Evaluations per benchmark run (default 20d)");
  search->add_option("--command", se.command, "Candidate launch command; {source} and {class} are substituted");
  search->add_option("--endpoint", se.endpoint, "Chat completions URL");
  search->add_option("--model", se.model, "Model name");
  search->add_option("--llm-parallelism", se.parallelism, "Concurrent LLM requests");
  search->add_option("--mock-responses", se.mock_responses, "JSON array of canned LLM responses (offline)");
  search->add_option("--max-generations", se.max_generations, "Stop after this many generations");

  std::string resume_dir;
  std::optional<std::string> resume_mock;
  std::optional<int> resume_max;
  auto* resume = app.add_subcommand("resume", "Continue an interrupted search");
  resume->add_option("--run-dir", resume_dir, "Run directory")->required();
  resume->add_option("--mock-responses", resume_mock, "Override the recorded mock responses");
  resume->add_option("--max-generations", resume_max, "Stop after this many more generations");

  auto* suite_cmd = app.add_subcommand("suite", "Inspect the benchmark functions");
  suite_cmd->require_subcommand(1);
  suite_cmd->add_subcommand("list", "List available functions");
  int show_fid = 1, show_iid = 1, show_dim = 2;
  auto* show = suite_cmd->add_subcommand("show", "Print an instance record");
  show->add_option("--fid", show_fid)->required();
  show->add_option("--iid", show_iid)->capture_default_str();
  show->add_option("--dim", show_dim)->capture_default_str();

  std::string worker_algo;
  auto* worker = app.add_subcommand("worker", "Serve a registered algorithm over the wire protocol on stdio");
  worker->add_option("--algo", worker_algo, "Registered algorithm")->required();

  std::vector<std::string> argv_store{"evobo"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*eval) {
      if (ev.algo.empty() && ev.worker_cmd.empty()) {
        err << "error: eval needs --algo or --worker-cmd; registered: " << join(optimizers::registered_names(), ", ")
            << "\n";
        return kUsage;
      }
      return cmd_eval(ev, out, err);
    }
    if (*ablate) return cmd_ablate(ab, out);
    if (*rep) return cmd_report(report_dir, report_ub, report_csv, out);
    if (*search) return cmd_search(se, out);
    if (*resume) return cmd_resume(resume_dir, resume_mock, resume_max, out);
    if (*suite_cmd) {
      if (*show) return cmd_suite_show(show_fid, show_iid, show_dim, out);
      return cmd_suite_list(out);
    }
    if (*worker) {
      const auto& reg = optimizers::registry();
      const auto it = reg.find(worker_algo);
      if (it == reg.end()) {
        err << "error: unknown algorithm '" << worker_algo << "'; registered: "
            << join(optimizers::registered_names(), ", ") << "\n";
        return kUsage;
      }
      return worker::serve(std::cin, out, it->second);
    }
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownParameter& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownFunction& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidDim& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace evobo::cli
