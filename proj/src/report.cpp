#include "evobo/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "evobo/errors.hpp"
#include "evobo/metrics.hpp"

namespace evobo::report {

namespace fs = std::filesystem;
using nlohmann::json;

TraceFile from_cell(const std::string& algorithm, const harness::CellResult& cell, int budget) {
  TraceFile t;
  t.algorithm = algorithm;
  t.function_id = cell.spec.function_id;
  t.instance_id = cell.spec.instance_id;
  t.dim = cell.spec.dim;
  t.seed = cell.seed;
  t.f_opt = cell.trace.f_opt();
  t.budget = budget;
  t.best_so_far = cell.trace.values();
  if (!cell.aocc) t.error = cell.outcome.error.empty() ? "no evaluations returned" : cell.outcome.error;
  return t;
}

std::string file_name(const TraceFile& t) {
  return t.algorithm + "_f" + std::to_string(t.function_id) + "_i" + std::to_string(t.instance_id) + "_d" +
         std::to_string(t.dim) + "_s" + std::to_string(t.seed) + ".jsonl";
}

namespace {

json header(const TraceFile& t) {
  return {{"function_id", t.function_id}, {"instance_id", t.instance_id}, {"seed", t.seed},
          {"algorithm", t.algorithm},     {"dim", t.dim},                 {"f_opt", t.f_opt},
          {"budget", t.budget}};
}

}  // namespace

void write_trace_file(const fs::path& file, const TraceFile& t) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file);
  for (std::size_t i = 0; i < t.best_so_far.size(); ++i) {
    json r = header(t);
    r["eval_index"] = i;
    r["best_so_far"] = t.best_so_far[i];
    os << r.dump() << '\n';
  }
  if (t.error) {
    json r = header(t);
    r["error"] = *t.error;
    os << r.dump() << '\n';
  }
  if (!os) throw Error("cannot write trace file " + file.string());
}

TraceFile read_trace_file(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw NoData("cannot read " + file.string());
  TraceFile t;
  bool first = true;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json r = json::parse(line);
      if (first) {
        t.algorithm = r.at("algorithm").get<std::string>();
        t.function_id = r.at("function_id").get<int>();
        t.instance_id = r.at("instance_id").get<int>();
        t.dim = r.at("dim").get<int>();
        t.seed = r.at("seed").get<std::int64_t>();
        t.f_opt = r.at("f_opt").get<double>();
        t.budget = r.at("budget").get<int>();
        first = false;
      }
      if (r.contains("error")) {
        t.error = r.at("error").get<std::string>();
      } else {
        const auto index = r.at("eval_index").get<std::size_t>();
        if (index != t.best_so_far.size())
          throw CorruptSnapshot(file.string() + ":" + std::to_string(lineno) + ": eval_index out of order");
        t.best_so_far.push_back(r.at("best_so_far").get<double>());
      }
    } catch (const json::exception& e) {
      throw CorruptSnapshot(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (first) throw CorruptSnapshot(file.string() + " is empty");
  return t;
}

std::vector<TraceFile> load_traces(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw NoData("no such directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
    // Only files that look like trace records; run logs share the extension.
    std::ifstream is(entry.path());
    std::string line;
    if (!std::getline(is, line)) continue;
    try {
      const json r = json::parse(line);
      if (r.is_object() && r.contains("algorithm") && r.contains("budget") && r.contains("function_id"))
        files.push_back(entry.path());
    } catch (const json::exception&) {
    }
  }
  if (files.empty()) throw NoData("no trace files under " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<TraceFile> out;
  for (const auto& f : files) out.push_back(read_trace_file(f));
  return out;
}

double cell_aocc(const TraceFile& t, std::optional<double> ub_override) {
  if (t.error || t.best_so_far.empty()) return 0.0;
  auto cfg = metrics::AOCCConfig::for_dimension(t.dim, t.budget);
  if (ub_override) cfg.ub = *ub_override;
  return metrics::aocc(metrics::Trace(t.best_so_far, t.f_opt), cfg);
}

std::vector<TableRow> aocc_table(const std::vector<TraceFile>& traces, std::optional<double> ub_override) {
  if (traces.empty()) throw NoData("no traces to report");
  std::map<std::pair<std::string, int>, std::vector<metrics::CellScore>> groups;
  for (const auto& t : traces) {
    metrics::CellScore s;
    s.function_id = t.function_id;
    s.instance_id = t.instance_id;
    s.seed = static_cast<int>(t.seed);
    if (!t.error && !t.best_so_far.empty()) s.aocc = cell_aocc(t, ub_override);
    groups[{t.algorithm, t.dim}].push_back(std::move(s));
  }
  std::vector<TableRow> rows;
  for (const auto& [key, cells] : groups) {
    TableRow row;
    row.algorithm = key.first;
    row.dim = key.second;
    row.ub = ub_override.value_or(metrics::default_upper_bound(key.second));
    row.mean_aocc = metrics::aggregate_fitness(cells);
    row.cells = cells.size();
    row.failures = static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(),
                                                          [](const auto& c) { return c.failed(); }));
    rows.push_back(row);
  }
  return rows;
}

void print_table(std::ostream& os, const std::vector<TableRow>& rows) {
  std::size_t width = 9;
  for (const auto& r : rows) width = std::max(width, r.algorithm.size());
  os << std::left << std::setw(static_cast<int>(width)) << "algorithm" << "  dim        ub  mean_aocc  cells  failed\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(static_cast<int>(width)) << r.algorithm << std::right << "  " << std::setw(3)
       << r.dim << "  " << std::setw(8) << std::scientific << std::setprecision(0) << r.ub << "  " << std::fixed
       << std::setprecision(4) << std::setw(9) << r.mean_aocc << "  " << std::setw(5) << r.cells << "  "
       << std::setw(6) << r.failures << '\n';
  }
  os << std::defaultfloat;
}

void write_convergence_csv(std::ostream& os, const std::vector<TraceFile>& traces) {
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, std::vector<const TraceFile*>> groups;
  for (const auto& t : traces)
    if (!t.error && !t.best_so_far.empty()) groups[{t.algorithm, t.dim, t.function_id}].push_back(&t);

  os << "algorithm,dim,function_id,eval_index,mean_loss,mean_log10_loss,cells\n";
  os << std::setprecision(10);
  for (const auto& [key, cells] : groups) {
    std::size_t length = 0;
    for (const auto* t : cells) length = std::max({length, t->best_so_far.size(), static_cast<std::size_t>(t->budget)});
    for (std::size_t i = 0; i < length; ++i) {
      double loss = 0.0;
      double log_loss = 0.0;
      for (const auto* t : cells) {
        const double v = t->best_so_far[std::min(i, t->best_so_far.size() - 1)];
        const double l = std::max(0.0, v - t->f_opt);
        loss += l;
        log_loss += std::log10(std::max(l, 1e-8));
      }
      const auto n = static_cast<double>(cells.size());
      os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ',' << i << ',' << loss / n
         << ',' << log_loss / n << ',' << cells.size() << '\n';
    }
  }
}

}  // namespace evobo::report
