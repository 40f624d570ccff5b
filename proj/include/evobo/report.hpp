#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evobo/harness.hpp"

namespace evobo::report {

/// One benchmark cell as stored on disk: a JSONL file with one record per
/// evaluation ({function_id, instance_id, seed, eval_index, best_so_far,
/// algorithm, dim, f_opt, budget}). A failed cell adds a final record carrying
/// "error" and no eval_index.
struct TraceFile {
  std::string algorithm;
  int function_id = 0;
  int instance_id = 0;
  int dim = 0;
  std::int64_t seed = 0;
  double f_opt = 0.0;
  int budget = 0;
  std::vector<double> best_so_far;
  std::optional<std::string> error;
};

TraceFile from_cell(const std::string& algorithm, const harness::CellResult& cell, int budget);

/// "<algorithm>_f<fid>_i<iid>_d<dim>_s<seed>.jsonl"
std::string file_name(const TraceFile& t);

void write_trace_file(const std::filesystem::path& file, const TraceFile& t);
/// Throws CorruptSnapshot on malformed content.
TraceFile read_trace_file(const std::filesystem::path& file);

/// Every trace file below `dir`, sorted by path. Throws NoData when the
/// directory is missing or holds none.
std::vector<TraceFile> load_traces(const std::filesystem::path& dir);

/// AOCC of one stored cell; failed or empty cells score 0. The upper bound
/// follows the cell's dimension unless overridden.
double cell_aocc(const TraceFile& t, std::optional<double> ub_override = std::nullopt);

struct TableRow {
  std::string algorithm;
  int dim = 0;
  double ub = 0.0;
  double mean_aocc = 0.0;
  std::size_t cells = 0;
  std::size_t failures = 0;
};

/// Mean AOCC per (algorithm, dimension). Throws NoData on empty input.
std::vector<TableRow> aocc_table(const std::vector<TraceFile>& traces,
                                 std::optional<double> ub_override = std::nullopt);

void print_table(std::ostream& os, const std::vector<TableRow>& rows);

/// Columns: algorithm,dim,function_id,eval_index,mean_loss,mean_log10_loss,cells.
/// Losses are averaged over instances and seeds (log10 after clipping at 1e-8);
/// short traces are padded with their final value up to the longest budget in
/// the group. Failed cells are left out.
void write_convergence_csv(std::ostream& os, const std::vector<TraceFile>& traces);

}  // namespace evobo::report
