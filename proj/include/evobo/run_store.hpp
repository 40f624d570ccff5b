#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evobo/candidate.hpp"

namespace evobo::store {

// Run directory layout:
//   config.json           configuration snapshot
//   candidates.jsonl      one record per generated candidate
//   generations.jsonl     one snapshot per completed generation
//   llm_transcript.jsonl  every LLM request and response
//   candidates/<id>/      sources, session transcripts and traces
//
// Files are only ever appended to. When a run is resumed, records written
// after the last snapshot are superseded by later records with the same id.

struct Snapshot {
  int generation = 0;
  int t = 0;
  int generated_count = 0;
  long next_creation_index = 0;
  std::vector<std::string> population;  // candidate ids
  std::string rng_state;
  bool finished = false;
  std::string phase;  // "init" or "evolve"
};

nlohmann::json to_json(const Snapshot& s);
Snapshot snapshot_from_json(const nlohmann::json& j);

class RunStore {
 public:
  /// Creates the directory (and writes the config) when `config` is given;
  /// otherwise opens an existing run.
  static RunStore create(const std::filesystem::path& dir, const nlohmann::json& config);
  /// Throws CorruptSnapshot when the directory or its config is missing.
  static RunStore open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path transcript_path() const { return dir_ / "llm_transcript.jsonl"; }
  std::filesystem::path candidate_dir(const std::string& id) const { return dir_ / "candidates" / id; }

  nlohmann::json config() const;

  void append_candidate(const Candidate& c);
  void append_snapshot(const Snapshot& s);

  /// Latest record per candidate id, in file order of first appearance.
  std::vector<Candidate> candidates() const;
  std::vector<Snapshot> snapshots() const;
  std::optional<Snapshot> last_snapshot() const;

 private:
  explicit RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void append_line(const std::filesystem::path& file, const nlohmann::json& record);

  std::filesystem::path dir_;
};

/// Reads every line of a JSONL file. Throws CorruptSnapshot on a bad line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& file);

}  // namespace evobo::store
