#include "evobo/run_store.hpp"

#include <fstream>
#include <map>

#include "evobo/errors.hpp"

namespace evobo::store {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const Snapshot& s) {
  return {{"generation", s.generation},
          {"t", s.t},
          {"generated_count", s.generated_count},
          {"next_creation_index", s.next_creation_index},
          {"population", s.population},
          {"rng_state", s.rng_state},
          {"finished", s.finished},
          {"phase", s.phase}};
}

Snapshot snapshot_from_json(const json& j) {
  try {
    Snapshot s;
    s.generation = j.at("generation").get<int>();
    s.t = j.at("t").get<int>();
    s.generated_count = j.at("generated_count").get<int>();
    s.next_creation_index = j.at("next_creation_index").get<long>();
    s.population = j.at("population").get<std::vector<std::string>>();
    s.rng_state = j.at("rng_state").get<std::string>();
    s.finished = j.at("finished").get<bool>();
    s.phase = j.value("phase", "evolve");
    return s;
  } catch (const json::exception& e) {
    throw CorruptSnapshot(std::string("bad snapshot record: ") + e.what());
  }
}

std::vector<json> read_jsonl(const fs::path& file) {
  std::vector<json> out;
  std::ifstream is(file);
  if (!is) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw CorruptSnapshot(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

RunStore RunStore::create(const fs::path& dir, const json& config) {
  fs::create_directories(dir / "candidates");
  std::ofstream os(dir / "config.json");
  os << config.dump(2) << '\n';
  if (!os) throw Error("cannot write " + (dir / "config.json").string());
  return RunStore(dir);
}

RunStore RunStore::open(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw CorruptSnapshot("run directory " + dir.string() + " does not exist");
  if (!fs::exists(dir / "config.json")) throw CorruptSnapshot("run directory " + dir.string() + " has no config.json");
  return RunStore(dir);
}

json RunStore::config() const {
  std::ifstream is(dir_ / "config.json");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw CorruptSnapshot(std::string("bad config.json: ") + e.what());
  }
}

void RunStore::append_line(const fs::path& file, const json& record) {
  std::ofstream os(file, std::ios::app);
  os << record.dump() << '\n';
  os.flush();
  if (!os) throw Error("cannot append to " + file.string());
}

void RunStore::append_candidate(const Candidate& c) { append_line(dir_ / "candidates.jsonl", to_json(c)); }

void RunStore::append_snapshot(const Snapshot& s) { append_line(dir_ / "generations.jsonl", to_json(s)); }

std::vector<Candidate> RunStore::candidates() const {
  std::vector<Candidate> out;
  std::map<std::string, std::size_t> index;
  for (const auto& j : read_jsonl(dir_ / "candidates.jsonl")) {
    Candidate c = candidate_from_json(j);
    if (auto it = index.find(c.id); it != index.end()) {
      out[it->second] = std::move(c);
    } else {
      index.emplace(c.id, out.size());
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Snapshot> RunStore::snapshots() const {
  std::vector<Snapshot> out;
  for (const auto& j : read_jsonl(dir_ / "generations.jsonl")) out.push_back(snapshot_from_json(j));
  return out;
}

std::optional<Snapshot> RunStore::last_snapshot() const {
  auto all = snapshots();
  if (all.empty()) return std::nullopt;
  return all.back();
}

}  // namespace evobo::store
