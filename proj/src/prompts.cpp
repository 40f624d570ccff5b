#include "evobo/prompts.hpp"

#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "evobo/errors.hpp"
#include "prompt_assets.hpp"

namespace evobo::prompts {

namespace {

constexpr const char* kKeys[] = {"role", "task", "code_template", "output_format",
                                 "initialization", "mutation", "crossover"};

std::string trim_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

std::string format_score(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

// Collapses runs of blank lines left behind by empty placeholders.
std::string tidy(const std::string& text) {
  std::string out;
  std::istringstream is(text);
  std::string line;
  bool previous_blank = false;
  while (std::getline(is, line)) {
    const bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank && previous_blank) continue;
    out += line;
    out += '\n';
    previous_blank = blank;
  }
  return trim_trailing_newlines(out) + "\n";
}

std::string render_parent(const Candidate& c) {
  std::string s = "Algorithm: " + c.name + "\n";
  if (!c.description.empty()) s += "Description: " + c.description + "\n";
  s += "Score (AOCC, higher is better): " + format_score(*c.fitness) + "\n";
  if (c.error && !c.error->empty()) s += "Error: " + *c.error + "\n";
  s += "```python\n" + trim_trailing_newlines(c.code) + "\n```";
  return s;
}

std::string render_history_entry(std::size_t index, const HistoryEntry& h) {
  std::string s = std::to_string(index) + ". " + h.name;
  if (!h.description.empty()) s += ": " + h.description;
  if (h.fitness) s += " (score " + format_score(*h.fitness) + ")";
  s += "\n";
  if (h.error && !h.error->empty()) s += "   Error: " + *h.error + "\n";
  return s;
}

std::map<std::string, std::string> common_values(const Templates& t) {
  return {{"role", trim_trailing_newlines(t.get("role"))},
          {"task", trim_trailing_newlines(t.get("task"))},
          {"code_template", trim_trailing_newlines(t.get("code_template"))},
          {"output_format", trim_trailing_newlines(t.get("output_format"))}};
}

}  // namespace

HistoryEntry HistoryEntry::of(const Candidate& c) {
  return {c.name, c.description, c.fitness, c.error};
}

void PromptRequest::validate() const {
  const std::size_t expected = kind == Operator::Initialization ? 0 : kind == Operator::Mutation ? 1 : 2;
  if (parents.size() != expected)
    throw InvalidConfig(std::string(to_string(kind)) + " prompt needs " + std::to_string(expected) +
                        " parent(s), got " + std::to_string(parents.size()));
}

Templates Templates::defaults() {
  Templates t;
  t.texts_ = {{"role", std::string(assets::role)},
              {"task", std::string(assets::task)},
              {"code_template", std::string(assets::code_template)},
              {"output_format", std::string(assets::output_format)},
              {"initialization", std::string(assets::initialization)},
              {"mutation", std::string(assets::mutation)},
              {"crossover", std::string(assets::crossover)}};
  return t;
}

Templates Templates::from_directory(const std::filesystem::path& dir) {
  Templates t = defaults();
  for (const char* key : kKeys) {
    const auto file = dir / (std::string(key) + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream is(file);
    std::stringstream ss;
    ss << is.rdbuf();
    t.set(key, ss.str());
  }
  return t;
}

const std::string& Templates::get(const std::string& key) const {
  const auto it = texts_.find(key);
  if (it == texts_.end()) throw InvalidConfig("no prompt template named '" + key + "'");
  return it->second;
}

void Templates::set(const std::string& key, std::string text) { texts_[key] = std::move(text); }

std::string fill(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = values.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

std::string render_initialization(const std::vector<HistoryEntry>& history, const Templates& t,
                                  const RenderOptions& options) {
  auto values = common_values(t);
  values["n"] = std::to_string(history.size());

  // Keep the most recent entries that fit in the budget.
  const std::size_t char_budget = options.history_token_budget * 4;
  std::vector<std::string> lines;
  std::size_t used = 0;
  std::size_t kept = 0;
  for (std::size_t i = history.size(); i-- > 0;) {
    std::string entry = render_history_entry(i + 1, history[i]);
    if (kept > 0 && used + entry.size() > char_budget) break;
    used += entry.size();
    lines.push_back(std::move(entry));
    ++kept;
  }
  std::string list;
  if (!history.empty()) {
    list = "The previously designed algorithms are:\n";
    if (kept < history.size())
      list += "(" + std::to_string(history.size() - kept) + " earlier algorithms omitted)\n";
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) list += *it;
    list = trim_trailing_newlines(list);
  }
  values["algorithm_list"] = list;
  return tidy(fill(t.get("initialization"), values));
}

std::string render_mutation(const Candidate& parent, const Templates& t) {
  if (!parent.fitness) throw MissingFitness("parent '" + parent.name + "' has no fitness");
  auto values = common_values(t);
  values["parent"] = render_parent(parent);
  return tidy(fill(t.get("mutation"), values));
}

std::string render_crossover(const Candidate& first, const Candidate& second, const Templates& t) {
  if (first.id == second.id && first.code == second.code)
    throw DuplicateParent("crossover needs two distinct parents, got '" + first.name + "' twice");
  if (!first.fitness) throw MissingFitness("parent '" + first.name + "' has no fitness");
  if (!second.fitness) throw MissingFitness("parent '" + second.name + "' has no fitness");
  auto values = common_values(t);
  values["parent_1"] = render_parent(first);
  values["parent_2"] = render_parent(second);
  return tidy(fill(t.get("crossover"), values));
}

std::string render(const PromptRequest& request, const Templates& t, const RenderOptions& options) {
  request.validate();
  switch (request.kind) {
    case Operator::Initialization: return render_initialization(request.history, t, options);
    case Operator::Mutation: return render_mutation(request.parents[0], t);
    case Operator::Crossover: return render_crossover(request.parents[0], request.parents[1], t);
  }
  return {};
}

std::variant<Candidate, ParseFailure> parse_response(std::string_view text) {
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    const auto body_start = text.find('\n', open + 3);
    if (body_start == std::string_view::npos) break;
    const auto close = text.find("```", body_start + 1);
    if (close == std::string_view::npos) break;
    blocks.emplace_back(text.substr(body_start + 1, close - body_start - 1));
    pos = close + 3;
  }
  if (blocks.empty()) return ParseFailure{"no code block"};

  Candidate c;
  c.code = blocks.front();
  if (blocks.size() > 1)
    c.warnings.push_back("response contained " + std::to_string(blocks.size()) +
                         " code blocks; the first one was used");

  static const std::regex class_re(R"((?:^|\n)[ \t]*class[ \t]+([A-Za-z_][A-Za-z0-9_]*))");
  std::smatch m;
  if (!std::regex_search(c.code, m, class_re)) return ParseFailure{"no class declaration in code block"};
  c.name = m[1].str();

  static const std::regex desc_re(R"(#\s*Description\s*:\s*([^\n]*))");
  const std::string full(text);
  if (std::regex_search(full, m, desc_re)) {
    c.description = m[1].str();
    while (!c.description.empty() && std::isspace(static_cast<unsigned char>(c.description.back())))
      c.description.pop_back();
  }
  c.loc = count_loc(c.code);
  return c;
}

}  // namespace evobo::prompts
