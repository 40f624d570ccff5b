#include "evobo/protocol.hpp"

#include <cmath>

#include <json.hpp>

#include "evobo/errors.hpp"

namespace evobo::protocol {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double finite_number(const json& j, const char* field, std::size_t offset) {
  if (!j.is_number()) throw ParseError(std::string("field '") + field + "' must be a number", offset);
  return j.get<double>();
}

}  // namespace

std::string encode_message(const Message& msg) {
  json j = std::visit(
      Overloaded{
          [](const Init& m) {
            return json{{"init",
                         {{"dim", m.dim},
                          {"budget", m.budget},
                          {"lower_bound", m.lower_bound},
                          {"upper_bound", m.upper_bound},
                          {"seed", m.seed}}}};
          },
          [](const Ask& m) { return json{{"ask", m.point}}; },
          [](const Tell& m) { return json{{"tell", m.value}}; },
          [](const Done&) { return json{{"done", json::object()}}; },
          [](const ErrorMessage& m) { return json{{"error", m.message}}; },
      },
      msg);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

Message decode_message(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  if (line.empty()) throw ParseError("empty line", 0);

  json j;
  try {
    j = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed message", e.byte == 0 ? 0 : e.byte - 1);
  }
  if (!j.is_object() || j.size() != 1) throw ParseError("message must be an object with one key", 0);

  const std::string key = j.begin().key();
  const json& body = j.begin().value();
  const std::size_t body_at = line.find(':');
  const std::size_t at = body_at == std::string_view::npos ? 0 : body_at + 1;

  if (key == "ask") {
    if (!body.is_array()) throw ParseError("'ask' must be an array of numbers", at);
    Ask ask;
    ask.point.reserve(body.size());
    for (const auto& v : body) ask.point.push_back(finite_number(v, "ask", at));
    return ask;
  }
  if (key == "tell") {
    if (body.is_null()) return Tell{std::nan("")};
    return Tell{finite_number(body, "tell", at)};
  }
  if (key == "init") {
    if (!body.is_object()) throw ParseError("'init' must be an object", at);
    try {
      Init init;
      init.dim = body.at("dim").get<int>();
      init.budget = body.at("budget").get<int>();
      init.lower_bound = body.at("lower_bound").get<double>();
      init.upper_bound = body.at("upper_bound").get<double>();
      init.seed = body.value("seed", std::int64_t{0});
      return init;
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad 'init' body: ") + e.what(), at);
    }
  }
  if (key == "done") return Done{};
  if (key == "error") {
    if (!body.is_string()) throw ParseError("'error' must be a string", at);
    return ErrorMessage{body.get<std::string>()};
  }
  throw ParseError("unknown message kind '" + key + "'", 1);
}

std::string_view message_kind(const Message& msg) noexcept {
  static constexpr std::string_view names[] = {"init", "ask", "tell", "done", "error"};
  return names[msg.index()];
}

}  // namespace evobo::protocol
