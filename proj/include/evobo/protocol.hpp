#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace evobo::protocol {

// Line-delimited ask/tell grammar. Each message is one JSON object with a
// single key, terminated by '\n':
//
//   orchestrator -> worker   {"init":{"dim":D,"budget":B,"lower_bound":L,"upper_bound":U,"seed":S}}
//   worker -> orchestrator   {"ask":[x1,...,xD]}
//   orchestrator -> worker   {"tell":y}
//   worker -> orchestrator   {"done":{}}
//   either direction         {"error":"message"}
//
// Numbers use the shortest representation that round-trips a double exactly.

struct Init {
  int dim = 0;
  int budget = 0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::int64_t seed = 0;
  friend bool operator==(const Init&, const Init&) = default;
};

struct Ask {
  std::vector<double> point;
  friend bool operator==(const Ask&, const Ask&) = default;
};

struct Tell {
  double value = 0.0;
  friend bool operator==(const Tell&, const Tell&) = default;
};

struct Done {
  friend bool operator==(const Done&, const Done&) = default;
};

struct ErrorMessage {
  std::string message;
  friend bool operator==(const ErrorMessage&, const ErrorMessage&) = default;
};

using Message = std::variant<Init, Ask, Tell, Done, ErrorMessage>;

/// One line of text, without the trailing newline.
std::string encode_message(const Message& msg);

/// Parses one complete line (a trailing '\n' or "\r\n" is tolerated).
/// Throws ParseError carrying the byte offset of the problem.
Message decode_message(std::string_view line);

std::string_view message_kind(const Message& msg) noexcept;

}  // namespace evobo::protocol
