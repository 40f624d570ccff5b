// Scriptable wire-protocol worker for harness tests.
//   fixture_worker <mode> [log-file]
// Modes: greedy, overask, crash, malformed, sleep, exit, error, wrongdim, early.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "evobo/protocol.hpp"

namespace proto = evobo::protocol;

namespace {

void send(const proto::Message& m) { std::cout << proto::encode_message(m) << '\n' << std::flush; }

std::string receive() {
  std::string line;
  if (!std::getline(std::cin, line)) std::exit(4);
  return line;
}

std::vector<double> point(const proto::Init& init, int i, int dim) {
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k)
    x[static_cast<std::size_t>(k)] = init.lower_bound + (init.upper_bound - init.lower_bound) *
                                                            (0.5 + 0.4 * ((i * 7 + k * 3) % 11 - 5) / 5.0);
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "greedy";
  const std::string log_file = argc > 2 ? argv[2] : "";

  if (mode == "exit") return 0;
  const auto first = proto::decode_message(receive());
  const auto init = std::get<proto::Init>(first);

  if (mode == "malformed") {
    std::cout << "{\"ask\": [1, 2" << std::endl;
    receive();
    return 0;
  }
  if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::hours(1));
    return 0;
  }
  if (mode == "error") {
    send(proto::ErrorMessage{"boom"});
    return 1;
  }
  if (mode == "wrongdim") {
    send(proto::Ask{point(init, 0, init.dim + 1)});
    receive();
    return 0;
  }

  int asks = init.budget;
  if (mode == "overask") asks = init.budget + 1;
  if (mode == "crash") asks = std::min(3, init.budget);
  if (mode == "early") asks = std::min(2, init.budget);

  std::ofstream log;
  if (!log_file.empty()) log.open(log_file);
  for (int i = 0; i < asks; ++i) {
    send(proto::Ask{point(init, i, init.dim)});
    const std::string reply = receive();
    if (log.is_open()) log << reply << '\n' << std::flush;
  }
  if (mode == "crash") std::abort();
  if (mode == "overask") return 0;  // the last reply was the budget error
  send(proto::Done{});
  return 0;
}
