#include "evobo/worker.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "evobo/errors.hpp"
#include "evobo/protocol.hpp"

namespace evobo::worker {

namespace proto = evobo::protocol;

namespace {

class WireObjective final : public Objective {
 public:
  WireObjective(const proto::Init& init, std::istream& in, std::ostream& out)
      : init_(init), in_(in), out_(out) {}

  int dim() const override { return init_.dim; }
  int budget() const override { return init_.budget; }
  double lower() const override { return init_.lower_bound; }
  double upper() const override { return init_.upper_bound; }
  std::int64_t seed() const override { return init_.seed; }
  int evaluations() const override { return evaluations_; }

  double operator()(std::span<const double> x) override {
    if (evaluations_ >= init_.budget) throw BudgetExhausted("budget exhausted");
    out_ << proto::encode_message(proto::Ask{{x.begin(), x.end()}}) << '\n' << std::flush;
    std::string line;
    if (!std::getline(in_, line)) throw Error("orchestrator closed the channel");
    auto msg = proto::decode_message(line);
    if (auto* tell = std::get_if<proto::Tell>(&msg)) {
      ++evaluations_;
      return tell->value;
    }
    if (auto* err = std::get_if<proto::ErrorMessage>(&msg)) {
      if (err->message == "budget exhausted") throw BudgetExhausted(err->message);
      throw Error("orchestrator error: " + err->message);
    }
    throw Error("unexpected message from orchestrator");
  }

 private:
  proto::Init init_;
  std::istream& in_;
  std::ostream& out_;
  int evaluations_ = 0;
};

}  // namespace

int serve(std::istream& in, std::ostream& out, const std::function<void(Objective&)>& algorithm) {
  std::string line;
  if (!std::getline(in, line)) return 1;
  proto::Init init;
  try {
    auto msg = proto::decode_message(line);
    auto* p = std::get_if<proto::Init>(&msg);
    if (!p) throw Error("expected init message");
    init = *p;
  } catch (const std::exception& e) {
    out << proto::encode_message(proto::ErrorMessage{e.what()}) << '\n' << std::flush;
    return 1;
  }

  WireObjective objective(init, in, out);
  try {
    algorithm(objective);
  } catch (const BudgetExhausted&) {
    // Running out of budget is a normal way to finish.
  } catch (const std::exception& e) {
    out << proto::encode_message(proto::ErrorMessage{e.what()}) << '\n' << std::flush;
    return 1;
  }
  out << proto::encode_message(proto::Done{}) << '\n' << std::flush;
  return 0;
}

}  // namespace evobo::worker
