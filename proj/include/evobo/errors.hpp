#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evobo {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EVOBO_DEFINE_ERROR(Name)         \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// problem suite
EVOBO_DEFINE_ERROR(UnknownFunction);
EVOBO_DEFINE_ERROR(InvalidDim);
EVOBO_DEFINE_ERROR(DimensionMismatch);

// metrics
EVOBO_DEFINE_ERROR(EmptyTrace);
EVOBO_DEFINE_ERROR(NoCells);
EVOBO_DEFINE_ERROR(DegenerateRange);
EVOBO_DEFINE_ERROR(InvalidTrace);
EVOBO_DEFINE_ERROR(InvalidConfig);

// surrogate model / optimizers
EVOBO_DEFINE_ERROR(SingularKernel);
EVOBO_DEFINE_ERROR(LengthMismatch);
EVOBO_DEFINE_ERROR(BudgetExhausted);

// prompts
EVOBO_DEFINE_ERROR(MissingFitness);
EVOBO_DEFINE_ERROR(DuplicateParent);

// llm client
EVOBO_DEFINE_ERROR(LLMUnavailable);
EVOBO_DEFINE_ERROR(EmptyBatch);

// cli / persistence
EVOBO_DEFINE_ERROR(UnknownParameter);
EVOBO_DEFINE_ERROR(NoData);
EVOBO_DEFINE_ERROR(CorruptSnapshot);

#undef EVOBO_DEFINE_ERROR

/// Wire-protocol decode failure. `offset` is the byte position in the line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace evobo
