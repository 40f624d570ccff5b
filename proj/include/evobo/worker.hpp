#pragma once

#include <functional>
#include <iosfwd>

#include "evobo/session.hpp"

namespace evobo::worker {

/// Worker side of the wire protocol: reads init, runs `algorithm` against an
/// objective whose every call is one ask/tell exchange, then sends done (or
/// error). Returns the process exit code: 0 only after done was sent.
int serve(std::istream& in, std::ostream& out, const std::function<void(Objective&)>& algorithm);

}  // namespace evobo::worker
