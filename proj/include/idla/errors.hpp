#pragma once

#include <stdexcept>
#include <string>

namespace idla {

/// A walk exceeded its step cap; usually a configuration error such as an
/// inward-biased kernel asked to reach a far layer without shortcutting.
struct StepCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A settle site would leave the occupancy bitmap and it could not be grown.
struct BoundingRadiusExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The abelian engine exceeded its move budget; suspected non-termination.
struct MoveBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line_number)
        : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    int line;
};

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace idla
