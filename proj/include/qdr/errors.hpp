#pragma once

#include <stdexcept>
#include <string>

namespace qdr {

// Error taxonomy shared across the library.  Every throwing operation uses
// one of these types so callers (and the CLI) can map failures to exit codes.

struct invalid_argument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Channel fails the complete-positivity test.
struct invalid_channel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Covariance sits on (or numerically too close to) the pure-state boundary
// while a covariance derivative is present.  We refuse instead of
// regularizing silently.
struct pure_state_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite-difference ladder failed to converge.
struct oracle_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling grid too small / boundary mass too large for the SVD oracle.
struct invalid_grid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Output path not writable or write failure.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matched-pair construction with a single active Schmidt mode exactly at the
// separability point.
struct degenerate_duration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qdr
