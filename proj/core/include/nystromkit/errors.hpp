#pragma once

#include <stdexcept>
#include <string>

namespace nystromkit {

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPsd : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularK11 : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidOversampling : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidTrials : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroTail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfDomain : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TooManyNodes : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// File I/O failure with 1-based line information where available.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line(line) {}
    long line;
};

}  // namespace nystromkit
