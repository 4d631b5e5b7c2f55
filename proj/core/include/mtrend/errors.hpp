#pragma once

#include <stdexcept>
#include <string>

namespace mtrend {

// Input validation failures (bad parameters, malformed data) are reported
// with std::invalid_argument or std::out_of_range. The two types below cover
// the remaining failure classes the command-line front end distinguishes.

/// File system or stream failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A computed result broke one of its documented invariants.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace mtrend
