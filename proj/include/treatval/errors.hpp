#pragma once

#include <stdexcept>
#include <string>

namespace treatval {

// Bad user input: unreadable files, malformed CSV cells, unknown column
// names, out-of-domain flag values. Maps to CLI exit code 2.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that could not produce an estimate: degenerate cross-tab
// cells, single-arm training data, replicate redraw budget exhausted.
// Maps to CLI exit code 3.
class estimation_error : public std::runtime_error {
 public:
  explicit estimation_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace treatval
