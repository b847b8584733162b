#pragma once

#include <stdexcept>
#include <string>

namespace qwoa {

// Raised when an iterative numerical procedure fails to reach its target
// accuracy (e.g. polynomial expansion of the walk operator hits the degree
// ceiling). The CLI maps this to exit code 3.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on file read/write failures. The CLI maps this to exit code 4.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qwoa
