#pragma once

#include <stdexcept>
#include <string>

namespace hbmes {

// Bad user-supplied input: config values, trace files, function arguments.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration (grid sizes, missing keys, unknown policy names, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal invariant broken: corrupted state handed to a device step, or a
// dispatch result that leaves storage outside its bounds.
struct StateError : std::logic_error {
  explicit StateError(const std::string& msg) : std::logic_error(msg) {}
};

// Tensor/vector dimension mismatch.
struct ShapeError : std::logic_error {
  explicit ShapeError(const std::string& msg) : std::logic_error(msg) {}
};

// Non-finite loss or gradient during training.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hbmes
