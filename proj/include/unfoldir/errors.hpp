#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unfoldir {

// Invalid parameter value or malformed configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible image or plane dimensions.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// File IO failure. byte_offset() locates where parsing failed when known.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg, std::size_t byte_offset = 0)
      : std::runtime_error(msg), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// NaN/Inf encountered or iterative solver breakdown.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace unfoldir
