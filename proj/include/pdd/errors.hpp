#pragma once

#include <stdexcept>
#include <string>

namespace pdd {

// Error categories map one-to-one onto CLI exit codes:
// IoError -> 1, ValidationError -> 2, NumericError -> 3.

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pdd
