#pragma once

#include <stdexcept>
#include <string>

namespace kneecast {

/// Broad failure class; maps one-to-one onto CLI exit codes.
enum class ErrorKind { config = 1, data = 2, numeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string category, const std::string& message)
      : std::runtime_error(message), kind_(kind), category_(std::move(category)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable tag, e.g. "schema", "shape", "graft".
  const std::string& category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
  std::string category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string category = "config")
      : Error(ErrorKind::config, std::move(category), message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message, std::string category = "data")
      : Error(ErrorKind::data, std::move(category), message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message, std::string category = "numeric")
      : Error(ErrorKind::numeric, std::move(category), message) {}
};

}  // namespace kneecast
