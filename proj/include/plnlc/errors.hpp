#ifndef PLNLC_ERRORS_HPP
#define PLNLC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace plnlc {

/// Bad or missing configuration (exit code 2).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Invalid or unreadable data (exit code 3).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Numerical failure mid-computation (exit code 4).
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace plnlc

#endif // PLNLC_ERRORS_HPP
