#pragma once

#include <stdexcept>
#include <string>

namespace percolab {

// Invalid experiment or window parameters. The message names the offending
// field (or JSON path when the error comes from a config file).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A mathematical precondition was violated (empty set, p outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The request is well formed but we decline to compute it: enumeration
// guards and unfittable regression data.
class Refusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace percolab
