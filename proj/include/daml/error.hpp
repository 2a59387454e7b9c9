#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace daml {

/// Bad argument, shape, or configuration value.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The hindsight-optimal top-K sum of an outcome vector is zero.
class DegenerateOutcomeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input outside the support of a density (e.g. negative count).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite objective or gradient encountered while training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(std::string_view)>;

// Default handler writes to stderr. Pass an empty function to silence.
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace daml
