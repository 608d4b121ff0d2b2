#pragma once

#include <stdexcept>
#include <string>

namespace pathscan {

/// Raised when an exact or enumerative operation would exceed its configured
/// budget.  Callers surface it as an explicit refusal (CLI exit code 3);
/// nothing in the library silently truncates.
class BudgetError : public std::runtime_error {
  public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an experiment configuration violates a module precondition.
/// The message always starts with the offending field's dotted name
/// ("class.k: ...") so the failure is attributable without a stack trace.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pathscan
