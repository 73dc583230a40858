#pragma once

#include <stdexcept>
#include <string>

namespace scrambler {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map families of failures onto exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

// Structurally invalid model description (menu, config).
class ValidationError : public Error {
  public:
    using Error::Error;
};

// A numerical procedure could not reach its tolerance.
class NumericalError : public Error {
  public:
    using Error::Error;
};

class IntegrationError : public NumericalError {
  public:
    IntegrationError(const std::string& what, double t_reached)
        : NumericalError(what), t_reached_(t_reached) {}
    double t_reached() const { return t_reached_; }

  private:
    double t_reached_;
};

class UnsupportedModelError : public Error {
  public:
    using Error::Error;
};

// Caller misuse: mismatched grids, unknown identifiers.
class UsageError : public Error {
  public:
    using Error::Error;
};

}  // namespace scrambler
