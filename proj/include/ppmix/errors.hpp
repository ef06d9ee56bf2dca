#pragma once

#include <stdexcept>
#include <string>

namespace ppmix {

/// Caller broke a documented precondition (dimension mismatch, bad argument).
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A model is numerically unusable (non positive-definite covariance).
class DegenerateModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A fit collapsed: some component covariance fell below the eigenvalue floor.
class DegenerateFitError : public std::runtime_error {
  public:
    DegenerateFitError(const std::string& msg, int component)
        : std::runtime_error(msg), component_(component) {}

    int component() const { return component_; }

  private:
    int component_;
};

/// Every cell of a model-selection grid failed.
class NoModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An internal algorithm guarantee was violated at runtime; indicates
/// numerical breakdown rather than bad input.
class AlgorithmFault : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries the location.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace ppmix
