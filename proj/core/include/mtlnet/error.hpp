#pragma once

#include <stdexcept>
#include <string>

namespace mtlnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: asymmetric matrices, bad grids, inconsistent topologies.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside its admissible range (e.g. fault offset past the branch end).
class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure tied to a frequency point: singular factors, defective
/// eigenproblems, resonances of lossless lines.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double frequency)
      : Error(what + " at f = " + std::to_string(frequency) + " Hz"), frequency_(frequency) {}
  explicit NumericalError(const std::string& what) : Error(what), frequency_(-1.0) {}

  /// Frequency in Hz where the failure happened, negative when not applicable.
  double frequency() const noexcept { return frequency_; }

 private:
  double frequency_;
};

class DecompositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mtlnet
