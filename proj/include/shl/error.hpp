#pragma once

#include <stdexcept>
#include <string>

namespace shl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative method did not converge. Carries the last bracket.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lo, double hi)
      : Error(what + " (last bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// A boundary perturbation does not describe a star-shaped domain.
class InvalidDomain : public Error {
 public:
  using Error::Error;
};

/// An identity that must hold by theory was violated numerically.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Collocation least-squares residual too large to trust.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue search found no singular-value minimum inside the bracket.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

/// Reconstructed eigenfunction changes sign, so it is not the first mode.
class SpuriousMode : public Error {
 public:
  using Error::Error;
};

/// Finite truncation cannot certify the behaviour of the modes beyond K.
class InconclusiveTail : public Error {
 public:
  using Error::Error;
};

/// A per-mode critical value is undefined because c_k(t) does not depend on t.
class DegenerateCoefficient : public Error {
 public:
  using Error::Error;
};

}  // namespace shl
