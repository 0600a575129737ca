#pragma once

#include <stdexcept>
#include <string>

namespace fulldim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed objects or violated preconditions (bad matrices, wrong sizes).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that falls outside the hypotheses of an operation,
/// e.g. a non-mixing shift or a level outside the Birkhoff range.
class DomainRejection : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace fulldim
