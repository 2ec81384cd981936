#ifndef MRL_ERRORS_HPP
#define MRL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mrl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its admissible range.
struct RangeError : Error {
  using Error::Error;
};

/// The well-posedness bound gamma^2 < Rc/h_max^2 (1-N^2) fails.
struct ExistenceError : Error {
  ExistenceError(const std::string& msg, double gamma2, double bound)
      : Error(msg), gamma2(gamma2), bound(bound) {}
  double gamma2;
  double bound;
};

/// alpha is within the unit-branch threshold; the alpha=1 formulas apply.
struct BranchError : Error {
  using Error::Error;
};

/// The closed-form denominator is numerically zero (outside the proven regime).
struct DegenerateDenominatorError : Error {
  using Error::Error;
};

/// An evaluation coordinate lies outside its domain.
struct DomainError : Error {
  using Error::Error;
};

/// A direct factorization failed.
struct SingularSystemError : Error {
  using Error::Error;
};

/// theta1 <= 0 at an evaluation point; the local/Reynolds problems degenerate.
struct EllipticityError : Error {
  using Error::Error;
};

/// An iterative or direct solve did not reach its tolerance.
struct SolverError : Error {
  using Error::Error;
};

/// The symmetric part of K1 has a non-positive eigenvalue.
struct IndefinitenessError : Error {
  using Error::Error;
};

/// Config document is not well-formed JSON.
struct ParseError : Error {
  ParseError(const std::string& msg, int line, int column)
      : Error(msg), line(line), column(column) {}
  int line;
  int column;
};

/// Config document is well-formed but violates the schema.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace mrl

#endif
