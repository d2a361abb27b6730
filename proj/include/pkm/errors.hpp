#ifndef PKM_ERRORS_HPP
#define PKM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pkm {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operand shapes are inconsistent with each other or with the state.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A matrix required to be SPD has a nonpositive Cholesky pivot.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

/// Unregularized normal equations are rank deficient.
struct SingularSystem : Error {
  using Error::Error;
};

/// A variance argument is zero or negative.
struct NonPositiveVariance : Error {
  using Error::Error;
};

/// Every machine exponent r_i is zero; weights cannot be normalized.
struct AllZeroWeights : Error {
  using Error::Error;
};

/// A categorical weight vector does not lie on the simplex.
struct InvalidSimplex : Error {
  using Error::Error;
};

/// Code size is not divisible by the requested channel count.
struct IndivisibleCode : Error {
  using Error::Error;
};

/// Invalid configuration value (e.g. k does not divide m).
struct ConfigError : Error {
  using Error::Error;
};

/// Not enough data points for a requested fit.
struct InsufficientData : Error {
  using Error::Error;
};

}  // namespace pkm

#endif  // PKM_ERRORS_HPP
