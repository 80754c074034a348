#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dafd {

using cplx = std::complex<double>;

inline constexpr double kDefaultRMax = 0.995;
inline constexpr std::size_t kMinSamples = 64;

// Error hierarchy. Every failure the library reports derives from Error so
// callers (the CLI in particular) can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or evaluation point lies outside the admissible disc.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two signals sampled on different grids, or a grid that is too small.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A point of the open unit disc, bounded away from the circle by r_max.
class DiscParameter {
 public:
  DiscParameter() = default;

  explicit DiscParameter(cplx value, double r_max = kDefaultRMax) : value_(value) {
    if (!(r_max > 0.0 && r_max < 1.0)) {
      throw DomainError("r_max must lie in (0, 1), got " + std::to_string(r_max));
    }
    if (!(std::abs(value) <= r_max)) {
      throw DomainError("disc parameter |a| = " + std::to_string(std::abs(value)) +
                        " exceeds r_max = " + std::to_string(r_max));
    }
  }

  DiscParameter(double re, double im, double r_max = kDefaultRMax)
      : DiscParameter(cplx(re, im), r_max) {}

  [[nodiscard]] cplx value() const noexcept { return value_; }
  [[nodiscard]] double modulus() const noexcept { return std::abs(value_); }
  /// 1 - |a|^2
  [[nodiscard]] double defect() const noexcept { return 1.0 - std::norm(value_); }

  friend bool operator==(const DiscParameter&, const DiscParameter&) = default;

 private:
  cplx value_{0.0, 0.0};
};

}  // namespace dafd
