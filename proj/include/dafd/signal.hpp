#pragma once

#include <span>
#include <vector>

#include "dafd/types.hpp"

namespace dafd {

/// Maps DFT bin m in [0, N) to its signed frequency. Bins up to and
/// including N/2 count as nonnegative; the Nyquist bin of an even grid is
/// treated as part of the analytic band.
[[nodiscard]] constexpr long signed_frequency(std::size_t bin, std::size_t n) noexcept {
  return bin <= n / 2 ? static_cast<long>(bin) : static_cast<long>(bin) - static_cast<long>(n);
}

/// Number of nonnegative-frequency bins on an N-point grid.
[[nodiscard]] constexpr std::size_t analytic_band(std::size_t n) noexcept { return n / 2 + 1; }

/// Uniform samples of a function on the unit circle at t_j = 2 pi j / N
/// together with its DFT spectrum. Immutable; the spectrum and the Horner
/// truncation point are fixed at construction.
class BoundarySignal {
 public:
  /// Samples of an arbitrary boundary function. The analytic flag is set when
  /// the negative-frequency energy is below 1e-12 of the total.
  static BoundarySignal from_samples(std::vector<cplx> samples);

  /// Samples of a function known in closed form to extend analytically into
  /// the disc (kernels, Blaschke products, partial sums). The flag is set
  /// without inspecting the spectrum, which may carry wrap-around aliasing
  /// of the analytic tail.
  static BoundarySignal analytic_from_samples(std::vector<cplx> samples);

  static BoundarySignal from_spectrum(std::vector<cplx> spectrum);

  static BoundarySignal zero(std::size_t n);
  static BoundarySignal constant(cplx value, std::size_t n);
  /// Boundary values of z^power; negative powers give conj(z)^|power|.
  static BoundarySignal monomial(int power, std::size_t n, cplx scale = 1.0);

  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] std::span<const cplx> samples() const noexcept { return samples_; }
  [[nodiscard]] std::span<const cplx> spectrum() const noexcept { return spectrum_; }
  [[nodiscard]] bool is_analytic() const noexcept { return analytic_; }

  /// Squared L2 norm by the rectangle rule, (1/N) sum |f_j|^2.
  [[nodiscard]] double norm2() const noexcept { return norm2_; }
  [[nodiscard]] double norm() const;

  /// One past the last nonnegative bin with |c_m| > 1e-16 ||f||.
  [[nodiscard]] std::size_t horner_end() const noexcept { return horner_end_; }

  /// Projection onto the nonnegative-frequency band.
  [[nodiscard]] BoundarySignal analytic_part() const;

  [[nodiscard]] BoundarySignal scaled(cplx factor) const;

  friend BoundarySignal operator+(const BoundarySignal& lhs, const BoundarySignal& rhs);
  friend BoundarySignal operator-(const BoundarySignal& lhs, const BoundarySignal& rhs);

 private:
  BoundarySignal(std::vector<cplx> samples, std::vector<cplx> spectrum, bool analytic);

  std::vector<cplx> samples_;
  std::vector<cplx> spectrum_;
  bool analytic_ = false;
  double norm2_ = 0.0;
  std::size_t horner_end_ = 0;
};

/// (1/N) sum_j f_j conj(g_j).
[[nodiscard]] cplx inner_product(const BoundarySignal& f, const BoundarySignal& g);

/// Sum of |c_m|^2 over the negative-frequency bins.
[[nodiscard]] double anti_analytic_energy(const BoundarySignal& f);

/// Fraction of the total energy held by the top 5% of the analytic band.
/// Used as an aliasing indicator after nonlinear boundary operations.
[[nodiscard]] double high_band_fraction(const BoundarySignal& f);

/// f(a) = sum_{m>=0} c_m a^m by Horner's scheme on the cached spectrum.
[[nodiscard]] cplx eval_disc(const BoundarySignal& f, DiscParameter a);

/// k-th complex derivative f^{(k)}(a); order 0 is eval_disc.
[[nodiscard]] cplx eval_deriv_disc(const BoundarySignal& f, DiscParameter a, int order);

struct RealProjection {
  BoundarySignal analytic;  // f+ with c_0 kept whole
  double c0 = 0.0;          // mean of the real signal
};

/// Splits a real signal as f = 2 Re f+ - c0. For even N the Nyquist
/// coefficient is halved so the identity is exact on any real input.
[[nodiscard]] RealProjection project_real(std::span<const double> samples);

[[nodiscard]] std::vector<double> reconstruct_real(const BoundarySignal& fplus, double c0);

/// Uniform grid point t_j = 2 pi j / N.
[[nodiscard]] double grid_angle(std::size_t j, std::size_t n) noexcept;

}  // namespace dafd
