#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dafd/engine.hpp"

namespace dafd {

struct InterpolationRow {
  DiscParameter a;
  double value_error = 0.0;       // |f(a_k) - S_n(a_k)|
  double derivative_error = 0.0;  // |f'(a_k) - S_n'(a_k)|
  /// The mode forces a double zero of f - S_n at a_k.
  bool derivative_expected = false;
};

struct InterpolationReport {
  std::vector<InterpolationRow> rows;
  double max_value_error = 0.0;
  /// Max over the rows where derivative_expected holds.
  double max_derivative_error = 0.0;
};

/// Compares f and S_n at a_1..a_n. Double and higher-order decompositions
/// interpolate values and first derivatives, Core values only; the first
/// term of a mono-component run is a single zero at the origin.
[[nodiscard]] InterpolationReport verify_interpolation(const BoundarySignal& f,
                                                       const Decomposition& d, std::size_t n);

struct EnergyIdentity {
  double defect = 0.0;     // |‖f‖² - Σ|c_k|² - ‖f - S_n‖²| / ‖f‖²
  double tolerance = 0.0;  // 1e-8 plus the accumulated relative leakage
  [[nodiscard]] bool ok() const { return defect <= tolerance; }
};

/// Uses every term of d. ‖f - S_n‖² is measured directly from the rebuilt
/// partial sum, independent of the stored coefficients' energies.
[[nodiscard]] EnergyIdentity energy_identity_check(const BoundarySignal& f, const Decomposition& d);

struct ResidualRow {
  std::size_t n = 0;
  double residual_energy = 0.0;  // ‖f - S_n‖²
  double relative_error = 0.0;   // ‖f - S_n‖ / ‖f‖
  std::optional<double> bound;   // M / sqrt(n)
  bool within_bound = true;
};

struct ResidualTrace {
  std::vector<ResidualRow> rows;
  [[nodiscard]] bool all_within_bound() const;
};

/// Residual after each term, checked against M / sqrt(n) when M is given.
[[nodiscard]] ResidualTrace rate_bound_check(const BoundarySignal& f, const Decomposition& d,
                                             std::optional<double> m = std::nullopt);

/// M = Σ|c_k| / sqrt(1 - |a_k|²) for f = Σ c_k k_{a_k} with unnormalized
/// Szego kernels, i.e. the l1 norm of the coefficients over e_{a_k}.
[[nodiscard]] double hardy_class_bound(std::span<const DiscParameter> a, std::span<const cplx> c);

/// Sign changes around the circle of R_n = f - (2 Re S_n - c0) on a fine
/// grid, with c0 the mean of f. f is resampled spectrally when its length
/// differs from fine_n. Samples with |R_n| < 1e-12 ‖f‖ are skipped.
[[nodiscard]] std::size_t zero_crossing_count(std::span<const double> f_real,
                                              const Decomposition& d, std::size_t n,
                                              std::size_t fine_n = 8192);

/// Trigonometric interpolation of a real periodic sequence onto m points.
[[nodiscard]] std::vector<double> resample_real(std::span<const double> samples, std::size_t m);

struct DecayRow {
  std::size_t n = 0;
  std::string mode;
  double relative_error = 0.0;
};

/// Rows n = 1..n_max of one decomposition, repeating the last value past
/// its final term.
[[nodiscard]] std::vector<DecayRow> decay_rows(const Decomposition& d, std::size_t n_max);

/// Runs every mode to n_max terms on f and tabulates ‖f - S_n‖ / ‖f‖ from the
/// engine's running residuals. A run that finishes early repeats its last
/// value so every mode has n_max rows.
[[nodiscard]] std::vector<DecayRow> error_decay_table(const BoundarySignal& f,
                                                      std::span<const std::pair<Mode, int>> modes,
                                                      std::size_t n_max,
                                                      const EngineConfig& config);

}  // namespace dafd
