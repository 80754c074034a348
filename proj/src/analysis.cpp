#include "dafd/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "dafd/fft.hpp"

namespace dafd {

InterpolationReport verify_interpolation(const BoundarySignal& f, const Decomposition& d,
                                         std::size_t n) {
  if (n > d.terms.size()) throw ContractError("interpolation check beyond the computed terms");
  const BoundarySignal s = partial_sum(d, n, f.size());
  InterpolationReport report;
  for (std::size_t k = 0; k < n; ++k) {
    const DiscParameter a = d.terms[k].a;
    InterpolationRow row;
    row.a = a;
    row.value_error = std::abs(eval_disc(f, a) - eval_disc(s, a));
    row.derivative_error = std::abs(eval_deriv_disc(f, a, 1) - eval_deriv_disc(s, a, 1));
    row.derivative_expected = d.mode != Mode::Core && !(d.mode == Mode::MonoComponent && k == 0);
    report.max_value_error = std::max(report.max_value_error, row.value_error);
    if (row.derivative_expected) {
      report.max_derivative_error = std::max(report.max_derivative_error, row.derivative_error);
    }
    report.rows.push_back(row);
  }
  return report;
}

EnergyIdentity energy_identity_check(const BoundarySignal& f, const Decomposition& d) {
  const double total = f.norm2();
  EnergyIdentity out;
  out.tolerance = 1e-8;
  if (total == 0.0) return out;
  double captured = 0.0;
  double leakage = 0.0;
  for (const auto& term : d.terms) {
    captured += std::norm(term.c);
    leakage += term.leakage;
  }
  const BoundarySignal s = partial_sum(d, d.terms.size(), f.size());
  const double residual = (f - s).norm2();
  out.defect = std::abs(total - captured - residual) / total;
  out.tolerance += leakage / total;
  return out;
}

bool ResidualTrace::all_within_bound() const {
  return std::all_of(rows.begin(), rows.end(), [](const ResidualRow& r) { return r.within_bound; });
}

ResidualTrace rate_bound_check(const BoundarySignal& f, const Decomposition& d,
                               std::optional<double> m) {
  ResidualTrace trace;
  const double total = f.norm2();
  const auto basis = decomposition_basis(d, d.terms.size(), f.size());
  std::vector<cplx> rest(f.samples().begin(), f.samples().end());
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    const auto b = basis[k].samples();
    double energy = 0.0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      rest[j] -= d.terms[k].c * b[j];
      energy += std::norm(rest[j]);
    }
    energy /= static_cast<double>(rest.size());
    ResidualRow row;
    row.n = k + 1;
    row.residual_energy = energy;
    row.relative_error = total > 0.0 ? std::sqrt(energy / total) : 0.0;
    if (m) {
      row.bound = *m / std::sqrt(static_cast<double>(row.n));
      row.within_bound = std::sqrt(energy) <= *row.bound;
    }
    trace.rows.push_back(row);
  }
  return trace;
}

double hardy_class_bound(std::span<const DiscParameter> a, std::span<const cplx> c) {
  if (a.size() != c.size()) throw DimensionError("one coefficient per kernel parameter needed");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m += std::abs(c[k]) / std::sqrt(a[k].defect());
  return m;
}

std::vector<double> resample_real(std::span<const double> samples, std::size_t m) {
  const std::size_t n = samples.size();
  if (n == m) return {samples.begin(), samples.end()};
  const std::vector<cplx> x(samples.begin(), samples.end());
  const auto spectrum = fft::forward(x);
  std::vector<cplx> target(m);
  auto deposit = [&](long freq, cplx value) {
    const long half = static_cast<long>(m / 2);
    if (std::abs(freq) > half) return;
    const long mm = static_cast<long>(m);
    target[static_cast<std::size_t>(((freq % mm) + mm) % mm)] += value;
  };
  for (std::size_t b = 0; b < n; ++b) {
    const long freq = signed_frequency(b, n);
    if (n % 2 == 0 && b == n / 2) {
      deposit(freq, 0.5 * spectrum[b]);
      deposit(-freq, 0.5 * spectrum[b]);
    } else {
      deposit(freq, spectrum[b]);
    }
  }
  const auto values = fft::inverse(target);
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = values[j].real();
  return out;
}

std::size_t zero_crossing_count(std::span<const double> f_real, const Decomposition& d,
                                std::size_t n, std::size_t fine_n) {
  if (n > d.terms.size()) throw ContractError("zero-crossing count beyond the computed terms");
  const auto f = resample_real(f_real, fine_n);
  double mean = 0.0, energy = 0.0;
  for (double v : f) {
    mean += v;
    energy += v * v;
  }
  mean /= static_cast<double>(fine_n);
  const double floor = 1e-12 * std::sqrt(energy / static_cast<double>(fine_n));

  const BoundarySignal s = partial_sum(d, n, fine_n);
  const auto sv = s.samples();
  std::vector<int> signs;
  signs.reserve(fine_n);
  for (std::size_t j = 0; j < fine_n; ++j) {
    const double r = f[j] - (2.0 * sv[j].real() - mean);
    if (std::abs(r) < floor) continue;
    signs.push_back(r > 0.0 ? 1 : -1);
  }
  if (signs.size() < 2) return 0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < signs.size(); ++j) {
    if (signs[j] != signs[(j + 1) % signs.size()]) ++count;
  }
  return count;
}

std::vector<DecayRow> decay_rows(const Decomposition& d, std::size_t n_max) {
  const std::string name = mode_name(d.mode, d.ho_order);
  const double total = d.source_norm2;
  std::vector<DecayRow> rows;
  double last = total > 0.0 ? 1.0 : 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n <= d.terms.size() && total > 0.0) {
      last = std::sqrt(std::max(0.0, d.terms[n - 1].residual_energy_after) / total);
    }
    rows.push_back({n, name, last});
  }
  return rows;
}

std::vector<DecayRow> error_decay_table(const BoundarySignal& f,
                                        std::span<const std::pair<Mode, int>> modes,
                                        std::size_t n_max, const EngineConfig& config) {
  EngineConfig run_config = config;
  run_config.max_terms = n_max;
  std::vector<DecayRow> rows;
  for (const auto& [mode, order] : modes) {
    const auto part = decay_rows(decompose(f, mode, order, run_config), n_max);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

}  // namespace dafd
