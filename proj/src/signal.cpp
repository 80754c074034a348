#include "dafd/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dafd/fft.hpp"

namespace dafd {
namespace {

constexpr double kAnalyticTolerance = 1e-12;
constexpr double kHornerCutoff = 1e-16;

void require_size(std::size_t n) {
  if (n < kMinSamples) {
    throw DimensionError("boundary signals need at least " + std::to_string(kMinSamples) +
                         " samples, got " + std::to_string(n));
  }
}

double energy(std::span<const cplx> values) {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return sum;
}

double negative_band_energy(std::span<const cplx> spectrum) {
  double sum = 0.0;
  for (std::size_t m = analytic_band(spectrum.size()); m < spectrum.size(); ++m) {
    sum += std::norm(spectrum[m]);
  }
  return sum;
}

void require_analytic(const BoundarySignal& f) {
  if (!f.is_analytic()) {
    throw ContractError("disc evaluation requires an analytic signal");
  }
}

}  // namespace

BoundarySignal::BoundarySignal(std::vector<cplx> samples, std::vector<cplx> spectrum,
                               bool analytic)
    : samples_(std::move(samples)), spectrum_(std::move(spectrum)), analytic_(analytic) {
  norm2_ = energy(samples_) / static_cast<double>(samples_.size());
  const double cutoff = kHornerCutoff * std::sqrt(norm2_);
  const std::size_t band = analytic_band(spectrum_.size());
  for (std::size_t m = band; m > 0; --m) {
    if (std::abs(spectrum_[m - 1]) > cutoff) {
      horner_end_ = m;
      break;
    }
  }
}

BoundarySignal BoundarySignal::from_samples(std::vector<cplx> samples) {
  require_size(samples.size());
  auto spectrum = fft::forward(samples);
  const double total = energy(spectrum);
  const bool analytic = negative_band_energy(spectrum) <= kAnalyticTolerance * total;
  return {std::move(samples), std::move(spectrum), analytic};
}

BoundarySignal BoundarySignal::analytic_from_samples(std::vector<cplx> samples) {
  require_size(samples.size());
  auto spectrum = fft::forward(samples);
  return {std::move(samples), std::move(spectrum), true};
}

BoundarySignal BoundarySignal::from_spectrum(std::vector<cplx> spectrum) {
  require_size(spectrum.size());
  auto samples = fft::inverse(spectrum);
  const double total = energy(spectrum);
  const bool analytic = negative_band_energy(spectrum) <= kAnalyticTolerance * total;
  return {std::move(samples), std::move(spectrum), analytic};
}

BoundarySignal BoundarySignal::zero(std::size_t n) {
  require_size(n);
  return {std::vector<cplx>(n), std::vector<cplx>(n), true};
}

BoundarySignal BoundarySignal::constant(cplx value, std::size_t n) {
  require_size(n);
  std::vector<cplx> spectrum(n);
  spectrum[0] = value;
  return {std::vector<cplx>(n, value), std::move(spectrum), true};
}

BoundarySignal BoundarySignal::monomial(int power, std::size_t n, cplx scale) {
  require_size(n);
  std::vector<cplx> samples(n);
  for (std::size_t j = 0; j < n; ++j) {
    samples[j] = scale * std::polar(1.0, static_cast<double>(power) * grid_angle(j, n));
  }
  return from_samples(std::move(samples));
}

double BoundarySignal::norm() const { return std::sqrt(norm2_); }

BoundarySignal BoundarySignal::analytic_part() const {
  std::vector<cplx> spectrum = spectrum_;
  for (std::size_t m = analytic_band(spectrum.size()); m < spectrum.size(); ++m) spectrum[m] = 0.0;
  auto samples = fft::inverse(spectrum);
  return {std::move(samples), std::move(spectrum), true};
}

BoundarySignal BoundarySignal::scaled(cplx factor) const {
  std::vector<cplx> samples = samples_;
  std::vector<cplx> spectrum = spectrum_;
  for (auto& v : samples) v *= factor;
  for (auto& v : spectrum) v *= factor;
  return {std::move(samples), std::move(spectrum), analytic_};
}

BoundarySignal operator+(const BoundarySignal& lhs, const BoundarySignal& rhs) {
  if (lhs.size() != rhs.size()) throw DimensionError("signal sizes differ");
  std::vector<cplx> samples(lhs.size());
  std::vector<cplx> spectrum(lhs.size());
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    samples[j] = lhs.samples_[j] + rhs.samples_[j];
    spectrum[j] = lhs.spectrum_[j] + rhs.spectrum_[j];
  }
  return {std::move(samples), std::move(spectrum), lhs.analytic_ && rhs.analytic_};
}

BoundarySignal operator-(const BoundarySignal& lhs, const BoundarySignal& rhs) {
  return lhs + rhs.scaled(-1.0);
}

cplx inner_product(const BoundarySignal& f, const BoundarySignal& g) {
  if (f.size() != g.size()) {
    throw DimensionError("inner product of signals with " + std::to_string(f.size()) + " and " +
                         std::to_string(g.size()) + " samples");
  }
  const auto fs = f.samples();
  const auto gs = g.samples();
  cplx sum = 0.0;
  for (std::size_t j = 0; j < fs.size(); ++j) sum += fs[j] * std::conj(gs[j]);
  return sum / static_cast<double>(fs.size());
}

double anti_analytic_energy(const BoundarySignal& f) { return negative_band_energy(f.spectrum()); }

double high_band_fraction(const BoundarySignal& f) {
  const auto spectrum = f.spectrum();
  const std::size_t band = analytic_band(spectrum.size());
  const auto first = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(band)));
  double high = 0.0;
  for (std::size_t m = first; m < band; ++m) high += std::norm(spectrum[m]);
  const double total = energy(spectrum);
  return total > 0.0 ? high / total : 0.0;
}

cplx eval_disc(const BoundarySignal& f, DiscParameter a) {
  require_analytic(f);
  const auto c = f.spectrum();
  const cplx z = a.value();
  cplx acc = 0.0;
  for (std::size_t m = f.horner_end(); m > 0; --m) acc = acc * z + c[m - 1];
  return acc;
}

cplx eval_deriv_disc(const BoundarySignal& f, DiscParameter a, int order) {
  if (order < 0) throw ContractError("derivative order must be nonnegative");
  if (order == 0) return eval_disc(f, a);
  require_analytic(f);
  const auto c = f.spectrum();
  const cplx z = a.value();
  const auto k = static_cast<std::size_t>(order);
  cplx acc = 0.0;
  for (std::size_t m = f.horner_end(); m > k; --m) {
    const std::size_t deg = m - 1;
    double falling = 1.0;
    for (std::size_t i = 0; i < k; ++i) falling *= static_cast<double>(deg - i);
    acc = acc * z + falling * c[deg];
  }
  return acc;
}

RealProjection project_real(std::span<const double> samples) {
  const std::size_t n = samples.size();
  require_size(n);
  std::vector<cplx> values(samples.begin(), samples.end());
  auto spectrum = fft::forward(values);
  const double c0 = spectrum[0].real();
  for (std::size_t m = analytic_band(n); m < n; ++m) spectrum[m] = 0.0;
  if (n % 2 == 0) spectrum[n / 2] *= 0.5;
  return {BoundarySignal::from_spectrum(std::move(spectrum)), c0};
}

std::vector<double> reconstruct_real(const BoundarySignal& fplus, double c0) {
  if (!fplus.is_analytic()) throw ContractError("reconstruct_real expects an analytic signal");
  std::vector<double> out(fplus.size());
  const auto s = fplus.samples();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = 2.0 * s[j].real() - c0;
  return out;
}

double grid_angle(std::size_t j, std::size_t n) noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
}

}  // namespace dafd
