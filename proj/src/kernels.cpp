#include "dafd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace dafd {
namespace {

void validate(const BasisSpec& spec) {
  if (spec.index == 0 || spec.index > spec.params.size()) {
    throw ContractError("basis index " + std::to_string(spec.index) + " outside tuple of length " +
                        std::to_string(spec.params.size()));
  }
}

}  // namespace

std::span<const cplx> unit_circle(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<const std::vector<cplx>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    std::vector<cplx> points(n);
    for (std::size_t j = 0; j < n; ++j) points[j] = std::polar(1.0, grid_angle(j, n));
    slot = std::make_unique<const std::vector<cplx>>(std::move(points));
  }
  return *slot;
}

BoundarySignal szego_boundary(DiscParameter a, std::size_t n) {
  const auto z = unit_circle(n);
  std::vector<cplx> samples(n);
  const cplx abar = std::conj(a.value());
  for (std::size_t j = 0; j < n; ++j) samples[j] = 1.0 / (1.0 - abar * z[j]);
  return BoundarySignal::analytic_from_samples(std::move(samples));
}

std::vector<cplx> normalized_kernel_samples(DiscParameter a, std::size_t n) {
  const auto z = unit_circle(n);
  std::vector<cplx> samples(n);
  const cplx abar = std::conj(a.value());
  const double scale = std::sqrt(a.defect());
  for (std::size_t j = 0; j < n; ++j) samples[j] = scale / (1.0 - abar * z[j]);
  return samples;
}

BoundarySignal normalized_kernel(DiscParameter a, std::size_t n) {
  return BoundarySignal::analytic_from_samples(normalized_kernel_samples(a, n));
}

cplx normalized_kernel_at(DiscParameter a, cplx z) {
  return std::sqrt(a.defect()) / (1.0 - std::conj(a.value()) * z);
}

std::vector<cplx> moebius_samples(DiscParameter a, std::size_t n) {
  const auto z = unit_circle(n);
  std::vector<cplx> samples(n);
  for (std::size_t j = 0; j < n; ++j) samples[j] = moebius_at(a, z[j]);
  return samples;
}

BoundarySignal moebius_boundary(DiscParameter a, std::size_t n) {
  return BoundarySignal::analytic_from_samples(moebius_samples(a, n));
}

cplx moebius_at(DiscParameter a, cplx z) {
  return (z - a.value()) / (1.0 - std::conj(a.value()) * z);
}

std::vector<BoundarySignal> rational_system(std::span<const DiscParameter> params, int power,
                                            std::size_t n) {
  const std::vector<int> powers(params.size(), power);
  return rational_system(params, powers, n);
}

std::vector<BoundarySignal> rational_system(std::span<const DiscParameter> params,
                                            std::span<const int> powers, std::size_t n) {
  if (powers.size() < params.size()) throw ContractError("one factor power per parameter needed");
  std::vector<BoundarySignal> system;
  system.reserve(params.size());
  std::vector<cplx> product(n, cplx(1.0));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto kernel = normalized_kernel_samples(params[k], n);
    for (std::size_t j = 0; j < n; ++j) kernel[j] *= product[j];
    system.push_back(BoundarySignal::analytic_from_samples(std::move(kernel)));
    if (k + 1 == params.size()) break;
    const auto phi = moebius_samples(params[k], n);
    for (int p = 0; p < powers[k]; ++p) {
      for (std::size_t j = 0; j < n; ++j) product[j] *= phi[j];
    }
  }
  return system;
}

BoundarySignal basis_eval(const BasisSpec& spec, std::size_t n) {
  validate(spec);
  const int power = blaschke_power(spec.mode);
  std::vector<cplx> values = normalized_kernel_samples(spec.params[spec.index - 1], n);
  for (std::size_t l = 0; l + 1 < spec.index; ++l) {
    const auto phi = moebius_samples(spec.params[l], n);
    for (int p = 0; p < power; ++p) {
      for (std::size_t j = 0; j < n; ++j) values[j] *= phi[j];
    }
  }
  return BoundarySignal::analytic_from_samples(std::move(values));
}

cplx basis_at(const BasisSpec& spec, cplx z) {
  validate(spec);
  cplx value = normalized_kernel_at(spec.params[spec.index - 1], z);
  for (std::size_t l = 0; l + 1 < spec.index; ++l) {
    value *= std::pow(moebius_at(spec.params[l], z), blaschke_power(spec.mode));
  }
  return value;
}

double gram_check(std::span<const BasisSpec> specs, std::size_t n) {
  if (specs.empty()) return 0.0;
  std::vector<bool> seen(specs.size() + 1, false);
  for (const auto& spec : specs) {
    if (spec.params != specs.front().params || spec.mode != specs.front().mode) {
      throw ContractError("gram_check needs specs sharing one parameter tuple and mode");
    }
    if (spec.index == 0 || spec.index > specs.size() || seen[spec.index]) {
      throw ContractError("gram_check needs consecutive indices 1..n");
    }
    seen[spec.index] = true;
  }
  std::vector<BoundarySignal> basis;
  basis.reserve(specs.size());
  for (const auto& spec : specs) basis.push_back(basis_eval(spec, n));
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (i != j) worst = std::max(worst, std::abs(inner_product(basis[i], basis[j])));
    }
  }
  return worst;
}

}  // namespace dafd
