#pragma once

#include <span>
#include <vector>

#include "dafd/signal.hpp"

namespace dafd {

/// The grid points exp(i t_j), computed once per N and shared.
[[nodiscard]] std::span<const cplx> unit_circle(std::size_t n);

/// Szego kernel k_a(z) = 1 / (1 - conj(a) z) sampled on the circle.
[[nodiscard]] BoundarySignal szego_boundary(DiscParameter a, std::size_t n);

/// e_a = sqrt(1 - |a|^2) k_a, the unit-norm kernel.
[[nodiscard]] BoundarySignal normalized_kernel(DiscParameter a, std::size_t n);
[[nodiscard]] cplx normalized_kernel_at(DiscParameter a, cplx z);

/// Moebius factor phi_a(z) = (z - a) / (1 - conj(a) z).
[[nodiscard]] BoundarySignal moebius_boundary(DiscParameter a, std::size_t n);
[[nodiscard]] cplx moebius_at(DiscParameter a, cplx z);

/// Raw boundary samples of phi_a, shared by the basis builders and the
/// reduction steps so every caller multiplies the same numbers.
[[nodiscard]] std::vector<cplx> moebius_samples(DiscParameter a, std::size_t n);
[[nodiscard]] std::vector<cplx> normalized_kernel_samples(DiscParameter a, std::size_t n);

enum class BasisMode { TM, DTM };

/// Power of each Moebius factor in the basis products: 1 for TM, 2 for D-TM.
[[nodiscard]] constexpr int blaschke_power(BasisMode mode) noexcept {
  return mode == BasisMode::TM ? 1 : 2;
}

/// The k-th member (1-based) of the TM or D-TM system generated by an
/// ordered parameter tuple. Order is significant and never changed.
struct BasisSpec {
  std::vector<DiscParameter> params;
  BasisMode mode = BasisMode::TM;
  std::size_t index = 1;
};

/// B_k = e_{a_k} prod_{l<k} phi_{a_l}^p with p = blaschke_power(mode).
[[nodiscard]] BoundarySignal basis_eval(const BasisSpec& spec, std::size_t n);
[[nodiscard]] cplx basis_at(const BasisSpec& spec, cplx z);

/// All n members e_{a_k} prod_{l<k} phi_{a_l}^power, built with a running
/// product so the cost is linear in the tuple length.
[[nodiscard]] std::vector<BoundarySignal> rational_system(std::span<const DiscParameter> params,
                                                          int power, std::size_t n);

/// Same with a per-parameter factor power: member k carries
/// prod_{l<k} phi_{a_l}^{powers[l]}.
[[nodiscard]] std::vector<BoundarySignal> rational_system(std::span<const DiscParameter> params,
                                                          std::span<const int> powers,
                                                          std::size_t n);

/// Max |<B_j, B_k>| over j != k for specs sharing one tuple with indices 1..n.
[[nodiscard]] double gram_check(std::span<const BasisSpec> specs, std::size_t n);

}  // namespace dafd
