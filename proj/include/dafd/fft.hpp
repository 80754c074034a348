#pragma once

#include <span>
#include <vector>

#include "dafd/types.hpp"

namespace dafd::fft {

// Thin wrapper over FFTW. Plans are created once per length under a lock and
// then executed through the new-array interface, which is thread-safe.

/// c_m = (1/N) sum_j x_j exp(-i m t_j), t_j = 2 pi j / N.
std::vector<cplx> forward(std::span<const cplx> samples);

/// x_j = sum_m c_m exp(i m t_j); exact inverse of forward().
std::vector<cplx> inverse(std::span<const cplx> spectrum);

/// Unnormalized in-place backward transform, used by the polar grid search.
void backward_inplace(std::span<cplx> data);

}  // namespace dafd::fft
