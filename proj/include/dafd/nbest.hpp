#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dafd/engine.hpp"

namespace dafd {

using ParameterTuple = std::vector<DiscParameter>;

struct ProjectionResult {
  std::vector<cplx> coefficients;  // <f, B_j> against the tuple's system
  double residual_energy = 0.0;    // ||f||^2 - sum |c_j|^2
};

/// Orthogonal projection of f onto the TM or D-TM system of an ordered tuple.
[[nodiscard]] ProjectionResult projection_residual(const BoundarySignal& f,
                                                   std::span<const DiscParameter> tuple,
                                                   BasisMode mode);

enum class StartOrigin { GreedySeed, TruePeaks, Random };

[[nodiscard]] std::string origin_name(StartOrigin origin);

struct NBestConfig {
  EngineConfig engine;
  std::size_t random_starts = 8;
  /// Nelder-Mead budget per start is evals_per_term * n.
  std::size_t evals_per_term = 400;
  /// Offset applied to one parameter at a time, in the unconstrained
  /// coordinates, to build the perturbed greedy starts.
  double perturbation = 0.15;
  std::uint64_t seed = 0;
  /// Caller-supplied starts, e.g. known generating parameters.
  std::vector<ParameterTuple> extra_starts;
};

struct NBestResult {
  ParameterTuple tuple;
  std::vector<cplx> coefficients;
  double residual_energy = 0.0;
  std::size_t starts_used = 0;
  StartOrigin best_start_origin = StartOrigin::GreedySeed;
  /// Projection residual at the greedy tuple of the same mode and length.
  double greedy_residual = 0.0;
  ParameterTuple greedy_tuple;
  std::size_t non_improving_starts = 0;
  std::vector<std::string> diagnostics;
};

/// Multi-start Nelder-Mead over 2n real coordinates. Each disc entry is
/// reached through a -> r_max tanh(|u|) u / |u|, so every candidate is
/// admissible. The greedy tuple is always a start, so the result never
/// exceeds the greedy residual.
[[nodiscard]] NBestResult optimize_nbest(const BoundarySignal& f, std::size_t n, BasisMode mode,
                                         const NBestConfig& config);

}  // namespace dafd
