#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dafd/analysis.hpp"
#include "dafd/io.hpp"

namespace dafd {

/// sin(4t) - t/4 on [0, pi], sin(4t) + (t - pi)/2 - t/4 on (pi, 2 pi).
[[nodiscard]] double example1_value(double t);
[[nodiscard]] std::vector<double> example1_samples(std::size_t n);

/// The kernel combination Σ c_k / (1 - conj(a_k) z) of the second example.
[[nodiscard]] std::vector<cplx> example2_parameters();
[[nodiscard]] std::vector<cplx> example2_coefficients();
/// Kernel combination sampled in closed form on the N-grid.
[[nodiscard]] BoundarySignal kernel_combination(const std::vector<cplx>& parameters,
                                                const std::vector<cplx>& coefficients,
                                                std::size_t n);
[[nodiscard]] BoundarySignal example2_signal(std::size_t n);
/// M = Σ |c_k| / sqrt(1 - |a_k|²) for the second example.
[[nodiscard]] double example2_bound();

/// A signal ready for decomposition plus the descriptor that rebuilds it.
struct PreparedSource {
  BoundarySignal analytic;
  std::vector<double> real_samples;  // empty unless the input was real
  SourceDescriptor descriptor;
};

/// "ex1", "ex2", or "csv" with descriptor.path set. CSV input is resampled
/// spectrally to n when n is nonzero and differs from the file length.
[[nodiscard]] PreparedSource prepare_source(const SourceDescriptor& descriptor, std::size_t n);

struct ExperimentSpec {
  std::string name = "ex1";  // ex1, ex2 or custom
  std::filesystem::path input;  // CSV for custom
  std::vector<std::pair<Mode, int>> modes = {{Mode::Core, 1}, {Mode::Double, 1},
                                             {Mode::MonoComponent, 1}};
  std::size_t n_max = 20;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  EngineConfig config;
  /// Resample custom input to config.n_samples instead of keeping the file
  /// length.
  bool resample_input = false;
  /// When nonzero, n-best runs for n = 1..nbest_max in both bases.
  std::size_t nbest_max = 0;
};

struct ModeOutcome {
  std::string mode;
  Decomposition decomposition;
  EnergyIdentity energy;
};

struct ExperimentOutcome {
  PreparedSource source;
  std::vector<ModeOutcome> modes;
  std::vector<DecayRow> decay;
  std::vector<std::filesystem::path> files;
  std::string summary;
};

/// Runs every mode, writes input.csv, error_decay.csv and per mode
/// residual_<mode>.csv, parameters_<mode>.csv, decomposition_<mode>.json,
/// nbest.csv when requested, then summary.txt. Output bytes depend only on the spec.
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

/// Mode name usable in a file name ("ho:2" becomes "ho2").
[[nodiscard]] std::string mode_slug(Mode mode, int ho_order);

}  // namespace dafd
