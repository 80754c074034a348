#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dafd/kernels.hpp"
#include "dafd/signal.hpp"

namespace dafd {

struct EngineConfig {
  std::size_t n_samples = 4096;
  double r_max = kDefaultRMax;
  std::size_t grid_radii = 64;
  std::size_t grid_angles = 256;
  int newton_max_iter = 50;
  double newton_tol = 1e-12;
  /// A refined parameter must satisfy |stationarity| <= refine_tol ||f||.
  double refine_tol = 1e-9;
  /// Leakage above leak_tol ||f||^2 marks a reduction as invalid.
  double leak_tol = 1e-6;
  /// Admissible |condition_j| / ||f|| for the higher-order reduction.
  double condition_tol = 1e-9;
  std::size_t max_terms = 20;
  /// Stop once ||remainder|| / ||f|| falls to this level.
  double rel_tol = 1e-8;
  /// Worker threads for the grid search; 0 reads DAFD_THREADS, then falls
  /// back to the hardware concurrency.
  unsigned threads = 0;
};

/// Worker count after applying the DAFD_THREADS cap.
[[nodiscard]] unsigned resolve_threads(const EngineConfig& config);

struct SelectionResult {
  DiscParameter a;
  double objective = 0.0;          // (1 - |a|^2) |f(a)|^2
  bool refined = false;
  double stationarity_residual = 0.0;  // |-conj(a) f(a) + (1 - |a|^2) f'(a)|
  bool clamped = false;
  int iterations = 0;
};

enum class Mode { Core, Double, MonoComponent, HigherOrder };

struct Diagnostic {
  std::size_t term = 0;  // 1-based term index, 0 for decomposition-wide notes
  std::string kind;      // "leakage", "aliasing", "refinement", "stop", ...
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct DecompositionTerm {
  DiscParameter a;
  cplx c;
  double residual_energy_after = 0.0;
  double leakage = 0.0;

  friend bool operator==(const DecompositionTerm&, const DecompositionTerm&) = default;
};

struct Decomposition {
  Mode mode = Mode::Core;
  int ho_order = 1;  // k of HigherOrder(k); the factor power is k + 1
  std::vector<DecompositionTerm> terms;
  double source_norm2 = 0.0;
  EngineConfig config;
  std::vector<Diagnostic> diagnostics;
  /// The remainder vanished before max_terms was reached.
  bool exact = false;

  [[nodiscard]] std::vector<DiscParameter> parameters() const;
  [[nodiscard]] std::vector<cplx> coefficients() const;
  [[nodiscard]] double final_residual_energy() const;
};

[[nodiscard]] std::string mode_name(Mode mode, int ho_order = 1);
/// Parses "core", "double", "mono" or "ho:<k>".
[[nodiscard]] std::pair<Mode, int> parse_mode(const std::string& text);

/// Power of phi_{a_l} in the basis products of every term of a decomposition.
[[nodiscard]] std::vector<int> factor_powers(Mode mode, int ho_order, std::size_t count);

// ---- selection ------------------------------------------------------------

/// |<f, e_a>|^2 = (1 - |a|^2) |f(a)|^2.
[[nodiscard]] double objective(const BoundarySignal& f, DiscParameter a);

/// Argmax of the objective over the polar grid r_j = (j / radii) r_max,
/// theta_i = 2 pi i / angles. Ties within 1e-12 relative go to the smallest
/// angle index, then the smallest radius index. Empty for a zero signal.
[[nodiscard]] std::optional<SelectionResult> grid_select(const BoundarySignal& f,
                                                         const EngineConfig& config);

/// Damped Newton ascent on the objective in (Re a, Im a), driving the
/// stationarity expression to zero. Falls back to a coordinate-ascent polish
/// with refined = false when Newton does not converge.
[[nodiscard]] SelectionResult refine_stationary(const BoundarySignal& f, DiscParameter seed,
                                                const EngineConfig& config);

// ---- reduction steps -------------------------------------------------------

struct StepResult {
  BoundarySignal remainder;
  double leakage = 0.0;  // anti-analytic energy discarded by the re-projection
  std::vector<std::string> warnings;
};

/// (f - c e_a) / phi_a, re-projected onto the analytic band.
[[nodiscard]] StepResult core_step(const BoundarySignal& f, DiscParameter a, cplx c,
                                   const EngineConfig& config = {});

/// (f - c e_a) / phi_a^2, re-projected. A leakage warning means a was not a
/// stationary point of the objective for f.
[[nodiscard]] StepResult double_step(const BoundarySignal& f, DiscParameter a, cplx c,
                                     const EngineConfig& config = {});

/// -conj(a) f^{(k-1)}(a) + ((1 - |a|^2) / k) f^{(k)}(a).
[[nodiscard]] cplx higher_order_condition(const BoundarySignal& f, DiscParameter a, int k);

struct ConditionRoot {
  DiscParameter a;
  double residual = 0.0;  // max_j |condition_j(a)| / ||f||
  bool converged = false;
  bool clamped = false;
};

/// Levenberg-Marquardt on the stacked conditions of the given orders.
[[nodiscard]] ConditionRoot find_condition_root(const BoundarySignal& f, DiscParameter seed,
                                                std::span<const int> orders,
                                                const EngineConfig& config = {});

struct CommonRootReport {
  bool found = false;
  ConditionRoot best;
  double grid_min_residual = 0.0;
};

/// Scans the polar grid for the best simultaneous root of conditions 1..k
/// and polishes it. Reports; never assumes a root exists.
[[nodiscard]] CommonRootReport scan_common_root(const BoundarySignal& f, int k,
                                                const EngineConfig& config = {});

/// Divides f - <f, e_a> e_a by phi_a^{k+1}. Throws ContractError when the
/// conditions of orders 1..k are not met at a.
[[nodiscard]] StepResult higher_order_step(const BoundarySignal& f, DiscParameter a, int k,
                                           const EngineConfig& config = {});

// ---- decompositions -------------------------------------------------------

/// Greedy Core AFD (mode Core) or Double AFD (mode Double).
[[nodiscard]] Decomposition run_afd(const BoundarySignal& f, Mode mode, const EngineConfig& config);

/// a_1 = 0 with a single reduction by z, then Double AFD on the rest.
[[nodiscard]] Decomposition run_mono_component(const BoundarySignal& f, const EngineConfig& config);

/// Experimental order-(k+1) reduction; stops when no admissible root is found.
[[nodiscard]] Decomposition run_higher_order(const BoundarySignal& f, int k,
                                             const EngineConfig& config);

/// Dispatches on mode.
[[nodiscard]] Decomposition decompose(const BoundarySignal& f, Mode mode, int ho_order,
                                      const EngineConfig& config);

/// The orthonormal system the decomposition's coefficients refer to.
[[nodiscard]] std::vector<BoundarySignal> decomposition_basis(const Decomposition& d,
                                                              std::size_t n_terms,
                                                              std::size_t n_samples);

/// S_n = sum_{k<=n} c_k B_k on an n_samples grid (defaults to the config N).
[[nodiscard]] BoundarySignal partial_sum(const Decomposition& d, std::size_t n,
                                         std::size_t n_samples = 0);

/// Re-runs the reductions with the stored parameters and returns the
/// reduced remainders f_1 = f, ..., f_{n+1}.
[[nodiscard]] std::vector<BoundarySignal> replay_remainders(const BoundarySignal& f,
                                                            const Decomposition& d);

}  // namespace dafd
