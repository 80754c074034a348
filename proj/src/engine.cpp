#include "dafd/engine.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

#include "dafd/fft.hpp"

namespace dafd {
namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kAliasingThreshold = 1e-8;
// Line searches accept objective changes within this relative slack; below
// it the objective cannot be resolved in double precision.
constexpr double kFlatSlack = 1e-14;
constexpr double kMaxStep = 0.1;

void require_analytic(const BoundarySignal& f, const char* what) {
  if (!f.is_analytic()) throw ContractError(std::string(what) + " requires an analytic signal");
}

/// Pulls a candidate back onto the admissible disc; reports whether it moved.
std::pair<cplx, bool> clamp_to_disc(cplx z, double r_max) {
  const double r = std::abs(z);
  if (r <= r_max) return {z, false};
  cplx out = z * (r_max / r);
  while (std::abs(out) > r_max) out *= 1.0 - 1e-16;
  return {out, true};
}

struct Sym2 {
  double xx, xy, yy;
};

std::array<double, 2> eigenvalues(const Sym2& h) {
  const double mean = 0.5 * (h.xx + h.yy);
  const double diff = 0.5 * (h.xx - h.yy);
  const double rad = std::hypot(diff, h.xy);
  return {mean - rad, mean + rad};
}

std::array<double, 2> solve(const Sym2& m, std::array<double, 2> rhs) {
  const double det = m.xx * m.yy - m.xy * m.xy;
  if (det == 0.0) return {0.0, 0.0};
  return {(m.yy * rhs[0] - m.xy * rhs[1]) / det, (m.xx * rhs[1] - m.xy * rhs[0]) / det};
}

cplx stationarity(cplx z, cplx f0, cplx f1) {
  return -std::conj(z) * f0 + (1.0 - std::norm(z)) * f1;
}

/// Maximizes the objective by compass search. Used when Newton stalls.
cplx pattern_polish(const BoundarySignal& f, cplx z, double r_max) {
  double value = objective(f, DiscParameter(z, r_max));
  double step = 1e-3;
  const std::array<cplx, 4> dirs{cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)};
  for (int iter = 0; iter < 2000 && step > 1e-15; ++iter) {
    bool moved = false;
    for (const auto& d : dirs) {
      const cplx cand = z + step * d;
      if (std::abs(cand) > r_max) continue;
      const double v = objective(f, DiscParameter(cand, r_max));
      if (v > value) {
        z = cand;
        value = v;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return z;
}

StepResult reduce(const BoundarySignal& f, DiscParameter a, cplx c, int power,
                  const EngineConfig& config) {
  require_analytic(f, "reduction");
  const std::size_t n = f.size();
  const auto kernel = normalized_kernel_samples(a, n);
  const auto phi = moebius_samples(a, n);
  const auto fs = f.samples();
  std::vector<cplx> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = fs[j] - c * kernel[j];
  for (int p = 0; p < power; ++p) {
    for (std::size_t j = 0; j < n; ++j) g[j] /= phi[j];
  }
  const auto raw = BoundarySignal::from_samples(std::move(g));
  StepResult out{raw.analytic_part(), anti_analytic_energy(raw), {}};
  const double scale = f.norm2();
  if (scale > 0.0 && out.leakage > config.leak_tol * scale) {
    out.warnings.push_back("leakage " + std::to_string(out.leakage / scale) +
                           " of the input energy; parameter is not stationary");
  }
  if (high_band_fraction(out.remainder) > kAliasingThreshold) {
    out.warnings.push_back("remainder holds more than 1e-8 of its energy in the top 5% band");
  }
  return out;
}

cplx kernel_coefficient(const BoundarySignal& f, DiscParameter a) {
  return inner_product(f, normalized_kernel(a, f.size()));
}

int base_power(Mode mode, int ho_order) {
  switch (mode) {
    case Mode::Core: return 1;
    case Mode::Double:
    case Mode::MonoComponent: return 2;
    case Mode::HigherOrder: return ho_order + 1;
  }
  return 1;
}

std::vector<int> orders_up_to(int k) {
  std::vector<int> orders(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) orders[static_cast<std::size_t>(j)] = j + 1;
  return orders;
}

/// Shared greedy driver for every decomposition mode.
Decomposition run_greedy(const BoundarySignal& f, Mode mode, int ho_order,
                         const EngineConfig& config) {
  require_analytic(f, "decomposition");
  if (mode == Mode::HigherOrder && ho_order < 1) {
    throw ContractError("higher-order mode needs k >= 1");
  }
  Decomposition d;
  d.mode = mode;
  d.ho_order = mode == Mode::HigherOrder ? ho_order : 1;
  d.config = config;
  d.config.n_samples = f.size();
  d.source_norm2 = f.norm2();

  const double src = d.source_norm2;
  const int power = base_power(mode, ho_order);
  BoundarySignal current = f;
  for (std::size_t k = 1; k <= config.max_terms; ++k) {
    const double energy = current.norm2();
    if (src == 0.0 || std::sqrt(energy / src) <= config.rel_tol) {
      d.exact = true;
      d.diagnostics.push_back({k - 1, "stop", "remainder vanished"});
      break;
    }
    const bool forced_origin = mode == Mode::MonoComponent && k == 1;
    DiscParameter a;
    if (!forced_origin) {
      const auto seed = grid_select(current, config);
      if (!seed) {
        d.diagnostics.push_back({k, "stop", "empty selection"});
        break;
      }
      const auto sel = refine_stationary(current, seed->a, config);
      a = sel.a;
      if (!sel.refined) {
        const std::string note = "refinement did not converge (stationarity " +
                                 std::to_string(sel.stationarity_residual / std::sqrt(energy)) +
                                 " relative" + (sel.clamped ? ", clamped at r_max)" : ")");
        if (power >= 2) {
          d.diagnostics.push_back({k, "stop", note});
          break;
        }
        d.diagnostics.push_back({k, "refinement", note});
      }
      if (mode == Mode::HigherOrder) {
        const auto orders = orders_up_to(ho_order);
        const auto root = find_condition_root(current, a, orders, config);
        if (!root.converged) {
          d.diagnostics.push_back(
              {k, "stop",
               "no admissible root of the order-" + std::to_string(ho_order) +
                   " conditions near the maximizer (residual " + std::to_string(root.residual) +
                   ")"});
          break;
        }
        a = root.a;
      }
    }
    const cplx c = kernel_coefficient(current, a);
    if (!forced_origin && std::norm(c) <= 1e-30 * src) {
      d.diagnostics.push_back({k, "stop", "no further energy can be extracted"});
      break;
    }
    const int step_power = forced_origin ? 1 : power;
    StepResult step = reduce(current, a, c, step_power, config);
    d.terms.push_back({a, c, step.remainder.norm2(), step.leakage});
    for (auto& w : step.warnings) {
      d.diagnostics.push_back({k, w.starts_with("leakage") ? "leakage" : "aliasing", std::move(w)});
    }
    current = std::move(step.remainder);
  }
  return d;
}

}  // namespace

unsigned resolve_threads(const EngineConfig& config) {
  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DAFD_THREADS"); env != nullptr) {
    unsigned cap = 0;
    const char* end = env + std::char_traits<char>::length(env);
    if (std::from_chars(env, end, cap).ec == std::errc() && cap > 0) threads = std::min(threads, cap);
  }
  return threads;
}

std::vector<DiscParameter> Decomposition::parameters() const {
  std::vector<DiscParameter> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(t.a);
  return out;
}

std::vector<cplx> Decomposition::coefficients() const {
  std::vector<cplx> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(t.c);
  return out;
}

double Decomposition::final_residual_energy() const {
  return terms.empty() ? source_norm2 : terms.back().residual_energy_after;
}

std::string mode_name(Mode mode, int ho_order) {
  switch (mode) {
    case Mode::Core: return "core";
    case Mode::Double: return "double";
    case Mode::MonoComponent: return "mono";
    case Mode::HigherOrder: return "ho:" + std::to_string(ho_order);
  }
  return "core";
}

std::pair<Mode, int> parse_mode(const std::string& text) {
  if (text == "core") return {Mode::Core, 1};
  if (text == "double") return {Mode::Double, 1};
  if (text == "mono") return {Mode::MonoComponent, 1};
  if (text.starts_with("ho:")) {
    int k = 0;
    const char* first = text.data() + 3;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, k);
    if (ec == std::errc() && ptr == last && k >= 1) return {Mode::HigherOrder, k};
  }
  throw ContractError("unknown mode '" + text + "' (expected core, double, mono or ho:<k>)");
}

std::vector<int> factor_powers(Mode mode, int ho_order, std::size_t count) {
  std::vector<int> powers(count, base_power(mode, ho_order));
  if (mode == Mode::MonoComponent && count > 0) powers[0] = 1;
  return powers;
}

double objective(const BoundarySignal& f, DiscParameter a) {
  return a.defect() * std::norm(eval_disc(f, a));
}

std::optional<SelectionResult> grid_select(const BoundarySignal& f, const EngineConfig& config) {
  require_analytic(f, "grid_select");
  if (f.norm2() == 0.0 || f.horner_end() == 0) return std::nullopt;
  const std::size_t radii = config.grid_radii;
  const std::size_t angles = config.grid_angles;
  const auto c = f.spectrum();
  const std::size_t end = f.horner_end();
  std::vector<double> values(radii * angles);

  // On a circle of radius r the values f(r e^{i theta_q}) are a DFT of the
  // coefficients c_m r^m folded modulo the number of angles.
  auto fill = [&](std::size_t first, std::size_t last) {
    std::vector<cplx> folded(angles);
    for (std::size_t jr = first; jr < last; ++jr) {
      const double r = static_cast<double>(jr) / static_cast<double>(radii) * config.r_max;
      std::fill(folded.begin(), folded.end(), cplx(0.0));
      double rp = 1.0;
      for (std::size_t m = 0; m < end && rp != 0.0; ++m) {
        folded[m % angles] += c[m] * rp;
        rp *= r;
      }
      fft::backward_inplace(folded);
      const double defect = 1.0 - r * r;
      for (std::size_t i = 0; i < angles; ++i) values[jr * angles + i] = defect * std::norm(folded[i]);
    }
  };

  const unsigned threads = std::min<unsigned>(resolve_threads(config), static_cast<unsigned>(radii));
  if (threads <= 1) {
    fill(0, radii);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (radii + threads - 1) / threads;
    for (std::size_t first = 0; first < radii; first += chunk) {
      workers.emplace_back(fill, first, std::min(radii, first + chunk));
    }
  }

  const double best = *std::max_element(values.begin(), values.end());
  if (!(best > 0.0)) return std::nullopt;
  const double floor = best * (1.0 - kTieTolerance);
  for (std::size_t i = 0; i < angles; ++i) {
    for (std::size_t jr = 0; jr < radii; ++jr) {
      if (values[jr * angles + i] >= floor) {
        const double r = static_cast<double>(jr) / static_cast<double>(radii) * config.r_max;
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(angles);
        SelectionResult out;
        out.a = DiscParameter(std::polar(r, theta), config.r_max);
        out.objective = values[jr * angles + i];
        return out;
      }
    }
  }
  return std::nullopt;
}

SelectionResult refine_stationary(const BoundarySignal& f, DiscParameter seed,
                                  const EngineConfig& config) {
  require_analytic(f, "refine_stationary");
  const double r_max = config.r_max;
  const double fnorm = f.norm();
  cplx z = seed.value();
  double value = objective(f, seed);
  bool clamped = false;
  int iterations = 0;

  for (; iterations < config.newton_max_iter; ++iterations) {
    const DiscParameter a(z, r_max);
    const cplx f0 = eval_disc(f, a);
    const cplx f1 = eval_deriv_disc(f, a, 1);
    const cplx f2 = eval_deriv_disc(f, a, 2);
    const cplx h = stationarity(z, f0, f1);
    if (std::abs(h) <= config.newton_tol * fnorm) break;

    // Wirtinger derivatives of A = (1 - |z|^2) |f|^2.
    const double defect = 1.0 - std::norm(z);
    const cplx a_z = h * std::conj(f0);
    const cplx a_zz = (-2.0 * std::conj(z) * f1 + defect * f2) * std::conj(f0);
    const double a_zzbar = -std::norm(f0) - 2.0 * std::real(z * f1 * std::conj(f0)) + defect * std::norm(f1);
    const std::array<double, 2> grad{2.0 * a_z.real(), -2.0 * a_z.imag()};
    Sym2 hess{2.0 * a_zz.real() + 2.0 * a_zzbar, -2.0 * a_zz.imag(), -2.0 * a_zz.real() + 2.0 * a_zzbar};

    // Shift the Hessian until it is negative definite so the step ascends.
    const auto eig = eigenvalues(hess);
    const double scale = std::max({std::abs(eig[0]), std::abs(eig[1]), std::numeric_limits<double>::min()});
    if (eig[1] > -1e-8 * scale) {
      const double shift = eig[1] + 1e-8 * scale;
      hess.xx -= shift;
      hess.yy -= shift;
    }
    auto step = solve(hess, {-grad[0], -grad[1]});
    cplx delta(step[0], step[1]);
    if (std::abs(delta) > kMaxStep) delta *= kMaxStep / std::abs(delta);

    bool accepted = false;
    double t = 1.0;
    for (int tries = 0; tries < 60; ++tries, t *= 0.5) {
      auto [cand, moved] = clamp_to_disc(z + t * delta, r_max);
      const double v = objective(f, DiscParameter(cand, r_max));
      if (v >= value - kFlatSlack * value) {
        accepted = true;
        const bool stalled = std::abs(cand - z) <= 1e-16 * std::max(1.0, std::abs(z));
        clamped = moved;
        z = cand;
        value = v;
        if (stalled) iterations = config.newton_max_iter;
        break;
      }
    }
    if (!accepted) break;
  }

  SelectionResult out;
  auto finish = [&](cplx point) {
    out.a = DiscParameter(point, r_max);
    const cplx f0 = eval_disc(f, out.a);
    const cplx f1 = eval_deriv_disc(f, out.a, 1);
    out.stationarity_residual = std::abs(stationarity(point, f0, f1));
    out.objective = out.a.defect() * std::norm(f0);
  };
  finish(z);
  out.iterations = iterations;
  out.clamped = clamped;
  out.refined = !clamped && out.stationarity_residual <= config.refine_tol * fnorm;
  if (!out.refined && !clamped) {
    finish(pattern_polish(f, z, r_max));
    out.refined = false;
  }
  return out;
}

StepResult core_step(const BoundarySignal& f, DiscParameter a, cplx c, const EngineConfig& config) {
  return reduce(f, a, c, 1, config);
}

StepResult double_step(const BoundarySignal& f, DiscParameter a, cplx c, const EngineConfig& config) {
  return reduce(f, a, c, 2, config);
}

cplx higher_order_condition(const BoundarySignal& f, DiscParameter a, int k) {
  if (k < 1) throw ContractError("condition order must be at least 1");
  const cplx lower = eval_deriv_disc(f, a, k - 1);
  const cplx upper = eval_deriv_disc(f, a, k);
  return -std::conj(a.value()) * lower + (a.defect() / static_cast<double>(k)) * upper;
}

ConditionRoot find_condition_root(const BoundarySignal& f, DiscParameter seed,
                                  std::span<const int> orders, const EngineConfig& config) {
  require_analytic(f, "find_condition_root");
  if (orders.empty()) throw ContractError("at least one condition order is required");
  const double r_max = config.r_max;
  const double fnorm = f.norm() > 0.0 ? f.norm() : 1.0;
  const int top = *std::max_element(orders.begin(), orders.end());

  struct Eval {
    std::vector<cplx> values;
    std::vector<std::array<cplx, 2>> jac;  // d/dx, d/dy per condition
    double cost = 0.0;
    double worst = 0.0;
  };
  auto evaluate = [&](cplx z) {
    const DiscParameter a(z, r_max);
    std::vector<cplx> derivs(static_cast<std::size_t>(top) + 2);
    for (int j = 0; j <= top + 1; ++j) derivs[static_cast<std::size_t>(j)] = eval_deriv_disc(f, a, j);
    Eval e;
    const double defect = 1.0 - std::norm(z);
    for (int k : orders) {
      const auto kk = static_cast<std::size_t>(k);
      const double inv = 1.0 / static_cast<double>(k);
      const cplx value = -std::conj(z) * derivs[kk - 1] + defect * inv * derivs[kk];
      const cplx d_z = -std::conj(z) * derivs[kk] - std::conj(z) * inv * derivs[kk] + defect * inv * derivs[kk + 1];
      const cplx d_zbar = -derivs[kk - 1] - z * inv * derivs[kk];
      e.values.push_back(value);
      e.jac.push_back({d_z + d_zbar, cplx(0.0, 1.0) * (d_z - d_zbar)});
      e.cost += std::norm(value);
      e.worst = std::max(e.worst, std::abs(value));
    }
    return e;
  };

  cplx z = seed.value();
  Eval cur = evaluate(z);
  bool clamped = false;
  double mu = 1e-3;
  for (int iter = 0; iter < 4 * config.newton_max_iter; ++iter) {
    if (cur.worst <= config.newton_tol * fnorm) break;
    Sym2 jtj{0.0, 0.0, 0.0};
    std::array<double, 2> jtf{0.0, 0.0};
    for (std::size_t i = 0; i < cur.values.size(); ++i) {
      const auto& [dx, dy] = cur.jac[i];
      const auto& v = cur.values[i];
      jtj.xx += dx.real() * dx.real() + dx.imag() * dx.imag();
      jtj.xy += dx.real() * dy.real() + dx.imag() * dy.imag();
      jtj.yy += dy.real() * dy.real() + dy.imag() * dy.imag();
      jtf[0] += dx.real() * v.real() + dx.imag() * v.imag();
      jtf[1] += dy.real() * v.real() + dy.imag() * v.imag();
    }
    const double trace = jtj.xx + jtj.yy;
    bool improved = false;
    for (int tries = 0; tries < 40; ++tries) {
      Sym2 damped = jtj;
      damped.xx += mu * trace + 1e-300;
      damped.yy += mu * trace + 1e-300;
      const auto step = solve(damped, {-jtf[0], -jtf[1]});
      cplx delta(step[0], step[1]);
      if (std::abs(delta) > kMaxStep) delta *= kMaxStep / std::abs(delta);
      auto [cand, moved] = clamp_to_disc(z + delta, r_max);
      Eval next = evaluate(cand);
      if (next.cost < cur.cost) {
        z = cand;
        cur = std::move(next);
        clamped = moved;
        mu = std::max(mu / 3.0, 1e-15);
        improved = true;
        break;
      }
      mu *= 4.0;
    }
    if (!improved) break;
  }
  ConditionRoot out;
  out.a = DiscParameter(z, r_max);
  out.residual = cur.worst / fnorm;
  out.clamped = clamped;
  out.converged = out.residual <= config.condition_tol && !clamped;
  return out;
}

CommonRootReport scan_common_root(const BoundarySignal& f, int k, const EngineConfig& config) {
  require_analytic(f, "scan_common_root");
  const auto orders = orders_up_to(k);
  const double fnorm = f.norm() > 0.0 ? f.norm() : 1.0;
  const std::size_t radii = std::max<std::size_t>(config.grid_radii / 2, 4);
  const std::size_t angles = std::max<std::size_t>(config.grid_angles / 4, 8);
  CommonRootReport report;
  report.grid_min_residual = std::numeric_limits<double>::infinity();
  DiscParameter best_seed;
  for (std::size_t i = 0; i < angles; ++i) {
    for (std::size_t jr = 0; jr < radii; ++jr) {
      const double r = static_cast<double>(jr) / static_cast<double>(radii) * config.r_max;
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(angles);
      const DiscParameter a(std::polar(r, theta), config.r_max);
      double worst = 0.0;
      for (int j : orders) worst = std::max(worst, std::abs(higher_order_condition(f, a, j)));
      if (worst / fnorm < report.grid_min_residual) {
        report.grid_min_residual = worst / fnorm;
        best_seed = a;
      }
    }
  }
  report.best = find_condition_root(f, best_seed, orders, config);
  report.found = report.best.converged;
  return report;
}

StepResult higher_order_step(const BoundarySignal& f, DiscParameter a, int k,
                             const EngineConfig& config) {
  if (k < 1) throw ContractError("higher-order step needs k >= 1");
  const double fnorm = f.norm();
  for (int j = 1; j <= k; ++j) {
    const double value = std::abs(higher_order_condition(f, a, j));
    if (value > config.condition_tol * fnorm) {
      throw ContractError("order-" + std::to_string(j) + " condition is " +
                          std::to_string(fnorm > 0.0 ? value / fnorm : value) +
                          " relative at this parameter; the reduction by phi^" +
                          std::to_string(k + 1) + " would leak");
    }
  }
  return reduce(f, a, kernel_coefficient(f, a), k + 1, config);
}

Decomposition run_afd(const BoundarySignal& f, Mode mode, const EngineConfig& config) {
  if (mode != Mode::Core && mode != Mode::Double) {
    throw ContractError("run_afd handles the core and double modes");
  }
  return run_greedy(f, mode, 1, config);
}

Decomposition run_mono_component(const BoundarySignal& f, const EngineConfig& config) {
  return run_greedy(f, Mode::MonoComponent, 1, config);
}

Decomposition run_higher_order(const BoundarySignal& f, int k, const EngineConfig& config) {
  return run_greedy(f, Mode::HigherOrder, k, config);
}

Decomposition decompose(const BoundarySignal& f, Mode mode, int ho_order, const EngineConfig& config) {
  return run_greedy(f, mode, ho_order, config);
}

std::vector<BoundarySignal> decomposition_basis(const Decomposition& d, std::size_t n_terms,
                                                std::size_t n_samples) {
  if (n_terms > d.terms.size()) throw ContractError("more basis terms requested than computed");
  std::vector<DiscParameter> params;
  for (std::size_t k = 0; k < n_terms; ++k) params.push_back(d.terms[k].a);
  const auto powers = factor_powers(d.mode, d.ho_order, n_terms);
  return rational_system(params, powers, n_samples);
}

BoundarySignal partial_sum(const Decomposition& d, std::size_t n, std::size_t n_samples) {
  if (n_samples == 0) n_samples = d.config.n_samples;
  if (n > d.terms.size()) throw ContractError("partial sum beyond the computed terms");
  std::vector<cplx> sum(n_samples);
  const auto basis = decomposition_basis(d, n, n_samples);
  for (std::size_t k = 0; k < n; ++k) {
    const auto b = basis[k].samples();
    for (std::size_t j = 0; j < n_samples; ++j) sum[j] += d.terms[k].c * b[j];
  }
  return BoundarySignal::analytic_from_samples(std::move(sum));
}

std::vector<BoundarySignal> replay_remainders(const BoundarySignal& f, const Decomposition& d) {
  const auto powers = factor_powers(d.mode, d.ho_order, d.terms.size());
  std::vector<BoundarySignal> out;
  out.reserve(d.terms.size() + 1);
  out.push_back(f);
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    const auto& current = out.back();
    const DiscParameter a = d.terms[k].a;
    auto step = reduce(current, a, kernel_coefficient(current, a), powers[k], d.config);
    out.push_back(std::move(step.remainder));
  }
  return out;
}

}  // namespace dafd
