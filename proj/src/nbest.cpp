#include "dafd/nbest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "nelder_mead.hpp"

namespace dafd {
namespace {

struct Start {
  ParameterTuple tuple;
  StartOrigin origin;
};

struct Outcome {
  ParameterTuple tuple;
  double residual = 0.0;
  double start_residual = 0.0;
  StartOrigin origin = StartOrigin::GreedySeed;
};

ParameterTuple from_coordinates(const std::vector<double>& u, double r_max) {
  ParameterTuple tuple;
  tuple.reserve(u.size() / 2);
  for (std::size_t k = 0; k + 1 < u.size(); k += 2) {
    const cplx w(u[k], u[k + 1]);
    const double rho = std::abs(w);
    cplx a = rho > 0.0 ? w * (r_max * std::tanh(rho) / rho) : cplx(0.0);
    while (std::abs(a) > r_max) a *= 1.0 - 1e-16;
    tuple.emplace_back(a, r_max);
  }
  return tuple;
}

std::vector<double> to_coordinates(const ParameterTuple& tuple, double r_max) {
  std::vector<double> u;
  u.reserve(2 * tuple.size());
  for (const auto& p : tuple) {
    const double r = p.modulus();
    if (r == 0.0) {
      u.push_back(0.0);
      u.push_back(0.0);
      continue;
    }
    const double rho = std::atanh(std::min(r / r_max, 1.0 - 1e-12));
    u.push_back(p.value().real() / r * rho);
    u.push_back(p.value().imag() / r * rho);
  }
  return u;
}

bool lex_less(const ParameterTuple& x, const ParameterTuple& y) {
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    const cplx a = x[k].value(), b = y[k].value();
    if (a.real() != b.real()) return a.real() < b.real();
    if (a.imag() != b.imag()) return a.imag() < b.imag();
  }
  return x.size() < y.size();
}

bool better(const Outcome& x, const Outcome& y) {
  if (x.residual != y.residual) return x.residual < y.residual;
  return lex_less(x.tuple, y.tuple);
}

ParameterTuple greedy_tuple(const BoundarySignal& f, std::size_t n, BasisMode mode,
                            const EngineConfig& engine) {
  EngineConfig config = engine;
  config.max_terms = n;
  const Decomposition d = run_afd(f, mode == BasisMode::TM ? Mode::Core : Mode::Double, config);
  ParameterTuple tuple = d.parameters();
  while (tuple.size() < n) tuple.emplace_back(cplx(0.0), engine.r_max);
  return tuple;
}

}  // namespace

ProjectionResult projection_residual(const BoundarySignal& f, std::span<const DiscParameter> tuple,
                                     BasisMode mode) {
  if (!f.is_analytic()) throw ContractError("projection_residual needs an analytic signal");
  const std::size_t n = f.size();
  const auto z = unit_circle(n);
  const auto x = f.samples();
  const int power = blaschke_power(mode);

  ProjectionResult out;
  out.coefficients.reserve(tuple.size());
  std::vector<cplx> product(n, cplx(1.0));
  double captured = 0.0;
  // Hot loop of the n-best search, written in real arithmetic so no
  // library complex division is involved.
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    const double ar = tuple[k].value().real();
    const double ai = tuple[k].value().imag();
    const double scale = std::sqrt(tuple[k].defect());
    const bool last = k + 1 == tuple.size();
    double acc_r = 0.0, acc_i = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double zr = z[j].real(), zi = z[j].imag();
      // d = 1 - conj(a) z, inv = 1 / d
      const double dr = 1.0 - (ar * zr + ai * zi);
      const double di = -(ar * zi - ai * zr);
      const double m = 1.0 / (dr * dr + di * di);
      const double ir = dr * m, ii = -di * m;
      const double pr = product[j].real(), pi = product[j].imag();
      const double br = scale * (pr * ir - pi * ii);
      const double bi = scale * (pr * ii + pi * ir);
      const double xr = x[j].real(), xi = x[j].imag();
      acc_r += xr * br + xi * bi;
      acc_i += xi * br - xr * bi;
      if (!last) {
        const double nr = zr - ar, ni = zi - ai;
        double phr = nr * ir - ni * ii;
        double phi = nr * ii + ni * ir;
        if (power == 2) {
          const double sr = phr * phr - phi * phi;
          phi = 2.0 * phr * phi;
          phr = sr;
        }
        product[j] = cplx(pr * phr - pi * phi, pr * phi + pi * phr);
      }
    }
    const cplx c = cplx(acc_r, acc_i) / static_cast<double>(n);
    out.coefficients.push_back(c);
    captured += std::norm(c);
  }
  out.residual_energy = f.norm2() - captured;
  return out;
}

std::string origin_name(StartOrigin origin) {
  switch (origin) {
    case StartOrigin::GreedySeed: return "greedy";
    case StartOrigin::TruePeaks: return "true_peaks";
    case StartOrigin::Random: return "random";
  }
  return "unknown";
}

NBestResult optimize_nbest(const BoundarySignal& f, std::size_t n, BasisMode mode,
                           const NBestConfig& config) {
  if (n == 0) throw ContractError("n-best needs n >= 1");
  if (!f.is_analytic()) throw ContractError("n-best needs an analytic signal");
  const double r_max = config.engine.r_max;

  NBestResult result;
  result.greedy_tuple = greedy_tuple(f, n, mode, config.engine);
  result.greedy_residual = projection_residual(f, result.greedy_tuple, mode).residual_energy;

  std::vector<Start> starts;
  starts.push_back({result.greedy_tuple, StartOrigin::GreedySeed});
  const auto seed_u = to_coordinates(result.greedy_tuple, r_max);
  for (std::size_t i = 0; i < seed_u.size(); ++i) {
    auto u = seed_u;
    u[i] += config.perturbation;
    starts.push_back({from_coordinates(u, r_max), StartOrigin::GreedySeed});
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < config.random_starts; ++s) {
    ParameterTuple tuple;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = 0.9 * r_max * std::sqrt(unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      tuple.emplace_back(std::polar(r, theta), r_max);
    }
    starts.push_back({std::move(tuple), StartOrigin::Random});
  }
  for (const auto& extra : config.extra_starts) {
    if (extra.size() != n) {
      throw ContractError("extra n-best start has " + std::to_string(extra.size()) +
                          " entries, expected " + std::to_string(n));
    }
    ParameterTuple tuple;
    for (const auto& p : extra) tuple.emplace_back(p.value(), r_max);
    starts.push_back({std::move(tuple), StartOrigin::TruePeaks});
  }

  const std::size_t budget = config.evals_per_term * n;
  auto cost = [&](const std::vector<double>& u) {
    return projection_residual(f, from_coordinates(u, r_max), mode).residual_energy;
  };
  std::vector<Outcome> outcomes(starts.size());
  auto run_start = [&](std::size_t s) {
    const auto u0 = to_coordinates(starts[s].tuple, r_max);
    const double start_value = cost(u0);
    const auto nm = detail::nelder_mead(cost, u0, 0.25, budget);
    outcomes[s] = {from_coordinates(nm.x, r_max), nm.value, start_value, starts[s].origin};
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(resolve_threads(config.engine),
                                      static_cast<unsigned>(starts.size())));
  if (workers == 1) {
    for (std::size_t s = 0; s < starts.size(); ++s) run_start(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t s = next++; s < starts.size(); s = next++) run_start(s);
      });
    }
  }

  // The raw greedy tuple competes as well, so squashing round-off can never
  // push the answer above the greedy residual.
  Outcome best{result.greedy_tuple, result.greedy_residual, result.greedy_residual,
               StartOrigin::GreedySeed};
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    const auto& o = outcomes[s];
    if (!(o.residual < o.start_residual) || !(o.residual < result.greedy_residual)) {
      ++result.non_improving_starts;
      result.diagnostics.push_back("start " + std::to_string(s) + " (" + origin_name(o.origin) +
                                   ") did not improve on the greedy residual");
    }
    if (better(o, best)) best = o;
  }

  const auto projection = projection_residual(f, best.tuple, mode);
  result.tuple = best.tuple;
  result.coefficients = projection.coefficients;
  result.residual_energy = projection.residual_energy;
  result.best_start_origin = best.origin;
  result.starts_used = starts.size();

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(result.tuple[i].value() - result.tuple[j].value()) <= 1e-10) {
        result.diagnostics.push_back("entries " + std::to_string(i + 1) + " and " +
                                     std::to_string(j + 1) +
                                     " coincide; the effective order is below n");
      }
    }
  }
  return result;
}

}  // namespace dafd
