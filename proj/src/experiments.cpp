#include "dafd/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dafd/nbest.hpp"

namespace dafd {
namespace {

std::vector<std::string> cells(std::initializer_list<double> values) {
  std::vector<std::string> out;
  for (double v : values) out.push_back(format_double(v));
  return out;
}

}  // namespace

double example1_value(double t) {
  const double pi = std::numbers::pi;
  if (t <= pi) return std::sin(4.0 * t) - t / 4.0;
  return std::sin(4.0 * t) + (t - pi) / 2.0 - t / 4.0;
}

std::vector<double> example1_samples(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = example1_value(grid_angle(j, n));
  return x;
}

std::vector<cplx> example2_parameters() {
  return {{0.20, 0.20}, {0.55, -0.15}, {-0.30, 0.40}, {0.75, 0.05}, {-0.10, -0.60}};
}

std::vector<cplx> example2_coefficients() { return {1.0, -0.7, 0.4, 0.9, -0.5}; }

BoundarySignal kernel_combination(const std::vector<cplx>& parameters,
                                  const std::vector<cplx>& coefficients, std::size_t n) {
  if (parameters.size() != coefficients.size()) {
    throw DimensionError("one coefficient per kernel parameter needed");
  }
  const auto z = unit_circle(n);
  std::vector<cplx> samples(n);
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    const cplx abar = std::conj(DiscParameter(parameters[k]).value());
    for (std::size_t j = 0; j < n; ++j) samples[j] += coefficients[k] / (1.0 - abar * z[j]);
  }
  return BoundarySignal::analytic_from_samples(std::move(samples));
}

BoundarySignal example2_signal(std::size_t n) {
  return kernel_combination(example2_parameters(), example2_coefficients(), n);
}

double example2_bound() {
  std::vector<DiscParameter> a;
  for (const auto& p : example2_parameters()) a.emplace_back(p);
  const auto c = example2_coefficients();
  return hardy_class_bound(a, c);
}

PreparedSource prepare_source(const SourceDescriptor& descriptor, std::size_t n) {
  PreparedSource out{BoundarySignal::zero(std::max(n, kMinSamples)), {}, descriptor};
  std::vector<double> real;
  if (descriptor.kind == "ex1") {
    real = example1_samples(n);
  } else if (descriptor.kind == "ex2") {
    out.descriptor.kernel_parameters = example2_parameters();
    out.descriptor.kernel_coefficients = example2_coefficients();
    out.descriptor.real_input = false;
    out.analytic = example2_signal(n);
    return out;
  } else if (descriptor.kind == "csv") {
    real = read_signal_csv(descriptor.path).values;
    if (n != 0 && n != real.size()) real = resample_real(real, n);
  } else {
    throw ContractError("source kind '" + descriptor.kind + "' cannot be rebuilt");
  }
  if (real.size() < kMinSamples) {
    throw DimensionError("at least " + std::to_string(kMinSamples) + " samples required");
  }
  auto projection = project_real(real);
  out.analytic = std::move(projection.analytic);
  out.real_samples = std::move(real);
  out.descriptor.real_input = true;
  out.descriptor.c0 = projection.c0;
  return out;
}

std::string mode_slug(Mode mode, int ho_order) {
  std::string name = mode_name(mode, ho_order);
  std::erase(name, ':');
  return name;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
  SourceDescriptor descriptor;
  std::size_t n = spec.config.n_samples;
  if (spec.name == "ex1" || spec.name == "ex2") {
    descriptor.kind = spec.name;
  } else if (spec.name == "custom") {
    if (spec.input.empty()) throw ContractError("custom experiment needs an input CSV");
    descriptor.kind = "csv";
    descriptor.path = spec.input.string();
    if (!spec.resample_input) n = 0;
  } else {
    throw ContractError("unknown experiment '" + spec.name + "' (expected ex1, ex2 or custom)");
  }

  ExperimentOutcome outcome{prepare_source(descriptor, n), {}, {}, {}, {}};
  const BoundarySignal& f = outcome.source.analytic;
  EngineConfig config = spec.config;
  config.n_samples = f.size();
  config.max_terms = spec.n_max;

  std::error_code ec;
  std::filesystem::create_directories(spec.out, ec);
  if (ec) throw IoError("cannot create " + spec.out.string() + ": " + ec.message());
  auto path = [&](const std::string& name) {
    outcome.files.push_back(spec.out / name);
    return outcome.files.back();
  };

  {
    std::vector<std::vector<std::string>> rows;
    const auto samples = f.samples();
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double t = grid_angle(j, f.size());
      if (outcome.source.real_samples.empty()) {
        rows.push_back(cells({t, samples[j].real(), samples[j].imag()}));
      } else {
        rows.push_back(cells({t, outcome.source.real_samples[j]}));
      }
    }
    if (outcome.source.real_samples.empty()) {
      write_csv(path("input.csv"), {"t", "re", "im"}, rows);
    } else {
      write_csv(path("input.csv"), {"t", "value"}, rows);
    }
  }

  const std::optional<double> bound =
      descriptor.kind == "ex2" ? std::optional<double>(example2_bound()) : std::nullopt;
  for (const auto& [mode, order] : spec.modes) {
    ModeOutcome run;
    run.mode = mode_name(mode, order);
    run.decomposition = decompose(f, mode, order, config);
    run.energy = energy_identity_check(f, run.decomposition);
    const auto& d = run.decomposition;
    const std::string slug = mode_slug(mode, order);

    const auto trace = rate_bound_check(f, d, bound);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : trace.rows) {
      rows.push_back({std::to_string(r.n), format_double(r.residual_energy),
                      format_double(r.relative_error),
                      format_double(d.terms[r.n - 1].residual_energy_after),
                      format_double(d.terms[r.n - 1].leakage),
                      r.bound ? format_double(*r.bound) : std::string()});
    }
    write_csv(path("residual_" + slug + ".csv"),
              {"n", "residual_energy", "relative_error", "reduced_residual_energy", "leakage",
               "bound"},
              rows);

    rows.clear();
    for (std::size_t k = 0; k < d.terms.size(); ++k) {
      const auto& t = d.terms[k];
      rows.push_back({std::to_string(k + 1), format_double(t.a.value().real()),
                      format_double(t.a.value().imag()), format_double(t.a.modulus()),
                      format_double(t.c.real()), format_double(t.c.imag())});
    }
    write_csv(path("parameters_" + slug + ".csv"), {"k", "re_a", "im_a", "abs_a", "re_c", "im_c"},
              rows);

    save_decomposition(path("decomposition_" + slug + ".json"),
                       {kSchemaVersion, outcome.source.descriptor, d});
    const auto decay = decay_rows(d, spec.n_max);
    outcome.decay.insert(outcome.decay.end(), decay.begin(), decay.end());
    outcome.modes.push_back(std::move(run));
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : outcome.decay) {
      rows.push_back({std::to_string(r.n), r.mode, format_double(r.relative_error)});
    }
    write_csv(path("error_decay.csv"), {"n", "mode", "relative_error"}, rows);
  }

  std::ostringstream summary;
  summary << "source " << descriptor.kind << (descriptor.path.empty() ? "" : " " + descriptor.path)
          << " N=" << f.size() << " norm2=" << format_double(f.norm2()) << '\n';
  for (const auto& run : outcome.modes) {
    const auto& d = run.decomposition;
    summary << run.mode << ": terms=" << d.terms.size()
            << " relative_error=" << format_double(std::sqrt(std::max(0.0, d.final_residual_energy()) / f.norm2()))
            << " energy_defect=" << format_double(run.energy.defect)
            << " exact=" << (d.exact ? "yes" : "no") << " diagnostics=" << d.diagnostics.size()
            << '\n';
  }
  auto error_at = [&](const std::string& mode, std::size_t n) -> std::optional<double> {
    for (const auto& r : outcome.decay) {
      if (r.mode == mode && r.n == n) return r.relative_error;
    }
    return std::nullopt;
  };
  for (const auto& [dn, cn] : {std::pair<std::size_t, std::size_t>{6, 12}, {8, 16}, {10, 20}}) {
    const auto de = error_at("double", dn);
    const auto ce = error_at("core", cn);
    if (de && ce) {
      summary << "double@" << dn << "=" << format_double(*de) << " core@" << cn << "="
              << format_double(*ce) << " ratio=" << format_double(*de / *ce) << '\n';
    }
  }

  if (spec.nbest_max > 0) {
    NBestConfig nb;
    nb.engine = config;
    nb.seed = spec.seed;
    std::vector<std::vector<std::string>> rows;
    for (const BasisMode basis : {BasisMode::TM, BasisMode::DTM}) {
      for (std::size_t k = 1; k <= spec.nbest_max; ++k) {
        nb.extra_starts.clear();
        if (descriptor.kind == "ex2" && k == example2_parameters().size()) {
          ParameterTuple truth;
          for (const auto& p : example2_parameters()) truth.emplace_back(p, config.r_max);
          nb.extra_starts.push_back(std::move(truth));
        }
        const auto r = optimize_nbest(f, k, basis, nb);
        rows.push_back({std::to_string(k), basis == BasisMode::TM ? "tm" : "dtm",
                        format_double(r.greedy_residual), format_double(r.residual_energy),
                        origin_name(r.best_start_origin), std::to_string(r.starts_used),
                        std::to_string(r.non_improving_starts)});
        summary << "nbest " << (basis == BasisMode::TM ? "tm" : "dtm") << " n=" << k
                << " greedy=" << format_double(r.greedy_residual)
                << " best=" << format_double(r.residual_energy) << '\n';
      }
    }
    write_csv(path("nbest.csv"),
              {"n", "basis", "greedy_residual", "nbest_residual", "best_start_origin",
               "starts_used", "non_improving_starts"},
              rows);
  }

  outcome.summary = summary.str();
  {
    std::ofstream out(path("summary.txt"));
    out << outcome.summary;
    if (!out) throw IoError("cannot write " + (spec.out / "summary.txt").string());
  }
  return outcome;
}

}  // namespace dafd
