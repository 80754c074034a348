#include "dafd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "dafd/analysis.hpp"
#include "dafd/experiments.hpp"
#include "dafd/io.hpp"
#include "dafd/nbest.hpp"

namespace dafd {
namespace {

/// A check the verify command failed; maps to the contract exit code.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

struct CommonFlags {
  std::size_t n_samples = 0;
  double r_max = kDefaultRMax;
  std::size_t max_terms = 0;
  std::vector<std::string> modes;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool multi_mode) {
  cmd->add_option("--n-samples", flags.n_samples, "Boundary grid size N")
      ->check(CLI::Range(kMinSamples, std::size_t{1} << 24));
  cmd->add_option("--r-max", flags.r_max, "Largest admissible |a|")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--max-terms", flags.max_terms, "Number of terms")->check(CLI::PositiveNumber);
  auto* mode = cmd->add_option("--mode", flags.modes, "core, double, mono or ho:<k>");
  if (!multi_mode) mode->expected(1);
  cmd->add_option("--tol", flags.tol, "Stop when ||remainder|| / ||f|| reaches this")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", flags.seed, "Seed for random n-best starts");
  cmd->add_option("--out", flags.out, "Output path");
  cmd->add_option("--config", flags.config, "JSON file with engine settings")
      ->check(CLI::ExistingFile);
}

/// Flags override the config file, which overrides the defaults.
EngineConfig engine_config(const CLI::App* cmd, const CommonFlags& flags) {
  EngineConfig config;
  if (!flags.config.empty()) config = engine_config_from_json(read_json(flags.config));
  if (cmd->count("--n-samples")) config.n_samples = flags.n_samples;
  if (cmd->count("--r-max")) config.r_max = flags.r_max;
  if (cmd->count("--max-terms")) config.max_terms = flags.max_terms;
  if (cmd->count("--tol")) config.rel_tol = flags.tol;
  return config;
}

std::pair<Mode, int> cli_mode(const std::string& text) {
  try {
    return parse_mode(text);
  } catch (const ContractError& e) {
    throw CLI::ValidationError("--mode", e.what());
  }
}

std::pair<Mode, int> single_mode(const CommonFlags& flags, const std::string& fallback) {
  return cli_mode(flags.modes.empty() ? fallback : flags.modes.front());
}

void print_trace(std::ostream& out, const ResidualTrace& trace) {
  out << "n,residual_energy,relative_error";
  const bool bounded = !trace.rows.empty() && trace.rows.front().bound.has_value();
  out << (bounded ? ",bound,within_bound\n" : "\n");
  for (const auto& r : trace.rows) {
    out << r.n << ',' << format_double(r.residual_energy) << ',' << format_double(r.relative_error);
    if (bounded) out << ',' << format_double(*r.bound) << ',' << (r.within_bound ? "yes" : "no");
    out << '\n';
  }
}

PreparedSource source_for(const DecompositionFile& file, const std::string& input) {
  SourceDescriptor descriptor = file.source;
  if (!input.empty()) {
    descriptor.kind = "csv";
    descriptor.path = input;
  }
  return prepare_source(descriptor, file.decomposition.config.n_samples);
}

int cmd_experiment(const CLI::App* cmd, const CommonFlags& flags, const std::string& name,
                   const std::string& input, std::size_t nbest_max, std::ostream& out) {
  ExperimentSpec spec;
  spec.name = name;
  spec.input = input;
  spec.config = engine_config(cmd, flags);
  spec.n_max = spec.config.max_terms;
  spec.seed = flags.seed;
  spec.out = flags.out.empty() ? "out" : flags.out;
  spec.resample_input = cmd->count("--n-samples") > 0;
  spec.nbest_max = nbest_max;
  if (!flags.modes.empty()) {
    spec.modes.clear();
    for (const auto& m : flags.modes) spec.modes.push_back(cli_mode(m));
  }
  const auto outcome = run_experiment(spec);
  out << outcome.summary;
  for (const auto& p : outcome.files) out << "wrote " << p.string() << '\n';
  for (const auto& run : outcome.modes) {
    if (!run.energy.ok()) {
      throw VerificationFailure(run.mode + ": energy identity defect " +
                                format_double(run.energy.defect));
    }
  }
  return kExitOk;
}

int cmd_decompose(const CLI::App* cmd, const CommonFlags& flags, const std::string& input,
                  std::ostream& out) {
  EngineConfig config = engine_config(cmd, flags);
  const auto [mode, order] = single_mode(flags, "double");
  SourceDescriptor descriptor;
  descriptor.kind = "csv";
  descriptor.path = input;
  const auto source = prepare_source(descriptor, cmd->count("--n-samples") ? config.n_samples : 0);
  config.n_samples = source.analytic.size();
  DecompositionFile file{kSchemaVersion, source.descriptor,
                         decompose(source.analytic, mode, order, config)};
  const std::string path = flags.out.empty() ? "decomposition.json" : flags.out;
  save_decomposition(path, file);
  print_trace(out, rate_bound_check(source.analytic, file.decomposition));
  for (const auto& g : file.decomposition.diagnostics) {
    out << "# term " << g.term << ' ' << g.kind << ": " << g.message << '\n';
  }
  out << "wrote " << path << '\n';
  return kExitOk;
}

int cmd_nbest(const CLI::App* cmd, const CommonFlags& flags, const std::string& input,
              const std::string& example, std::size_t n, std::size_t random_starts,
              bool true_start, std::ostream& out) {
  EngineConfig config = engine_config(cmd, flags);
  const auto [mode, order] = single_mode(flags, "double");
  if (mode != Mode::Core && mode != Mode::Double) {
    throw CLI::ValidationError("--mode", "n-best supports core (TM) or double (D-TM)");
  }
  const BasisMode basis = mode == Mode::Core ? BasisMode::TM : BasisMode::DTM;
  SourceDescriptor descriptor;
  if (!input.empty()) {
    descriptor.kind = "csv";
    descriptor.path = input;
  } else {
    descriptor.kind = example;
  }
  const bool csv = descriptor.kind == "csv";
  const auto source = prepare_source(descriptor, csv && !cmd->count("--n-samples") ? 0 : config.n_samples);
  config.n_samples = source.analytic.size();

  NBestConfig nb;
  nb.engine = config;
  nb.seed = flags.seed;
  nb.random_starts = random_starts;
  if (true_start) {
    if (descriptor.kind != "ex2" || n != example2_parameters().size()) {
      throw CLI::ValidationError("--true-start", "needs --example ex2 and --n 5");
    }
    ParameterTuple truth;
    for (const auto& p : example2_parameters()) truth.emplace_back(p, config.r_max);
    nb.extra_starts.push_back(std::move(truth));
  }
  const auto r = optimize_nbest(source.analytic, n, basis, nb);

  nlohmann::json j;
  j["basis"] = basis == BasisMode::TM ? "tm" : "dtm";
  j["n"] = n;
  j["N"] = config.n_samples;
  j["residual_energy"] = r.residual_energy;
  j["greedy_residual"] = r.greedy_residual;
  j["source_norm2"] = source.analytic.norm2();
  j["starts_used"] = r.starts_used;
  j["best_start_origin"] = origin_name(r.best_start_origin);
  j["non_improving_starts"] = r.non_improving_starts;
  j["tuple"] = nlohmann::json::array();
  for (std::size_t k = 0; k < r.tuple.size(); ++k) {
    j["tuple"].push_back({{"re_a", r.tuple[k].value().real()},
                          {"im_a", r.tuple[k].value().imag()},
                          {"re_c", r.coefficients[k].real()},
                          {"im_c", r.coefficients[k].imag()}});
  }
  j["diagnostics"] = r.diagnostics;
  const std::string path = flags.out.empty() ? "nbest.json" : flags.out;
  write_json(path, j);

  out << "basis " << j["basis"].get<std::string>() << " n=" << n
      << " residual=" << format_double(r.residual_energy)
      << " greedy=" << format_double(r.greedy_residual)
      << " origin=" << origin_name(r.best_start_origin) << " starts=" << r.starts_used << '\n';
  for (std::size_t k = 0; k < r.tuple.size(); ++k) {
    out << "a" << k + 1 << " = " << format_double(r.tuple[k].value().real()) << ' '
        << format_double(r.tuple[k].value().imag()) << '\n';
  }
  out << "wrote " << path << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& file_path, const std::string& input, std::ostream& out) {
  const auto file = load_decomposition(file_path);
  const auto& d = file.decomposition;
  const auto source = source_for(file, input);
  const BoundarySignal& f = source.analytic;
  if (f.size() != d.config.n_samples) throw DimensionError("source and decomposition grids differ");
  const double norm = f.norm();
  std::vector<std::string> failures;

  const auto energy = energy_identity_check(f, d);
  out << "energy_identity defect=" << format_double(energy.defect)
      << " tolerance=" << format_double(energy.tolerance) << (energy.ok() ? " ok" : " FAIL")
      << '\n';
  if (!energy.ok()) failures.push_back("energy identity");

  const auto interp = verify_interpolation(f, d, d.terms.size());
  const bool values_ok = interp.max_value_error <= 1e-7 * norm;
  const bool derivs_ok = interp.max_derivative_error <= 1e-5 * norm;
  out << "interpolation max_value_error=" << format_double(interp.max_value_error / norm)
      << " max_derivative_error=" << format_double(interp.max_derivative_error / norm)
      << " (relative to ||f||)" << (values_ok && derivs_ok ? " ok" : " FAIL") << '\n';
  if (!values_ok) failures.push_back("value interpolation");
  if (!derivs_ok) failures.push_back("derivative interpolation");

  const auto remainders = replay_remainders(f, d);
  double replay_gap = 0.0;
  double leakage = 0.0;
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    leakage += d.terms[k].leakage;
    replay_gap = std::max(replay_gap,
                          std::abs(remainders[k + 1].norm2() - d.terms[k].residual_energy_after));
  }
  const double total = std::max(f.norm2(), 1e-300);
  const bool replay_ok = replay_gap <= 1e-8 * total + leakage;
  out << "replay max_residual_gap=" << format_double(replay_gap / total)
      << (replay_ok ? " ok" : " FAIL") << '\n';
  if (!replay_ok) failures.push_back("residual replay");

  if (!source.real_samples.empty() && (d.mode == Mode::Double || d.mode == Mode::MonoComponent)) {
    out << "zero_crossings (reported, not asserted):";
    for (std::size_t n = 1; n <= std::min<std::size_t>(d.terms.size(), 8); ++n) {
      out << ' ' << n << ':' << zero_crossing_count(source.real_samples, d, n);
    }
    out << '\n';
  }
  if (!failures.empty()) {
    std::string message = "verification failed:";
    for (const auto& f_name : failures) message += " " + f_name + ";";
    throw VerificationFailure(message);
  }
  out << "verify ok\n";
  return kExitOk;
}

int cmd_analyze(const std::string& file_path, const std::string& input, std::optional<double> m,
                const std::string& out_dir, std::ostream& out) {
  const auto file = load_decomposition(file_path);
  const auto& d = file.decomposition;
  const auto source = source_for(file, input);
  const BoundarySignal& f = source.analytic;
  if (!m && file.source.kind == "ex2" && input.empty()) m = example2_bound();
  const auto trace = rate_bound_check(f, d, m);
  print_trace(out, trace);

  const auto interp = verify_interpolation(f, d, d.terms.size());
  out << "k,re_a,im_a,value_error,derivative_error\n";
  std::vector<std::vector<std::string>> interp_rows;
  for (std::size_t k = 0; k < interp.rows.size(); ++k) {
    const auto& r = interp.rows[k];
    interp_rows.push_back({std::to_string(k + 1), format_double(r.a.value().real()),
                           format_double(r.a.value().imag()), format_double(r.value_error),
                           format_double(r.derivative_error)});
    out << interp_rows.back()[0];
    for (std::size_t c = 1; c < interp_rows.back().size(); ++c) out << ',' << interp_rows.back()[c];
    out << '\n';
  }

  std::vector<std::vector<std::string>> zero_rows;
  if (!source.real_samples.empty()) {
    out << "n,zero_crossings\n";
    for (std::size_t n = 0; n <= d.terms.size(); ++n) {
      const auto count = zero_crossing_count(source.real_samples, d, n);
      zero_rows.push_back({std::to_string(n), std::to_string(count)});
      out << n << ',' << count << '\n';
    }
  }

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    const std::filesystem::path dir(out_dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : trace.rows) {
      rows.push_back({std::to_string(r.n), format_double(r.residual_energy),
                      format_double(r.relative_error), r.bound ? format_double(*r.bound) : ""});
    }
    write_csv(dir / "residual_trace.csv", {"n", "residual_energy", "relative_error", "bound"}, rows);
    write_csv(dir / "interpolation.csv", {"k", "re_a", "im_a", "value_error", "derivative_error"},
              interp_rows);
    if (!zero_rows.empty()) write_csv(dir / "zero_crossings.csv", {"n", "zero_crossings"}, zero_rows);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive Fourier decomposition in the Hardy space of the disc", "dafd"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string name, input, example = "ex2", decomposition;
  std::size_t nbest_max = 0, n = 1, random_starts = 8;
  bool true_start = false;
  double bound = 0.0;

  auto* experiment = app.add_subcommand("experiment", "Run ex1, ex2 or a custom CSV and write tables");
  experiment->add_option("name", name, "ex1, ex2 or custom")
      ->required()
      ->check(CLI::IsMember({"ex1", "ex2", "custom"}));
  experiment->add_option("--input", input, "CSV for the custom experiment");
  experiment->add_option("--nbest-max", nbest_max, "Also run n-best for n = 1..k");
  add_common(experiment, flags, true);

  auto* decompose_cmd = app.add_subcommand("decompose", "Decompose a real CSV signal");
  decompose_cmd->add_option("--input", input, "CSV: one value column or t,value")->required();
  add_common(decompose_cmd, flags, false);

  auto* nbest = app.add_subcommand("nbest", "Multi-start n-best approximation");
  auto* nbest_input = nbest->add_option("--input", input, "Real CSV signal");
  nbest->add_option("--example", example, "ex1 or ex2 when no input is given")
      ->check(CLI::IsMember({"ex1", "ex2"}))
      ->excludes(nbest_input);
  nbest->add_option("--n", n, "Tuple length")->required()->check(CLI::PositiveNumber);
  nbest->add_option("--random-starts", random_starts, "Random tuples tried");
  nbest->add_flag("--true-start", true_start, "Add the generating parameters of ex2 as a start");
  add_common(nbest, flags, false);

  auto* verify = app.add_subcommand("verify", "Check a decomposition file against its source");
  verify->add_option("decomposition", decomposition, "Decomposition JSON")->required();
  verify->add_option("--input", input, "CSV overriding the recorded source");

  auto* analyze = app.add_subcommand("analyze", "Residual, interpolation and zero-crossing tables");
  analyze->add_option("decomposition", decomposition, "Decomposition JSON")->required();
  analyze->add_option("--input", input, "CSV overriding the recorded source");
  analyze->add_option("--bound", bound, "Class bound M for the M / sqrt(n) check");
  analyze->add_option("--out", flags.out, "Directory for CSV tables");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*experiment) return cmd_experiment(experiment, flags, name, input, nbest_max, out);
    if (*decompose_cmd) return cmd_decompose(decompose_cmd, flags, input, out);
    if (*nbest) {
      return cmd_nbest(nbest, flags, input, example, n, random_starts, true_start, out);
    }
    if (*verify) return cmd_verify(decomposition, input, out);
    if (*analyze) {
      return cmd_analyze(decomposition, input,
                         analyze->count("--bound") ? std::optional<double>(bound) : std::nullopt,
                         flags.out, out);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitUsage;
}

}  // namespace dafd
