#include "dafd/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dafd {
namespace {

using nlohmann::json;

json complex_list(const std::vector<cplx>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back({v.real(), v.imag()});
  return out;
}

std::vector<cplx> complex_list_from(const json& j) {
  std::vector<cplx> out;
  for (const auto& v : j) out.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  return out;
}

bool parse_number(const std::string& text, double& out) {
  const char* begin = text.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  if (*begin == '\0') return false;
  char* end = nullptr;
  out = std::strtod(begin, &end);
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0' && std::isfinite(out);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

json to_json(const EngineConfig& c) {
  return {{"n_samples", c.n_samples},         {"r_max", c.r_max},
          {"grid_radii", c.grid_radii},       {"grid_angles", c.grid_angles},
          {"newton_max_iter", c.newton_max_iter}, {"newton_tol", c.newton_tol},
          {"refine_tol", c.refine_tol},       {"leak_tol", c.leak_tol},
          {"condition_tol", c.condition_tol}, {"max_terms", c.max_terms},
          {"rel_tol", c.rel_tol},             {"threads", c.threads}};
}

EngineConfig engine_config_from_json(const json& j, EngineConfig base) {
  if (!j.is_object()) throw SchemaError("engine config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_samples") base.n_samples = value.get<std::size_t>();
      else if (key == "r_max") base.r_max = value.get<double>();
      else if (key == "grid_radii") base.grid_radii = value.get<std::size_t>();
      else if (key == "grid_angles") base.grid_angles = value.get<std::size_t>();
      else if (key == "newton_max_iter") base.newton_max_iter = value.get<int>();
      else if (key == "newton_tol") base.newton_tol = value.get<double>();
      else if (key == "refine_tol") base.refine_tol = value.get<double>();
      else if (key == "leak_tol") base.leak_tol = value.get<double>();
      else if (key == "condition_tol") base.condition_tol = value.get<double>();
      else if (key == "max_terms") base.max_terms = value.get<std::size_t>();
      else if (key == "rel_tol") base.rel_tol = value.get<double>();
      else if (key == "threads") base.threads = value.get<unsigned>();
      else throw SchemaError("unknown engine config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed engine config: ") + e.what());
  }
  return base;
}

json to_json(const DecompositionFile& file) {
  const Decomposition& d = file.decomposition;
  json terms = json::array();
  for (const auto& t : d.terms) {
    terms.push_back({{"re_a", t.a.value().real()},
                     {"im_a", t.a.value().imag()},
                     {"re_c", t.c.real()},
                     {"im_c", t.c.imag()},
                     {"residual_energy_after", t.residual_energy_after},
                     {"leakage", t.leakage}});
  }
  json diagnostics = json::array();
  for (const auto& g : d.diagnostics) {
    diagnostics.push_back({{"term", g.term}, {"kind", g.kind}, {"message", g.message}});
  }
  const auto& s = file.source;
  return {{"schema_version", file.schema_version},
          {"mode", mode_name(d.mode, d.ho_order)},
          {"N", d.config.n_samples},
          {"exact", d.exact},
          {"source_norm2", d.source_norm2},
          {"source",
           {{"kind", s.kind},
            {"path", s.path},
            {"real_input", s.real_input},
            {"c0", s.c0},
            {"kernel_parameters", complex_list(s.kernel_parameters)},
            {"kernel_coefficients", complex_list(s.kernel_coefficients)}}},
          {"config", to_json(d.config)},
          {"terms", terms},
          {"diagnostics", diagnostics}};
}

DecompositionFile decomposition_file_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw SchemaError("not a decomposition file: schema_version missing");
  }
  DecompositionFile file;
  try {
    file.schema_version = j.at("schema_version").get<int>();
    if (file.schema_version != kSchemaVersion) {
      throw SchemaError("decomposition schema version " + std::to_string(file.schema_version) +
                        " is not supported (expected " + std::to_string(kSchemaVersion) + ")");
    }
    Decomposition& d = file.decomposition;
    try {
      std::tie(d.mode, d.ho_order) = parse_mode(j.at("mode").get<std::string>());
    } catch (const ContractError& e) {
      throw SchemaError(e.what());
    }
    d.config = engine_config_from_json(j.at("config"));
    if (j.at("N").get<std::size_t>() != d.config.n_samples) {
      throw SchemaError("N disagrees with config.n_samples");
    }
    d.exact = j.at("exact").get<bool>();
    d.source_norm2 = j.at("source_norm2").get<double>();
    for (const auto& t : j.at("terms")) {
      DecompositionTerm term;
      term.a = DiscParameter(t.at("re_a").get<double>(), t.at("im_a").get<double>(), d.config.r_max);
      term.c = cplx(t.at("re_c").get<double>(), t.at("im_c").get<double>());
      term.residual_energy_after = t.at("residual_energy_after").get<double>();
      term.leakage = t.at("leakage").get<double>();
      d.terms.push_back(term);
    }
    for (const auto& g : j.at("diagnostics")) {
      d.diagnostics.push_back({g.at("term").get<std::size_t>(), g.at("kind").get<std::string>(),
                               g.at("message").get<std::string>()});
    }
    const json& s = j.at("source");
    file.source.kind = s.at("kind").get<std::string>();
    file.source.path = s.at("path").get<std::string>();
    file.source.real_input = s.at("real_input").get<bool>();
    file.source.c0 = s.at("c0").get<double>();
    file.source.kernel_parameters = complex_list_from(s.at("kernel_parameters"));
    file.source.kernel_coefficients = complex_list_from(s.at("kernel_coefficients"));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed decomposition file: ") + e.what());
  }
  return file;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void save_decomposition(const std::filesystem::path& path, const DecompositionFile& file) {
  write_json(path, to_json(file));
}

DecompositionFile load_decomposition(const std::filesystem::path& path) {
  try {
    return decomposition_file_from_json(read_json(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

CsvSignal read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = split(line);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& cell : cells) {
      double v = 0.0;
      if (!parse_number(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": not a number row");
    }
    if (row.size() != 1 && row.size() != 2) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected one or two columns, found " + std::to_string(row.size()));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": column count changed");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < kMinSamples) {
    throw IoError(path.string() + ": " + std::to_string(rows.size()) +
                  " samples, at least " + std::to_string(kMinSamples) + " required");
  }
  CsvSignal signal;
  signal.values.reserve(rows.size());
  if (rows.front().size() == 1) {
    for (const auto& r : rows) signal.values.push_back(r[0]);
    return signal;
  }
  const double step = (rows.back()[0] - rows.front()[0]) / static_cast<double>(rows.size() - 1);
  if (!(step > 0.0)) throw IoError(path.string() + ": t column must increase");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dt = rows[i][0] - rows[i - 1][0];
    if (std::abs(dt - step) > 1e-9 * step) {
      throw IoError(path.string() + ": non-uniform grid at row " + std::to_string(i + 1) +
                    " (step " + format_double(dt) + " vs mean " + format_double(step) + ")");
    }
  }
  for (const auto& r : rows) signal.values.push_back(r[1]);
  signal.spacing = step;
  return signal;
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace dafd
