#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dafd/engine.hpp"

namespace dafd {

inline constexpr int kSchemaVersion = 1;

/// Where the decomposed signal came from, enough to rebuild it.
struct SourceDescriptor {
  std::string kind;  // "ex1", "ex2", "csv" or "library"
  std::string path;  // CSV path for kind "csv"
  bool real_input = false;
  double c0 = 0.0;   // mean removed by the real projection
  /// Kernel combination f = Σ c_k / (1 - conj(a_k) z), for kind "ex2".
  std::vector<cplx> kernel_parameters;
  std::vector<cplx> kernel_coefficients;

  friend bool operator==(const SourceDescriptor&, const SourceDescriptor&) = default;
};

struct DecompositionFile {
  int schema_version = kSchemaVersion;
  SourceDescriptor source;
  Decomposition decomposition;
};

[[nodiscard]] nlohmann::json to_json(const EngineConfig& config);
/// Overlays the keys present in j onto base; unknown keys are a SchemaError.
[[nodiscard]] EngineConfig engine_config_from_json(const nlohmann::json& j, EngineConfig base = {});

[[nodiscard]] nlohmann::json to_json(const DecompositionFile& file);
[[nodiscard]] DecompositionFile decomposition_file_from_json(const nlohmann::json& j);

/// Doubles are written in shortest round-trip form, so save then load
/// reproduces every term bit for bit.
void save_decomposition(const std::filesystem::path& path, const DecompositionFile& file);
[[nodiscard]] DecompositionFile load_decomposition(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// A real signal read from CSV: one value column, or (t, value) on a uniform
/// grid. A non-numeric first line is taken as a header.
struct CsvSignal {
  std::vector<double> values;
  std::optional<double> spacing;  // grid step when a t column was present
};

/// Rejects fewer than 64 samples and t columns whose steps deviate from the
/// mean step by more than 1e-9 relative.
[[nodiscard]] CsvSignal read_signal_csv(const std::filesystem::path& path);

/// 17 significant digits, "%.17g".
[[nodiscard]] std::string format_double(double value);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace dafd
