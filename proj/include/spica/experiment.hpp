#pragma once

// Config-driven experiment runner. One JSON config describes one run; the
// runner produces CSV tables plus a manifest and never touches the
// filesystem itself (see write_outputs).

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "spica/array.hpp"

namespace spica {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kOutputDirEnv = "SPICA_OUTPUT_DIR";

enum class Experiment { PsLeakage, TtdToneSweep, TtdModulated, DesiredGain, QpskEvm, PlanClock };

[[nodiscard]] const char* experiment_name(Experiment e);

/// Invalid configuration. `field` is the dotted JSON path of the offending value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::TtdToneSweep;
  std::string label = "custom";

  // scene
  int n_elements = 4;
  double carrier_hz = 10e9;
  double spacing_over_lambda = 0.5;
  SynthesisMode mode = SynthesisMode::BbDirect;
  double desired_aoa_deg = 0.0;
  std::optional<double> desired_delay_s;
  std::vector<double> undesired_delays_s;  ///< each entry is one sweep point
  std::vector<double> undesired_aoas_deg;  ///< used when no delays are given
  std::vector<Complex> mismatch;

  // stimulus
  std::vector<double> tones_hz;
  std::vector<int> element_counts{4, 16, 64};  ///< PS_LEAKAGE only
  double band_fraction = 0.2;
  int band_points = 201;
  bool theory_only = false;  ///< DESIRED_GAIN over a fractional band, no sampling
  double interferer_symbol_rate_hz = 64e6;
  double interferer_rel_db = 0.0;
  double desired_bit_rate = 4e6;
  double rolloff = 0.25;
  int span_symbols = 16;
  std::uint64_t symbol_seed = 1;

  // planner and sampling
  bool quantize = true;
  bool extrapolate_interleave = false;
  double sample_rate = 200e6;
  int frame_length = 4096;
  int nfft = 4096;

  // noise
  double noise_rms = 0.0;
  std::optional<std::uint64_t> seed;

  // PLAN_CLOCK
  std::vector<double> plan_targets_s;

  std::string output_dir = "spica_out";

  /// Range-checks every field; throws ConfigError naming the first bad one.
  void validate() const;
  /// Delay sweep points resolved from delays or angles.
  [[nodiscard]] std::vector<double> resolved_undesired_delays() const;
  [[nodiscard]] ArrayGeometry geometry() const;
};

[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& c);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

[[nodiscard]] std::vector<std::string> preset_names();
/// Canonical configuration for a figure; throws ConfigError listing the
/// known names when `name` is unknown.
[[nodiscard]] ExperimentConfig preset(const std::string& name);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::string to_string() const;
};

struct RunResult {
  std::map<std::string, CsvTable> tables;  ///< file name -> table
  nlohmann::json manifest;
  std::string status = "ok";
};

/// Deterministic for a fixed config (including seed).
[[nodiscard]] RunResult run(const ExperimentConfig& config);

/// Writes every table and manifest.json under `dir`. Returns written paths.
std::vector<std::string> write_outputs(const RunResult& result, const std::string& dir);

/// Shortest round-trip text for a double ("inf", "-inf", "nan" for non-finite).
[[nodiscard]] std::string format_number(double v);

}  // namespace spica
