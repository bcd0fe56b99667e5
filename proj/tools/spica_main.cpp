// spica: experiment runner for the array interference-cancellation simulator.
//
//   spica run <config.json>
//   spica preset <name> [--emit-config path]
//   spica plan <delay_seconds>
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "spica/experiment.hpp"
#include "spica/ttd_spica.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string output_dir_for(const spica::ExperimentConfig& c) {
  if (const char* env = std::getenv(spica::kOutputDirEnv); env && *env) return env;
  return c.output_dir;
}

int execute(const spica::ExperimentConfig& config) {
  const spica::RunResult result = spica::run(config);
  const auto files = spica::write_outputs(result, output_dir_for(config));
  std::cout << spica::experiment_name(config.experiment) << " (" << config.label << "): " << result.status << "\n";
  for (const auto& f : files) std::cout << "  wrote " << f << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial interference cancellation simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("config", config_path, "Path to config.json")->required();

  std::string preset_name;
  std::string emit_path;
  bool list_presets = false;
  auto* preset_cmd = app.add_subcommand("preset", "Run a figure preset, or write its config with --emit-config");
  preset_cmd->add_option("name", preset_name, "Preset name");
  preset_cmd->add_option("--emit-config", emit_path, "Write the preset config here instead of running it");
  preset_cmd->add_flag("--list", list_presets, "List preset names");

  double delay_s = 0.0;
  bool extrapolate = false;
  int n_elements = 4;
  auto* plan_cmd = app.add_subcommand("plan", "Decompose a delay into a clock configuration");
  plan_cmd->add_option("delay_seconds", delay_s, "Target delay in seconds")->required();
  plan_cmd->add_flag("--extrapolate", extrapolate, "Allow interleaver offsets beyond 2 (arrays > 4 elements)");
  plan_cmd->add_option("--elements", n_elements, "Array size used with --extrapolate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return execute(spica::load_config(config_path));

    if (*preset_cmd) {
      if (list_presets) {
        for (const auto& n : spica::preset_names()) std::cout << n << "\n";
        return kExitOk;
      }
      if (preset_name.empty()) throw spica::ConfigError("preset", "missing preset name");
      const auto config = spica::preset(preset_name);
      if (!emit_path.empty()) {
        std::ofstream os(emit_path);
        os << spica::config_to_json(config).dump(2) << "\n";
        if (!os) throw std::runtime_error("failed writing " + emit_path);
        std::cout << "wrote " << emit_path << "\n";
        return kExitOk;
      }
      return execute(config);
    }

    if (*plan_cmd) {
      const int limit = extrapolate ? spica::interleave_limit_for(n_elements) : spica::kDefaultMaxInterleaveOffset;
      spica::ClockConfig c;
      try {
        c = spica::plan_delay(delay_s, limit);
      } catch (const std::out_of_range& e) {
        throw spica::ConfigError("delay_seconds", e.what());
      }
      const double planned = spica::config_total_delay(c);
      std::cout << "target_s," << spica::format_number(delay_s) << "\n"
                << "interleave_offset," << c.interleave_offset << "\n"
                << "quadrant," << spica::quadrant_name(c.quadrant) << "\n"
                << "pi_code," << c.pi_code << "\n"
                << "planned_s," << spica::format_number(planned) << "\n"
                << "error_s," << spica::format_number(planned - delay_s) << "\n";
      return kExitOk;
    }
  } catch (const spica::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
