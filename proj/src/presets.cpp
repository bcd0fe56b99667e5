#include "spica/experiment.hpp"

namespace spica {

namespace {

std::vector<double> tone_grid_mhz(int first, int last) {
  std::vector<double> out;
  for (int f = first; f <= last; ++f) out.push_back(f * 1e6);
  return out;
}

// Carrier frequency for RF_DERIVED presets. The prototype is baseband-only,
// so this is a placeholder rather than a measured operating point.
constexpr double kPlaceholderCarrierHz = 10e9;

}  // namespace

std::vector<std::string> preset_names() { return {"fig4", "fig6", "fig10", "fig16", "fig17", "fig18", "fig19"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.label = name;
  c.carrier_hz = kPlaceholderCarrierHz;
  c.output_dir = "spica_out/" + name;

  if (name == "fig4") {
    // Phase-shift leakage over a 20 % fractional band for 4, 16 and 64 elements.
    c.experiment = Experiment::PsLeakage;
    c.element_counts = {4, 16, 64};
    c.undesired_aoas_deg = {45.0};
    c.spacing_over_lambda = 0.5;
    c.band_fraction = 0.2;
    c.band_points = 201;
  } else if (name == "fig6") {
    c.experiment = Experiment::DesiredGain;
    c.mode = SynthesisMode::RfDerived;
    c.theory_only = true;
    c.desired_aoa_deg = 0.0;
    c.undesired_aoas_deg = {45.0};
    c.band_fraction = 0.2;
    c.band_points = 201;
  } else if (name == "fig10") {
    c.experiment = Experiment::PlanClock;
    c.plan_targets_s = {0.0, 4e-9, 8e-9, 12e-9};
  } else if (name == "fig16") {
    c.experiment = Experiment::TtdToneSweep;
    c.undesired_delays_s = {1e-9, 2e-9, 4e-9};
    c.tones_hz = tone_grid_mhz(1, 99);
    c.frame_length = 1024;
    c.nfft = 1024;
  } else if (name == "fig17") {
    c.experiment = Experiment::DesiredGain;
    c.desired_delay_s = 0.0;
    c.undesired_delays_s = {0.5e-9, 1e-9, 2.5e-9, 4e-9};
    c.tones_hz = tone_grid_mhz(1, 99);
    c.frame_length = 8192;
    c.nfft = 4096;
  } else if (name == "fig18") {
    // 64 MS/s QPSK with rolloff 0.25 occupies 80 MHz. The off-grid delay
    // exercises the 5 ps quantizer.
    c.experiment = Experiment::TtdModulated;
    c.undesired_delays_s = {1e-9, 1.2372e-9, 2e-9, 4e-9};
    c.interferer_symbol_rate_hz = 64e6;
    c.frame_length = 16384;
    c.nfft = 4096;
  } else if (name == "fig19") {
    c.experiment = Experiment::QpskEvm;
    c.mode = SynthesisMode::RfDerived;
    c.desired_aoa_deg = 0.0;
    c.undesired_aoas_deg = {45.0};
    c.desired_bit_rate = 4e6;
    c.interferer_symbol_rate_hz = 64e6;
    c.interferer_rel_db = 12.0;
    c.frame_length = 32768;
    c.nfft = 4096;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
  }
  c.validate();
  return c;
}

}  // namespace spica
