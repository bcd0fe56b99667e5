#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spica/experiment.hpp"
#include "spica/metrics.hpp"
#include "spica/ps_spica.hpp"
#include "spica/ttd_spica.hpp"

namespace spica {

using nlohmann::json;

namespace {

std::string fmt(double v) { return format_number(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

double db20(double mag) { return mag > 0.0 ? 20.0 * std::log10(mag) : -std::numeric_limits<double>::infinity(); }

int interleave_limit(const ExperimentConfig& c) {
  return c.extrapolate_interleave ? interleave_limit_for(c.n_elements) : kDefaultMaxInterleaveOffset;
}

/// Per-element clock delays that align a source with inter-element delay dt.
struct ClockPlan {
  std::vector<double> delays_s;
  std::vector<ClockConfig> configs;  ///< empty in ideal mode
};

ClockPlan make_clock_plan(int n, double dt, bool quantize, int limit) {
  ClockPlan plan;
  if (quantize) {
    plan.configs = plan_array(n, dt, limit);
    for (const auto& c : plan.configs) plan.delays_s.push_back(config_total_delay(c));
  } else {
    const double base = dt < 0.0 ? -(n - 1) * dt : 0.0;
    for (int i = 0; i < n; ++i) plan.delays_s.push_back(base + i * dt);
  }
  return plan;
}

json clock_plan_json(double dt, const ClockPlan& plan) {
  json elements = json::array();
  const double base = dt < 0.0 ? -(static_cast<int>(plan.delays_s.size()) - 1) * dt : 0.0;
  for (std::size_t i = 0; i < plan.delays_s.size(); ++i) {
    const double target = base + static_cast<double>(i) * dt;
    json e{{"element", i}, {"target_delay_s", target}, {"planned_delay_s", plan.delays_s[i]},
           {"error_s", plan.delays_s[i] - target}};
    if (!plan.configs.empty()) {
      const auto& c = plan.configs[i];
      e["pi_code"] = c.pi_code;
      e["quadrant"] = quadrant_name(c.quadrant);
      e["interleave_offset"] = c.interleave_offset;
    }
    elements.push_back(std::move(e));
  }
  return json{{"delta_ud_s", dt}, {"elements", elements}};
}

std::vector<SampleFrame> capture(const std::vector<ElementSignal>& signals, const ClockPlan& plan,
                                 const ExperimentConfig& c, Eigen::Index count, double start_time,
                                 std::initializer_list<std::uint64_t> noise_key) {
  std::vector<SampleFrame> frames;
  frames.reserve(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) {
    NoiseSpec noise;
    if (c.noise_rms > 0.0) {
      std::vector<std::uint64_t> keys(noise_key);
      std::uint64_t seed = derive_seed(*c.seed, {static_cast<std::uint64_t>(i)});
      for (auto k : keys) seed = derive_seed(seed, {k});
      noise = NoiseSpec{c.noise_rms, seed};
    }
    const ElementSignal& sig = signals[i];
    SampleFrame f = sample_with_delay([&sig](double t) { return sig(t); }, plan.delays_s[i], c.sample_rate, count,
                                      noise, start_time);
    f.element_tag = static_cast<int>(i);
    frames.push_back(std::move(f));
  }
  return frames;
}

Scene base_scene(const ExperimentConfig& c) {
  Scene s;
  s.geometry = c.geometry();
  s.mode = c.mode;
  s.element_mismatch = c.mismatch;
  s.desired.aoa_deg = c.desired_aoa_deg;
  s.desired.delay_override_s = c.desired_delay_s;
  return s;
}

SourceSpec undesired_source(Waveform w, double dt) {
  SourceSpec s;
  s.waveform = std::move(w);
  s.delay_override_s = dt;
  return s;
}

// ---------------------------------------------------------------------------

void run_ps_leakage(const ExperimentConfig& c, RunResult& out) {
  CsvTable t;
  t.header = {"n_elements", "theta_ud_deg", "f_norm", "residual_mag", "rejection_db_array", "rejection_db_element"};
  for (int n : c.element_counts) {
    for (double theta : c.undesired_aoas_deg) {
      ArrayGeometry g{n, c.spacing_over_lambda, c.carrier_hz};
      const auto plan = make_ps_plan(n, ps_align_phase(g, theta));
      for (int k = 0; k < c.band_points; ++k) {
        const double f_norm = 1.0 - c.band_fraction / 2.0 + c.band_fraction * k / (c.band_points - 1);
        const Complex r = ps_residual_gain(plan, f_norm, theta, c.spacing_over_lambda);
        t.rows.push_back({fmt(n), fmt(theta), fmt(f_norm), fmt(std::abs(r)), fmt(ps_rejection_db(r, n)),
                          fmt(ps_rejection_db(r, 1.0))});
      }
    }
  }
  out.tables["ps_leakage.csv"] = std::move(t);
}

void run_plan_clock(const ExperimentConfig& c, RunResult& out) {
  const int limit = interleave_limit(c);
  CsvTable t;
  t.header = {"target_s", "interleave_offset", "quadrant", "quadrant_name", "pi_code", "planned_s", "error_s"};
  json plans = json::array();
  for (double target : c.plan_targets_s) {
    const ClockConfig cfg = plan_delay(target, limit);
    const double planned = config_total_delay(cfg);
    t.rows.push_back({fmt(target), fmt(cfg.interleave_offset), fmt(static_cast<int>(cfg.quadrant)),
                      quadrant_name(cfg.quadrant), fmt(cfg.pi_code), fmt(planned), fmt(planned - target)});
    plans.push_back({{"target_s", target},
                     {"pi_code", cfg.pi_code},
                     {"quadrant", quadrant_name(cfg.quadrant)},
                     {"interleave_offset", cfg.interleave_offset},
                     {"planned_delay_s", planned}});
  }
  out.manifest["derived"]["clock_configs"] = plans;
  out.tables["plan_clock.csv"] = std::move(t);
}

void run_tone_sweep(const ExperimentConfig& c, RunResult& out) {
  const ThmMatrix m = thm(c.n_elements);
  const Band full{-c.sample_rate / 2.0, c.sample_rate / 2.0};
  const auto delays = c.resolved_undesired_delays();

  CsvTable t;
  t.header = {"freq_hz", "delta_ud_s", "row", "depth_db_ideal", "depth_db_quantized"};
  json plans = json::array();
  if (delays.empty()) out.status = "no-interferer";

  for (std::size_t d = 0; d < delays.size(); ++d) {
    const double dt = delays[d];
    const ClockPlan ideal = make_clock_plan(c.n_elements, dt, false, interleave_limit(c));
    const ClockPlan quant = make_clock_plan(c.n_elements, dt, true, interleave_limit(c));
    plans.push_back(clock_plan_json(dt, quant));

    for (std::size_t f = 0; f < c.tones_hz.size(); ++f) {
      Scene scene = base_scene(c);
      scene.undesired.push_back(undesired_source(Waveform::tone(1.0, c.tones_hz[f]), dt));
      const auto signals = aligned_element_signals(scene);

      const auto fi = capture(signals, ideal, c, c.frame_length, 0.0, {d, f, 0});
      const auto fq = capture(signals, quant, c, c.frame_length, 0.0, {d, f, 1});
      const auto oi = mac_apply(fi, m);
      const auto oq = mac_apply(fq, m);
      for (int r = 0; r < m.row_count(); ++r) {
        const double di = cancellation_depth(single_input_row(fi[0], m, r), oi[static_cast<std::size_t>(r)], full,
                                             c.nfft);
        const double dq = cancellation_depth(single_input_row(fq[0], m, r), oq[static_cast<std::size_t>(r)], full,
                                             c.nfft);
        t.rows.push_back({fmt(c.tones_hz[f]), fmt(dt), fmt(r), fmt(di), fmt(dq)});
      }
    }
  }
  out.manifest["derived"]["clock_plans"] = plans;
  out.tables["ttd_tone_sweep.csv"] = std::move(t);
}

StreamTerm qpsk_stream(double symbol_rate, double t_end, const ExperimentConfig& c, std::uint64_t seed) {
  const double period = 1.0 / symbol_rate;
  const auto count = static_cast<std::size_t>(std::ceil(t_end / period)) + static_cast<std::size_t>(c.span_symbols) + 2;
  return StreamTerm(random_qpsk(count, seed), symbol_rate, c.rolloff, c.span_symbols);
}

void run_modulated(const ExperimentConfig& c, RunResult& out) {
  const ThmMatrix m = thm(c.n_elements);
  const auto delays = c.resolved_undesired_delays();
  const double half_bw = c.interferer_symbol_rate_hz * (1.0 + c.rolloff) / 2.0;
  const Band band{-half_bw, half_bw};

  CsvTable t;
  t.header = {"delta_ud_s", "row", "quantized", "band_lo_hz", "band_hi_hz", "status", "depth_db"};
  if (delays.empty()) {
    out.status = "no-interferer";
    for (int r = 0; r < m.row_count(); ++r) {
      t.rows.push_back({"", fmt(r), c.quantize ? "1" : "0", fmt(band.lo_hz), fmt(band.hi_hz), "no-interferer", ""});
    }
    out.tables["ttd_modulated.csv"] = std::move(t);
    return;
  }

  const double period = 1.0 / c.interferer_symbol_rate_hz;
  const double start = (c.span_symbols + 1) * period;
  const double duration = c.frame_length / c.sample_rate;
  const double range = max_plannable_delay(interleave_limit(c));
  const StreamTerm stream =
      qpsk_stream(c.interferer_symbol_rate_hz, start + duration + range + period, c, c.symbol_seed);
  const Complex amplitude = std::pow(10.0, c.interferer_rel_db / 20.0);

  json plans = json::array();
  for (std::size_t d = 0; d < delays.size(); ++d) {
    const double dt = delays[d];
    const ClockPlan plan = make_clock_plan(c.n_elements, dt, c.quantize, interleave_limit(c));
    plans.push_back(clock_plan_json(dt, plan));

    Scene scene = base_scene(c);
    scene.undesired.push_back(undesired_source(amplitude * Waveform::stream(stream), dt));
    const auto frames = capture(aligned_element_signals(scene), plan, c, c.frame_length, start, {d});
    const auto outs = mac_apply(frames, m);
    for (int r = 0; r < m.row_count(); ++r) {
      const double depth =
          cancellation_depth(single_input_row(frames[0], m, r), outs[static_cast<std::size_t>(r)], band, c.nfft);
      t.rows.push_back({fmt(dt), fmt(r), c.quantize ? "1" : "0", fmt(band.lo_hz), fmt(band.hi_hz), "ok", fmt(depth)});
    }
  }
  out.manifest["derived"]["clock_plans"] = plans;
  out.tables["ttd_modulated.csv"] = std::move(t);
}

void run_desired_gain(const ExperimentConfig& c, RunResult& out) {
  const auto delays = c.resolved_undesired_delays();
  const ArrayGeometry g = c.geometry();
  SourceSpec desired_src;
  desired_src.aoa_deg = c.desired_aoa_deg;
  desired_src.delay_override_s = c.desired_delay_s;
  const double dt_d = inter_element_delay(g, desired_src);
  const double rf_offset = c.mode == SynthesisMode::RfDerived ? c.carrier_hz : 0.0;
  const int rows = c.n_elements - 1;

  CsvTable t;
  t.header = {"freq_hz", "f_norm", "delta_ud_s", "row", "gain_db_measured", "gain_db_theory"};

  if (c.theory_only) {
    for (double dt : delays) {
      for (int k = 0; k < c.band_points; ++k) {
        const double f_norm = 1.0 - c.band_fraction / 2.0 + c.band_fraction * k / (c.band_points - 1);
        const double f = f_norm * c.carrier_hz;
        for (int r = 0; r < rows; ++r) {
          const double theory = db20(std::abs(desired_gain(f, dt - dt_d, r, c.n_elements)));
          t.rows.push_back({fmt(f), fmt(f_norm), fmt(dt), fmt(r), "", fmt(theory)});
        }
      }
    }
    out.tables["desired_gain.csv"] = std::move(t);
    return;
  }

  const ThmMatrix m = thm(c.n_elements);
  json plans = json::array();
  for (std::size_t d = 0; d < delays.size(); ++d) {
    const double dt = delays[d];
    const ClockPlan plan = make_clock_plan(c.n_elements, dt, c.quantize, interleave_limit(c));
    plans.push_back(clock_plan_json(dt, plan));
    for (std::size_t f = 0; f < c.tones_hz.size(); ++f) {
      const double tone = c.tones_hz[f];
      Scene scene = base_scene(c);
      scene.desired.waveform = Waveform::tone(1.0, tone);
      scene.undesired.push_back(undesired_source(Waveform{}, dt));
      const auto frames = capture(aligned_element_signals(scene), plan, c, c.frame_length, 0.0, {d, f});
      const auto outs = mac_apply(frames, m);
      const double f_eff = rf_offset + tone;
      for (int r = 0; r < rows; ++r) {
        const auto measured =
            conversion_gain_measured(outs[static_cast<std::size_t>(r)], single_input_row(frames[0], m, r), tone, c.nfft);
        const double theory = db20(std::abs(desired_gain(f_eff, dt - dt_d, r, c.n_elements)));
        t.rows.push_back({fmt(f_eff), fmt(f_eff / c.carrier_hz), fmt(dt), fmt(r),
                          measured ? fmt(*measured) : "below-noise-floor", fmt(theory)});
      }
    }
  }
  out.manifest["derived"]["clock_plans"] = plans;
  out.tables["desired_gain.csv"] = std::move(t);
}

void run_qpsk_evm(const ExperimentConfig& c, RunResult& out) {
  const auto delays = c.resolved_undesired_delays();
  const ThmMatrix m = thm(c.n_elements);
  const ArrayGeometry g = c.geometry();
  const double rf_offset = c.mode == SynthesisMode::RfDerived ? c.carrier_hz : 0.0;

  const double desired_rate = c.desired_bit_rate / 2.0;
  const double start = (c.span_symbols + 1) / desired_rate;
  const double duration = c.frame_length / c.sample_rate;
  const double range = max_plannable_delay(interleave_limit(c));
  const StreamTerm desired = qpsk_stream(desired_rate, start + duration + range + 1.0 / desired_rate, c, c.symbol_seed);
  const StreamTerm interferer =
      qpsk_stream(c.interferer_symbol_rate_hz, start + duration + range + 1.0 / c.interferer_symbol_rate_hz, c,
                  derive_seed(c.symbol_seed, {1}));
  const Complex amplitude = std::pow(10.0, c.interferer_rel_db / 20.0);

  CsvTable t;
  t.header = {"delta_ud_s", "row", "evm_percent", "evm_single_element_percent", "n_symbols", "interferer_rel_db"};
  CsvTable constellation;
  constellation.header = {"delta_ud_s", "row", "symbol_index", "rx_re", "rx_im", "ref_re", "ref_im"};
  json plans = json::array();

  for (std::size_t d = 0; d < delays.size(); ++d) {
    const double dt = delays[d];
    Scene scene = base_scene(c);
    scene.desired.waveform = Waveform::stream(desired);
    scene.undesired.push_back(undesired_source(amplitude * Waveform::stream(interferer), dt));
    const double dt_d = inter_element_delay(g, scene.desired);

    const ClockPlan plan = make_clock_plan(c.n_elements, dt, c.quantize, interleave_limit(c));
    plans.push_back(clock_plan_json(dt, plan));
    const auto frames = capture(aligned_element_signals(scene), plan, c, c.frame_length, start, {d});
    const auto outs = mac_apply(frames, m);
    const double genie = -plan.delays_s[0];

    const auto single = recover_symbols(frames[0], desired, genie);
    const auto single_ref = desired.symbols().subspan(single.first_index, single.symbols.size());
    const double evm_single = evm_percent(single.symbols, single_ref);

    for (int r = 0; r < m.row_count(); ++r) {
      const auto& o = outs[static_cast<std::size_t>(r)];
      const double eps = default_equalizer_floor(o.size(), o.sample_rate, r, dt - dt_d, c.n_elements, rf_offset);
      const SampleFrame eq = equalize(o, r, dt - dt_d, c.n_elements, eps, rf_offset);
      const auto rec = recover_symbols(eq, desired, genie);
      const auto ref = desired.symbols().subspan(rec.first_index, rec.symbols.size());
      t.rows.push_back({fmt(dt), fmt(r), fmt(evm_percent(rec.symbols, ref)), fmt(evm_single),
                        fmt(rec.symbols.size()), fmt(c.interferer_rel_db)});
      for (std::size_t k = 0; k < rec.symbols.size(); ++k) {
        constellation.rows.push_back({fmt(dt), fmt(r), fmt(rec.first_index + k), fmt(rec.symbols[k].real()),
                                      fmt(rec.symbols[k].imag()), fmt(ref[k].real()), fmt(ref[k].imag())});
      }
    }
  }
  out.manifest["derived"]["clock_plans"] = plans;
  out.tables["qpsk_evm.csv"] = std::move(t);
  out.tables["constellation.csv"] = std::move(constellation);
}

}  // namespace

std::string CsvTable::to_string() const {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

RunResult run(const ExperimentConfig& config) {
  config.validate();
  RunResult out;
  out.manifest = json{{"tool", "spica"},
                      {"version", kToolVersion},
                      {"experiment", experiment_name(config.experiment)},
                      {"label", config.label},
                      {"config", config_to_json(config)},
                      {"derived", json::object()}};

  switch (config.experiment) {
    case Experiment::PsLeakage: run_ps_leakage(config, out); break;
    case Experiment::PlanClock: run_plan_clock(config, out); break;
    case Experiment::TtdToneSweep: run_tone_sweep(config, out); break;
    case Experiment::TtdModulated: run_modulated(config, out); break;
    case Experiment::DesiredGain: run_desired_gain(config, out); break;
    case Experiment::QpskEvm: run_qpsk_evm(config, out); break;
  }

  json files = json::array();
  for (const auto& [name, _] : out.tables) files.push_back(name);
  out.manifest["outputs"] = files;
  out.manifest["status"] = out.status;
  return out;
}

std::vector<std::string> write_outputs(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());

  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& text) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream os(p, std::ios::binary);
    os << text;
    if (!os) throw std::runtime_error("failed writing " + p.string());
    written.push_back(p.string());
  };
  for (const auto& [name, table] : result.tables) write(name, table.to_string());
  write("manifest.json", result.manifest.dump(2) + "\n");
  return written;
}

}  // namespace spica
