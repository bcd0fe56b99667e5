#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spica/experiment.hpp"
#include "spica/ttd_spica.hpp"

namespace spica {

using nlohmann::json;

namespace {

const std::map<std::string, Experiment>& experiment_table() {
  static const std::map<std::string, Experiment> table{
      {"PS_LEAKAGE", Experiment::PsLeakage},         {"TTD_TONE_SWEEP", Experiment::TtdToneSweep},
      {"TTD_MODULATED", Experiment::TtdModulated},   {"DESIRED_GAIN", Experiment::DesiredGain},
      {"QPSK_EVM", Experiment::QpskEvm},             {"PLAN_CLOCK", Experiment::PlanClock},
  };
  return table;
}

/// Walks a JSON object while tracking the dotted path for error messages and
/// rejecting keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }
  /// Rejects keys that were never looked up.
  void done() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
    }
  }

  [[nodiscard]] std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  [[nodiscard]] bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  [[nodiscard]] const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Reader child(const std::string& key) { return Reader(at(key), field(key)); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
    return d;
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<int>();
  }
  std::uint64_t uint64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    if (!has(key)) return {};
    const auto& v = at(key);
    if (v.is_object()) return range(key, v);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) {
        throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected an integer");
      }
      out.push_back(v[i].get<int>());
    }
    return out;
  }

 private:
  // {"start": a, "stop": b, "step": s} expands to a, a+s, ..., <= b.
  std::vector<double> range(const std::string& key, const json& v) {
    Reader r(v, field(key));
    const double start = r.number("start", NAN);
    const double stop = r.number("stop", NAN);
    const double step = r.number("step", NAN);
    r.done();
    if (std::isnan(start) || std::isnan(stop) || std::isnan(step)) {
      throw ConfigError(field(key), "range needs start, stop and step");
    }
    if (!(step > 0.0) || stop < start) throw ConfigError(field(key), "range needs step > 0 and stop >= start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step * (1.0 + 1e-12))) + 1;
    if (count > 1'000'000) throw ConfigError(field(key), "range has too many points");
    std::vector<double> out;
    for (long long k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* mode_name(SynthesisMode m) { return m == SynthesisMode::RfDerived ? "RF_DERIVED" : "BB_DIRECT"; }

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

const char* experiment_name(Experiment e) {
  for (const auto& [name, value] : experiment_table()) {
    if (value == e) return name.c_str();
  }
  return "?";
}

ArrayGeometry ExperimentConfig::geometry() const {
  return ArrayGeometry{n_elements, spacing_over_lambda, carrier_hz};
}

std::vector<double> ExperimentConfig::resolved_undesired_delays() const {
  if (!undesired_delays_s.empty()) return undesired_delays_s;
  std::vector<double> out;
  const auto g = geometry();
  for (double a : undesired_aoas_deg) out.push_back(aoa_to_delay(g, a));
  return out;
}

void ExperimentConfig::validate() const {
  require(carrier_hz > 0.0, "scene.carrier_hz", "must be > 0");
  require(spacing_over_lambda > 0.0, "scene.spacing_over_lambda", "must be > 0");
  require(std::abs(desired_aoa_deg) <= 90.0, "scene.desired.aoa_deg", "must lie in [-90, 90]");
  for (std::size_t i = 0; i < undesired_aoas_deg.size(); ++i) {
    require(std::abs(undesired_aoas_deg[i]) <= 90.0, "scene.undesired.aoas_deg[" + std::to_string(i) + "]",
            "must lie in [-90, 90]");
  }
  require(noise_rms >= 0.0, "noise.rms", "must be >= 0");
  require(noise_rms == 0.0 || seed.has_value(), "noise.seed", "is required when noise.rms > 0");
  require(sample_rate > 0.0, "sampling.sample_rate_hz", "must be > 0");

  if (experiment == Experiment::PlanClock) {
    require(!plan_targets_s.empty(), "planner.targets_s", "PLAN_CLOCK needs at least one target");
    const int limit = extrapolate_interleave ? interleave_limit_for(n_elements) : kDefaultMaxInterleaveOffset;
    const double range = max_plannable_delay(limit);
    for (std::size_t i = 0; i < plan_targets_s.size(); ++i) {
      require(plan_targets_s[i] >= 0.0 && plan_targets_s[i] <= range,
              "planner.targets_s[" + std::to_string(i) + "]",
              "must lie in [0, " + format_number(range) + "] s");
    }
    return;
  }

  if (experiment == Experiment::PsLeakage) {
    require(!element_counts.empty(), "stimulus.element_counts", "needs at least one array size");
    for (std::size_t i = 0; i < element_counts.size(); ++i) {
      require(element_counts[i] >= 2 && is_power_of_two(element_counts[i]),
              "stimulus.element_counts[" + std::to_string(i) + "]", "must be a power of two >= 2");
    }
    require(!undesired_aoas_deg.empty(), "scene.undesired.aoas_deg", "PS_LEAKAGE needs at least one angle");
    require(band_fraction > 0.0 && band_fraction < 2.0, "stimulus.band_fraction", "must lie in (0, 2)");
    require(band_points >= 2 && band_points <= 100000, "stimulus.band_points", "must lie in [2, 100000]");
    return;
  }

  require(n_elements >= 2 && is_power_of_two(n_elements), "scene.n_elements", "must be a power of two >= 2");
  require(n_elements <= 4 || extrapolate_interleave, "scene.n_elements",
          "arrays larger than 4 need planner.extrapolate_interleave");
  require(mismatch.empty() || static_cast<int>(mismatch.size()) == n_elements, "scene.mismatch",
          "length must equal scene.n_elements");
  require(frame_length >= 16 && is_power_of_two(frame_length), "sampling.frame_length",
          "must be a power of two >= 16");
  require(nfft >= 16 && is_power_of_two(nfft), "sampling.nfft", "must be a power of two >= 16");
  require(nfft <= frame_length, "sampling.nfft", "must not exceed sampling.frame_length");

  const int limit = extrapolate_interleave ? interleave_limit_for(n_elements) : kDefaultMaxInterleaveOffset;
  const double range = max_plannable_delay(limit);
  const auto delays = resolved_undesired_delays();
  const std::string delay_field = undesired_delays_s.empty() ? "scene.undesired.aoas_deg" : "scene.undesired.delays_s";
  for (std::size_t i = 0; i < delays.size(); ++i) {
    require(std::abs(delays[i]) * (n_elements - 1) <= range, delay_field + "[" + std::to_string(i) + "]",
            "inter-element delay exceeds the " + format_number(range) + " s compensation range");
  }

  const bool needs_tones = experiment == Experiment::TtdToneSweep ||
                           (experiment == Experiment::DesiredGain && !theory_only);
  if (needs_tones) {
    require(!tones_hz.empty(), "stimulus.tones_hz", "needs at least one tone");
    for (std::size_t i = 0; i < tones_hz.size(); ++i) {
      require(std::abs(tones_hz[i]) < sample_rate / 2.0, "stimulus.tones_hz[" + std::to_string(i) + "]",
              "must lie inside the Nyquist band");
    }
  }
  if (experiment == Experiment::DesiredGain) {
    require(!delays.empty(), "scene.undesired", "DESIRED_GAIN needs at least one undesired delay");
    if (theory_only) {
      require(band_fraction > 0.0 && band_fraction < 2.0, "stimulus.band_fraction", "must lie in (0, 2)");
      require(band_points >= 2 && band_points <= 100000, "stimulus.band_points", "must lie in [2, 100000]");
    }
  }
  if (experiment == Experiment::TtdModulated || experiment == Experiment::QpskEvm) {
    require(interferer_symbol_rate_hz > 0.0, "stimulus.interferer.symbol_rate_hz", "must be > 0");
    require(interferer_symbol_rate_hz * (1.0 + rolloff) < sample_rate, "stimulus.interferer.symbol_rate_hz",
            "occupied bandwidth must fit inside the sample rate");
    require(rolloff >= 0.0 && rolloff <= 1.0, "stimulus.rolloff", "must lie in [0, 1]");
    require(span_symbols >= 1 && span_symbols <= 256, "stimulus.span_symbols", "must lie in [1, 256]");
    require(std::abs(interferer_rel_db) <= 60.0, "stimulus.interferer.relative_power_db", "must lie in [-60, 60]");
  }
  if (experiment == Experiment::QpskEvm) {
    require(!delays.empty(), "scene.undesired", "QPSK_EVM needs an undesired source");
    require(desired_bit_rate > 0.0 && desired_bit_rate / 2.0 * (1.0 + rolloff) < sample_rate,
            "stimulus.desired.bit_rate", "must be > 0 and fit inside the sample rate");
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  {
    Reader root(j, "");
    const std::string exp = root.string("experiment", "");
    const auto it = experiment_table().find(exp);
    if (it == experiment_table().end()) {
      throw ConfigError("experiment", "unknown experiment '" + exp +
                                          "' (PS_LEAKAGE, TTD_TONE_SWEEP, TTD_MODULATED, DESIRED_GAIN, "
                                          "QPSK_EVM, PLAN_CLOCK)");
    }
    c.experiment = it->second;
    c.label = root.string("label", c.label);

    if (root.has("scene")) {
      Reader s = root.child("scene");
      c.n_elements = s.integer("n_elements", c.n_elements);
      c.carrier_hz = s.number("carrier_hz", c.carrier_hz);
      c.spacing_over_lambda = s.number("spacing_over_lambda", c.spacing_over_lambda);
      const std::string mode = s.string("mode", mode_name(c.mode));
      if (mode == "BB_DIRECT") {
        c.mode = SynthesisMode::BbDirect;
      } else if (mode == "RF_DERIVED") {
        c.mode = SynthesisMode::RfDerived;
      } else {
        throw ConfigError("scene.mode", "expected BB_DIRECT or RF_DERIVED");
      }
      if (s.has("desired")) {
        Reader d = s.child("desired");
        c.desired_aoa_deg = d.number("aoa_deg", c.desired_aoa_deg);
        if (d.has("delay_s")) c.desired_delay_s = d.number("delay_s", 0.0);
        d.done();
      }
      if (s.has("undesired")) {
        Reader u = s.child("undesired");
        c.undesired_delays_s = u.numbers("delays_s");
        c.undesired_aoas_deg = u.numbers("aoas_deg");
        u.done();
      }
      if (s.has("mismatch")) {
        const auto& m = s.at("mismatch");
        if (!m.is_array()) throw ConfigError("scene.mismatch", "expected an array of [re, im] pairs");
        for (std::size_t i = 0; i < m.size(); ++i) {
          const auto& p = m[i];
          if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ConfigError("scene.mismatch[" + std::to_string(i) + "]", "expected [re, im]");
          }
          c.mismatch.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
      }
      s.done();
    }

    if (root.has("stimulus")) {
      Reader st = root.child("stimulus");
      c.tones_hz = st.numbers("tones_hz");
      c.element_counts = st.integers("element_counts", c.element_counts);
      c.band_fraction = st.number("band_fraction", c.band_fraction);
      c.band_points = st.integer("band_points", c.band_points);
      c.theory_only = st.boolean("theory_only", c.theory_only);
      c.rolloff = st.number("rolloff", c.rolloff);
      c.span_symbols = st.integer("span_symbols", c.span_symbols);
      c.symbol_seed = st.uint64("symbol_seed", c.symbol_seed);
      if (st.has("interferer")) {
        Reader in = st.child("interferer");
        c.interferer_symbol_rate_hz = in.number("symbol_rate_hz", c.interferer_symbol_rate_hz);
        c.interferer_rel_db = in.number("relative_power_db", c.interferer_rel_db);
        in.done();
      }
      if (st.has("desired")) {
        Reader d = st.child("desired");
        c.desired_bit_rate = d.number("bit_rate", c.desired_bit_rate);
        d.done();
      }
      st.done();
    }

    if (root.has("planner")) {
      Reader p = root.child("planner");
      c.quantize = p.boolean("quantize", c.quantize);
      c.extrapolate_interleave = p.boolean("extrapolate_interleave", c.extrapolate_interleave);
      c.plan_targets_s = p.numbers("targets_s");
      p.done();
    }
    if (root.has("sampling")) {
      Reader s = root.child("sampling");
      c.sample_rate = s.number("sample_rate_hz", c.sample_rate);
      c.frame_length = s.integer("frame_length", c.frame_length);
      c.nfft = s.integer("nfft", c.nfft);
      s.done();
    }
    if (root.has("noise")) {
      Reader n = root.child("noise");
      c.noise_rms = n.number("rms", c.noise_rms);
      if (n.has("seed")) c.seed = n.uint64("seed", 0);
      n.done();
    }
    if (root.has("output")) {
      Reader o = root.child("output");
      c.output_dir = o.string("dir", c.output_dir);
      o.done();
    }
    root.done();
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json desired{{"aoa_deg", c.desired_aoa_deg}};
  if (c.desired_delay_s) desired["delay_s"] = *c.desired_delay_s;
  json mismatch = json::array();
  for (const auto& m : c.mismatch) mismatch.push_back({m.real(), m.imag()});

  json j{
      {"experiment", experiment_name(c.experiment)},
      {"label", c.label},
      {"scene",
       {{"n_elements", c.n_elements},
        {"carrier_hz", c.carrier_hz},
        {"spacing_over_lambda", c.spacing_over_lambda},
        {"mode", mode_name(c.mode)},
        {"desired", desired},
        {"undesired", {{"delays_s", c.undesired_delays_s}, {"aoas_deg", c.undesired_aoas_deg}}},
        {"mismatch", mismatch}}},
      {"stimulus",
       {{"tones_hz", c.tones_hz},
        {"element_counts", c.element_counts},
        {"band_fraction", c.band_fraction},
        {"band_points", c.band_points},
        {"theory_only", c.theory_only},
        {"rolloff", c.rolloff},
        {"span_symbols", c.span_symbols},
        {"symbol_seed", c.symbol_seed},
        {"interferer", {{"symbol_rate_hz", c.interferer_symbol_rate_hz}, {"relative_power_db", c.interferer_rel_db}}},
        {"desired", {{"bit_rate", c.desired_bit_rate}}}}},
      {"planner",
       {{"quantize", c.quantize}, {"extrapolate_interleave", c.extrapolate_interleave}, {"targets_s", c.plan_targets_s}}},
      {"sampling", {{"sample_rate_hz", c.sample_rate}, {"frame_length", c.frame_length}, {"nfft", c.nfft}}},
      {"noise", {{"rms", c.noise_rms}}},
      {"output", {{"dir", c.output_dir}}},
  };
  if (c.seed) j["noise"]["seed"] = *c.seed;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace spica
