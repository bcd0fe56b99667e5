#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "spica/experiment.hpp"

using namespace spica;
using nlohmann::json;

namespace {

std::string field_of(const json& j) {
  try {
    (void)config_from_json(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

json minimal(const std::string& experiment) {
  return json{{"experiment", experiment}, {"scene", {{"undesired", {{"delays_s", {1e-9}}}}}}};
}

}  // namespace

TEST_CASE("format_number") {
  CHECK(format_number(1e-9) == "1e-09");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("config errors name the offending field") {
  CHECK(field_of(json{{"experiment", "NOPE"}}) == "experiment");
  CHECK(field_of(json::array()) == "<root>");
  json j = minimal("TTD_TONE_SWEEP");
  j["stimulus"]["tones_hz"] = {1e6};
  j["sampling"]["frame_length"] = 2048;
  j["sampling"]["nfft"] = 4096;
  CHECK(field_of(j) == "sampling.nfft");

  j = minimal("TTD_TONE_SWEEP");
  j["stimulus"]["tones_hz"] = {1e6};
  j["scene"]["n_elements"] = 6;
  CHECK(field_of(j) == "scene.n_elements");

  j = minimal("TTD_TONE_SWEEP");
  j["stimulus"]["tones_hz"] = {1e6};
  j["noise"]["rms"] = 0.1;
  CHECK(field_of(j) == "noise.seed");
  j["noise"]["seed"] = 7;
  CHECK(field_of(j) == "");

  j = minimal("TTD_TONE_SWEEP");
  j["stimulus"]["tones_hz"] = {1e6};
  j["scene"]["spacing"] = 0.5;
  CHECK(field_of(j) == "scene.spacing");

  j = minimal("TTD_TONE_SWEEP");
  j["stimulus"]["tones_hz"] = "many";
  CHECK(field_of(j) == "stimulus.tones_hz");

  j = minimal("TTD_TONE_SWEEP");
  j["stimulus"]["tones_hz"] = {1e6};
  j["scene"]["undesired"]["delays_s"] = {20e-9};
  CHECK(field_of(j).rfind("scene.undesired.delays_s", 0) == 0);
}

TEST_CASE("range objects expand") {
  json j = minimal("TTD_TONE_SWEEP");
  j["stimulus"]["tones_hz"] = {{"start", 1e6}, {"stop", 5e6}, {"step", 1e6}};
  const auto c = config_from_json(j);
  REQUIRE(c.tones_hz.size() == 5);
  CHECK(c.tones_hz.back() == doctest::Approx(5e6));
}

TEST_CASE("config json round trip") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ExperimentConfig c = preset(name);
    const json once = config_to_json(c);
    const json twice = config_to_json(config_from_json(once));
    CHECK(once == twice);
  }
}

TEST_CASE("unknown preset lists the known names") {
  try {
    (void)preset("fig99");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& n : preset_names()) CHECK(msg.find(n) != std::string::npos);
  }
}

TEST_CASE("PLAN_CLOCK run") {
  const RunResult r = run(preset("fig10"));
  const auto& t = r.tables.at("plan_clock.csv");
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[3][1] == "2");
  CHECK(t.rows[3][3] == "Q_P");
  CHECK(t.rows[3][4] == "150");
  CHECK(r.manifest["status"] == "ok");
}

TEST_CASE("modulated run without an interferer reports it") {
  ExperimentConfig c = preset("fig18");
  c.undesired_delays_s.clear();
  c.undesired_aoas_deg.clear();
  c.frame_length = 4096;
  const RunResult r = run(c);
  CHECK(r.status == "no-interferer");
  CHECK(r.manifest["status"] == "no-interferer");
}

TEST_CASE("runs are deterministic and the manifest round-trips") {
  ExperimentConfig c = preset("fig16");
  c.tones_hz = {5e6, 45e6};
  c.noise_rms = 1e-3;
  c.seed = 99;
  const RunResult a = run(c);
  const RunResult b = run(c);
  REQUIRE(a.tables.size() == b.tables.size());
  for (const auto& [name, table] : a.tables) CHECK(table.to_string() == b.tables.at(name).to_string());
  CHECK(a.manifest.dump() == b.manifest.dump());

  const ExperimentConfig echoed = config_from_json(a.manifest["config"]);
  const RunResult again = run(echoed);
  for (const auto& [name, table] : a.tables) CHECK(table.to_string() == again.tables.at(name).to_string());

  c.seed = 100;
  CHECK(run(c).tables.at("ttd_tone_sweep.csv").to_string() != a.tables.at("ttd_tone_sweep.csv").to_string());
}

TEST_CASE("write_outputs creates the directory") {
  const auto dir = std::filesystem::temp_directory_path() / "spica_unit_outputs";
  std::filesystem::remove_all(dir);
  const auto files = write_outputs(run(preset("fig10")), (dir / "nested").string());
  CHECK(files.size() == 2);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  std::ifstream is(dir / "nested" / "manifest.json");
  const json m = json::parse(is);
  CHECK(m["tool"] == "spica");
  CHECK(m["outputs"][0] == "plan_clock.csv");
  std::filesystem::remove_all(dir);
}
