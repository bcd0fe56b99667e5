#include <cmath>
#include <random>

#include "doctest.h"
#include "spica/ttd_spica.hpp"

using namespace spica;

namespace {

SampleFrame random_frame(Eigen::Index len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SampleFrame f;
  f.samples.resize(len);
  for (auto& v : f.samples) v = Complex{g(rng), g(rng)};
  return f;
}

}  // namespace

TEST_CASE("bin frequencies in natural order") {
  const auto f = fft_bin_frequencies(8, 200e6);
  const double expected[8] = {0, 25e6, 50e6, 75e6, -100e6, -75e6, -50e6, -25e6};
  for (int k = 0; k < 8; ++k) CHECK(f[k] == expected[k]);
  const auto odd = fft_bin_frequencies(5, 5.0);
  CHECK(odd[2] == 2.0);
  CHECK(odd[3] == -2.0);
}

TEST_CASE("flat response divides by the constant") {
  const SampleFrame in = random_frame(500, 3);  // not a power of two
  const Complex c{0.5, -2.0};
  const SampleFrame out = zero_force(in, [c](double) { return c; }, 1e-3);
  CHECK((out.samples - in.samples / c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bins below the floor are zeroed") {
  const SampleFrame in = random_frame(256, 5);
  const SampleFrame out = zero_force(in, [](double) { return Complex{1e-6, 0.0}; }, 1e-3);
  CHECK(out.samples.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(zero_force(in, [](double) { return Complex{1.0, 0.0}; }, 0.0));
}

TEST_CASE("equalizing a desired tone through the MAC restores the input") {
  const double fs = 200e6;
  const Eigen::Index len = 1024;
  const double delta = 1e-9;
  const double f = 200 * fs / len;  // bin centred, away from the low-frequency nulls
  const auto w = Waveform::tone(1.0, f, 0.4);
  std::vector<SampleFrame> frames;
  for (int i = 0; i < 4; ++i) {
    frames.push_back(sample_with_delay([&w, i, delta](double t) { return w(t + i * delta); }, 0.0, fs, len));
  }
  const auto outs = mac_apply(frames, thm(4));
  for (int r = 0; r < 3; ++r) {
    const double eps = default_equalizer_floor(len, fs, r, delta, 4);
    const SampleFrame eq = equalize(outs[r], r, delta, 4, eps);
    CHECK((eq.samples - frames[0].samples).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("carrier offset evaluates the gain at RF") {
  const SampleFrame in = random_frame(128, 9);
  const double fc = 3e9;
  const auto a = equalize(in, 1, 0.3e-9, 4, 1e-3, fc);
  const auto b = zero_force(in, [fc](double f) { return desired_gain(fc + f, 0.3e-9, 1, 4); }, 1e-3);
  CHECK(a.samples == b.samples);
}

TEST_CASE("default floor is 5 % of the peak gain") {
  // Row 0 at 2 ns reaches |G| = 4 at 250 MHz, outside +-100 MHz; check
  // against a direct scan.
  const auto freqs = fft_bin_frequencies(1000, 200e6);
  double peak = 0.0;
  for (auto f : freqs) peak = std::max(peak, std::abs(desired_gain(f, 2e-9, 0, 4)));
  CHECK(default_equalizer_floor(1000, 200e6, 0, 2e-9, 4) == doctest::Approx(0.05 * peak));
}
