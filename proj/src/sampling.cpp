#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "spica/sample_frame.hpp"
#include "spica/ttd_spica.hpp"

namespace spica {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void SampleFrame::validate() const {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("SampleFrame: sample_rate must be > 0");
  if (samples.size() < 1) throw std::invalid_argument("SampleFrame: empty frame");
}

void require_compatible(std::span<const SampleFrame> frames, const char* who) {
  if (frames.empty()) throw std::invalid_argument(std::string(who) + ": no frames");
  const auto& ref = frames.front();
  ref.validate();
  for (const auto& f : frames) {
    f.validate();
    if (f.size() != ref.size() || f.sample_rate != ref.sample_rate || f.start_time != ref.start_time) {
      throw std::invalid_argument(std::string(who) + ": frames differ in length, rate or start time");
    }
  }
}

Eigen::MatrixXcd stack_rows(std::span<const SampleFrame> frames) {
  require_compatible(frames, "stack_rows");
  Eigen::MatrixXcd x(static_cast<Eigen::Index>(frames.size()), frames.front().size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = frames[i].samples.transpose();
  }
  return x;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(base);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

SampleFrame sample_with_delay(const SignalFn& sig, double clock_delay_s, double sample_rate,
                              Eigen::Index count, NoiseSpec noise, double start_time) {
  if (count < 1) throw std::invalid_argument("sample_with_delay: count must be >= 1");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_with_delay: sample_rate must be > 0");
  if (noise.rms < 0.0) throw std::invalid_argument("sample_with_delay: noise rms must be >= 0");

  SampleFrame frame;
  frame.sample_rate = sample_rate;
  frame.start_time = start_time;
  frame.samples.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    frame.samples[k] = sig(frame.time_at(k) + clock_delay_s);
  }
  if (noise.rms > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, noise.rms / std::sqrt(2.0));
    for (Eigen::Index k = 0; k < count; ++k) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      frame.samples[k] += Complex{re, im};
    }
  }
  return frame;
}

SampleFrame sample_element(const SignalFn& sig, const ClockConfig& c, double sample_rate,
                           Eigen::Index count, NoiseSpec noise, double start_time) {
  return sample_with_delay(sig, config_total_delay(c), sample_rate, count, noise, start_time);
}

}  // namespace spica
