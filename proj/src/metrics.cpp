#include "spica/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace spica {

namespace {

double to_db(double p) { return 10.0 * std::log10(std::max(p, std::numeric_limits<double>::min())); }

Eigen::Index nearest_bin(const PsdEstimate& psd, double f_hz) {
  Eigen::Index best = 0;
  (psd.freqs.array() - f_hz).abs().minCoeff(&best);
  return best;
}

double median(Eigen::VectorXd v) {
  auto* b = v.data();
  auto* e = b + v.size();
  auto* mid = b + v.size() / 2;
  std::nth_element(b, mid, e);
  return *mid;
}

}  // namespace

Eigen::VectorXd make_window(WindowKind kind, Eigen::Index n) {
  if (kind == WindowKind::Rectangular) return Eigen::VectorXd::Ones(n);
  // Periodic Hann: a bin-centred tone lands on exactly one peak bin.
  Eigen::VectorXd w(n);
  for (Eigen::Index k = 0; k < n; ++k) w[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / n);
  return w;
}

PsdEstimate welch_psd(const SampleFrame& frame, int nfft, double overlap, WindowKind window) {
  frame.validate();
  if (nfft < 2) throw std::invalid_argument("welch_psd: nfft must be >= 2");
  if (overlap < 0.0 || overlap >= 1.0) throw std::invalid_argument("welch_psd: overlap must be in [0, 1)");
  if (frame.size() < nfft) {
    throw std::invalid_argument("welch_psd: frame length " + std::to_string(frame.size()) +
                                " shorter than nfft " + std::to_string(nfft));
  }

  const Eigen::VectorXd w = make_window(window, nfft);
  const double sum_w = w.sum();
  const double sum_w2 = w.squaredNorm();
  const auto step = std::max<Eigen::Index>(1, std::lround(nfft * (1.0 - overlap)));
  const Eigen::Index segments = 1 + (frame.size() - nfft) / step;

  Eigen::FFT<double> fft;
  std::vector<Complex> seg(static_cast<std::size_t>(nfft));
  std::vector<Complex> spec;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(nfft);
  for (Eigen::Index s = 0; s < segments; ++s) {
    const Eigen::Index off = s * step;
    for (int k = 0; k < nfft; ++k) seg[static_cast<std::size_t>(k)] = frame.samples[off + k] * w[k];
    fft.fwd(spec, seg);
    for (int k = 0; k < nfft; ++k) acc[k] += std::norm(spec[static_cast<std::size_t>(k)]);
  }
  acc /= static_cast<double>(segments) * sum_w * sum_w;

  PsdEstimate psd;
  psd.nfft = nfft;
  psd.window = window;
  psd.overlap = overlap;
  psd.sample_rate = frame.sample_rate;
  psd.enbw_bins = nfft * sum_w2 / (sum_w * sum_w);
  psd.segments = static_cast<int>(segments);
  psd.freqs.resize(nfft);
  psd.power.resize(nfft);
  const int half = nfft / 2;
  const double df = frame.sample_rate / nfft;
  for (int i = 0; i < nfft; ++i) {
    const int k = i - half;                   // -half .. nfft-half-1
    const int src = k < 0 ? k + nfft : k;
    psd.freqs[i] = k * df;
    psd.power[i] = acc[src];
  }
  psd.power_db = psd.power.unaryExpr(&to_db);
  return psd;
}

double band_power(const PsdEstimate& psd, Band band) {
  if (band.hi_hz < band.lo_hz) throw std::invalid_argument("band_power: hi < lo");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < psd.freqs.size(); ++i) {
    if (psd.freqs[i] >= band.lo_hz && psd.freqs[i] <= band.hi_hz) sum += psd.power[i];
  }
  return sum / psd.enbw_bins;
}

double cancellation_depth(const SampleFrame& ref, const SampleFrame& canc, Band band, int nfft, double overlap) {
  if (ref.sample_rate != canc.sample_rate) throw std::invalid_argument("cancellation_depth: sample rates differ");
  const double p_ref = band_power(welch_psd(ref, nfft, overlap), band);
  const double p_canc = band_power(welch_psd(canc, nfft, overlap), band);
  if (p_canc == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(p_ref / p_canc);
}

std::optional<double> conversion_gain_measured(const SampleFrame& all_in, const SampleFrame& one_in, double f_hz,
                                               int nfft) {
  if (all_in.sample_rate != one_in.sample_rate) {
    throw std::invalid_argument("conversion_gain_measured: sample rates differ");
  }
  const PsdEstimate p_all = welch_psd(all_in, nfft);
  const PsdEstimate p_one = welch_psd(one_in, nfft);
  const Eigen::Index bin = nearest_bin(p_all, f_hz);

  constexpr double kMinToneOverFloor = 10.0;  // linear power ratio, 10 dB
  const double all = p_all.power[bin];
  const double one = p_one.power[bin];
  if (!(all > kMinToneOverFloor * median(p_all.power)) || !(one > kMinToneOverFloor * median(p_one.power))) {
    return std::nullopt;
  }
  return 10.0 * std::log10(all / one);
}

double evm_percent(std::span<const Complex> rx, std::span<const Complex> ref) {
  if (rx.size() != ref.size()) throw std::invalid_argument("evm_percent: length mismatch");
  if (rx.empty()) throw std::invalid_argument("evm_percent: empty input");
  const Eigen::Map<const Eigen::VectorXcd> r(rx.data(), static_cast<Eigen::Index>(rx.size()));
  const Eigen::Map<const Eigen::VectorXcd> s(ref.data(), static_cast<Eigen::Index>(ref.size()));

  const double rx_power = r.squaredNorm();
  const Complex gain = rx_power > 0.0 ? r.dot(s) / rx_power : Complex{0.0, 0.0};  // dot conjugates r
  const double err = (gain * r - s).squaredNorm();
  const double ref_power = s.squaredNorm();
  if (!(ref_power > 0.0)) throw std::invalid_argument("evm_percent: zero reference power");
  return 100.0 * std::sqrt(err / ref_power);
}

RecoveredSymbols recover_symbols(const SampleFrame& frame, const StreamTerm& stream, double genie_timing_s) {
  frame.validate();
  const double fs = frame.sample_rate;
  const double period = stream.symbol_period();
  const double half_span = stream.span_symbols() * period;
  const double t_first = frame.start_time;
  const double t_last = frame.time_at(frame.size() - 1);
  const auto n_syms = stream.symbols().size();
  const double norm = stream.symbol_rate() / fs;

  RecoveredSymbols out;
  bool started = false;
  for (std::size_t k = 0; k < n_syms; ++k) {
    const double centre = genie_timing_s + static_cast<double>(k) * period;
    if (centre - half_span < t_first || centre + half_span > t_last) {
      if (started) break;
      continue;
    }
    if (!started) {
      out.first_index = k;
      started = true;
    }
    const auto n0 = static_cast<Eigen::Index>(std::ceil((centre - half_span - t_first) * fs));
    const auto n1 = static_cast<Eigen::Index>(std::floor((centre + half_span - t_first) * fs));
    Complex acc{0.0, 0.0};
    for (Eigen::Index n = std::max<Eigen::Index>(0, n0); n <= std::min(n1, frame.size() - 1); ++n) {
      acc += frame.samples[n] * stream.pulse(frame.time_at(n) - centre);
    }
    out.symbols.push_back(norm * acc);
  }
  if (out.symbols.empty()) throw std::invalid_argument("recover_symbols: frame does not cover any full symbol span");
  return out;
}

}  // namespace spica
