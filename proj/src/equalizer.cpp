#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "spica/ttd_spica.hpp"

namespace spica {

Eigen::VectorXd fft_bin_frequencies(Eigen::Index length, double sample_rate) {
  Eigen::VectorXd f(length);
  const double df = sample_rate / static_cast<double>(length);
  for (Eigen::Index k = 0; k < length; ++k) {
    const Eigen::Index signed_k = (k < (length + 1) / 2) ? k : k - length;
    f[k] = static_cast<double>(signed_k) * df;
  }
  return f;
}

SampleFrame zero_force(const SampleFrame& in, const FrequencyResponse& response, double eps) {
  in.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("zero_force: eps must be > 0");

  const auto n = static_cast<std::size_t>(in.size());
  std::vector<Complex> time(in.samples.data(), in.samples.data() + n);
  std::vector<Complex> spec;
  Eigen::FFT<double> fft;
  fft.fwd(spec, time);

  const Eigen::VectorXd freqs = fft_bin_frequencies(in.size(), in.sample_rate);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex h = response(freqs[static_cast<Eigen::Index>(k)]);
    spec[k] = std::abs(h) >= eps ? spec[k] / h : Complex{0.0, 0.0};
  }
  fft.inv(time, spec);

  SampleFrame out = in;
  out.samples = Eigen::Map<const Eigen::VectorXcd>(time.data(), static_cast<Eigen::Index>(n));
  return out;
}

SampleFrame equalize(const SampleFrame& out, int row, double delta_s, int n, double eps, double carrier_hz) {
  return zero_force(
      out, [=](double f) { return desired_gain(carrier_hz + f, delta_s, row, n); }, eps);
}

double default_equalizer_floor(Eigen::Index length, double sample_rate, int row, double delta_s, int n,
                               double carrier_hz) {
  const Eigen::VectorXd freqs = fft_bin_frequencies(length, sample_rate);
  double peak = 0.0;
  for (Eigen::Index k = 0; k < length; ++k) {
    peak = std::max(peak, std::abs(desired_gain(carrier_hz + freqs[k], delta_s, row, n)));
  }
  return 0.05 * peak;
}

}  // namespace spica
