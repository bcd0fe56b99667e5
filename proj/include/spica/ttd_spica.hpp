#pragma once

// Discrete time-delay cancellation: clock planning, delayed-clock sampling,
// truncated Hadamard multiply-accumulate, conversion gains and equalization.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spica/array.hpp"
#include "spica/sample_frame.hpp"

namespace spica {

// ---------------------------------------------------------------------------
// Clock planner

enum class Quadrant : int { IP = 0, QP = 1, IN = 2, QN = 3 };

inline constexpr std::int64_t kPiStepPs = 5;
inline constexpr std::int64_t kQuadrantStepPs = 1250;
inline constexpr std::int64_t kInterleaveStepPs = 5000;  // T_S at 200 MS/s
inline constexpr int kDefaultMaxInterleaveOffset = 2;

/// Delay state of one element's sampling clock: 8-bit PI code, quadrant
/// select and whole-period interleaver offset.
struct ClockConfig {
  int pi_code = 0;
  Quadrant quadrant = Quadrant::IP;
  int interleave_offset = 0;

  friend bool operator==(const ClockConfig&, const ClockConfig&) = default;

  /// Range checks on each field and on the total (<= max range).
  void validate(int max_interleave_offset = kDefaultMaxInterleaveOffset) const;
};

[[nodiscard]] const char* quadrant_name(Quadrant q);

/// Maximum compensable delay, max_offset * 5 ns + 5 ns (15 ns for the default).
[[nodiscard]] double max_plannable_delay(int max_interleave_offset = kDefaultMaxInterleaveOffset);

[[nodiscard]] std::int64_t config_total_delay_ps(const ClockConfig& c);
[[nodiscard]] double config_total_delay(const ClockConfig& c);

/// Canonical coarse-to-fine decomposition of `target_s`. Quantization error
/// never exceeds 2.5 ps. Offsets above 2 are an extrapolation for arrays
/// larger than four elements.
[[nodiscard]] ClockConfig plan_delay(double target_s,
                                     int max_interleave_offset = kDefaultMaxInterleaveOffset);

/// Interleaver limit for an n-element array, (n - 2).
[[nodiscard]] inline int interleave_limit_for(int n_elements) {
  return n_elements <= 4 ? kDefaultMaxInterleaveOffset : n_elements - 2;
}

/// plan_delay(i * dt) for every element. Negative dt is handled by
/// referencing delays to the last element.
[[nodiscard]] std::vector<ClockConfig> plan_array(int n_elements, double dt_s,
                                                  int max_interleave_offset = kDefaultMaxInterleaveOffset);

// ---------------------------------------------------------------------------
// Delayed-clock sampling

using SignalFn = std::function<Complex(double)>;

struct NoiseSpec {
  double rms = 0.0;  ///< total rms of circular complex AWGN
  std::uint64_t seed = 0;
};

/// samples_k = sig(start + k / fs + clock_delay) + noise. Delaying the clock
/// advances the signal argument, so an element whose arrival lags by D and
/// whose clock lags by D reproduces the reference samples.
[[nodiscard]] SampleFrame sample_with_delay(const SignalFn& sig, double clock_delay_s,
                                            double sample_rate, Eigen::Index count,
                                            NoiseSpec noise = {}, double start_time = 0.0);

[[nodiscard]] SampleFrame sample_element(const SignalFn& sig, const ClockConfig& c,
                                         double sample_rate, Eigen::Index count,
                                         NoiseSpec noise = {}, double start_time = 0.0);

/// Derives an independent noise seed from a base seed and sweep keys.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

// ---------------------------------------------------------------------------
// Truncated Hadamard matrix

/// Sylvester Hadamard matrix of order n (a power of two).
template <typename Scalar = double>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sylvester_hadamard(int n);

[[nodiscard]] bool is_power_of_two(int n);

/// (n-1) x n matrix of +-1: Sylvester order n with the all-ones row removed.
struct ThmMatrix {
  int n = 0;
  Eigen::MatrixXd rows;

  [[nodiscard]] int row_count() const { return n - 1; }
};

[[nodiscard]] ThmMatrix thm(int n);

/// output_r[k] = sum_i rows(r, i) * frames_i[k], with ideal unity-gain summation.
[[nodiscard]] std::vector<SampleFrame> mac_apply(std::span<const SampleFrame> frames, const ThmMatrix& m);

/// Row output with only element 0 connected: rows(r, 0) * frame.
[[nodiscard]] SampleFrame single_input_row(const SampleFrame& element0, const ThmMatrix& m, int row);

/// Desired conversion gain of THM row `row` (zero-based):
/// sum_i rows(row, i) exp(j 2 pi f i delta).
[[nodiscard]] Complex desired_gain(double f_hz, double delta_s, int row, int n);

// ---------------------------------------------------------------------------
// Post-cancellation equalization

using FrequencyResponse = std::function<Complex(double)>;

/// FFT bin frequencies in natural order (0, df, ..., -df).
[[nodiscard]] Eigen::VectorXd fft_bin_frequencies(Eigen::Index length, double sample_rate);

/// Zero-forcing in the frequency domain: bins with |H(f)| >= eps are divided
/// by H(f), the rest are zeroed.
[[nodiscard]] SampleFrame zero_force(const SampleFrame& in, const FrequencyResponse& response, double eps);

/// Zero-forcing against desired_gain for one row. `carrier_hz` shifts
/// the bin frequencies to RF for RfDerived scenes (0 for BbDirect).
[[nodiscard]] SampleFrame equalize(const SampleFrame& out, int row, double delta_s, int n, double eps,
                                   double carrier_hz = 0.0);

/// Default floor: 0.05 * max |G| over the frame's bins.
[[nodiscard]] double default_equalizer_floor(Eigen::Index length, double sample_rate, int row,
                                             double delta_s, int n, double carrier_hz = 0.0);

// ---------------------------------------------------------------------------

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sylvester_hadamard(int n) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (!is_power_of_two(n)) throw std::invalid_argument("sylvester_hadamard: order must be a power of two");
  Mat h = Mat::Constant(1, 1, Scalar(1));
  while (h.rows() < n) {
    const Eigen::Index m = h.rows();
    Mat next(2 * m, 2 * m);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h;
}

}  // namespace spica
