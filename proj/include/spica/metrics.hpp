#pragma once

// Measurement definitions: Welch PSD, band-integrated cancellation depth,
// single-tone conversion gain, EVM and genie-timed symbol recovery.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spica/sample_frame.hpp"
#include "spica/waveform.hpp"

namespace spica {

enum class WindowKind { Hann, Rectangular };

[[nodiscard]] Eigen::VectorXd make_window(WindowKind kind, Eigen::Index n);

/// Two-sided averaged periodogram, frequencies in [-fs/2, fs/2).
///
/// Each bin holds power normalized by (sum w)^2, so a bin-centred tone of
/// amplitude A reads |A|^2 in its peak bin. Band powers divide the bin sum by
/// the window's equivalent noise bandwidth in bins.
struct PsdEstimate {
  Eigen::VectorXd freqs;
  Eigen::VectorXd power;     ///< linear, relative to full scale 1.0
  Eigen::VectorXd power_db;
  int nfft = 0;
  WindowKind window = WindowKind::Hann;
  double overlap = 0.5;
  double sample_rate = 0.0;
  double enbw_bins = 1.0;
  int segments = 0;
};

struct Band {
  double lo_hz;
  double hi_hz;
};

[[nodiscard]] PsdEstimate welch_psd(const SampleFrame& frame, int nfft = 4096, double overlap = 0.5,
                                    WindowKind window = WindowKind::Hann);

/// Linear power inside [lo, hi], inclusive of bin centres on the edges.
[[nodiscard]] double band_power(const PsdEstimate& psd, Band band);

/// 10 log10(P_ref / P_canc) over `band`. +inf when the cancelled power is zero.
[[nodiscard]] double cancellation_depth(const SampleFrame& ref, const SampleFrame& canc, Band band,
                                        int nfft = 4096, double overlap = 0.5);

/// 10 log10(P_all(f) / P_one(f)) read at the PSD bin nearest f. Empty when
/// either tone bin is less than 10 dB above that frame's median bin.
[[nodiscard]] std::optional<double> conversion_gain_measured(const SampleFrame& all_in,
                                                             const SampleFrame& one_in, double f_hz,
                                                             int nfft = 4096);

/// Percent rms error after a least-squares complex gain fit of rx onto ref.
[[nodiscard]] double evm_percent(std::span<const Complex> rx, std::span<const Complex> ref);

struct RecoveredSymbols {
  std::size_t first_index = 0;  ///< index into the stream's symbol list
  std::vector<Complex> symbols;
};

/// Matched RRC filter and symbol-rate decimation with known timing: symbol k
/// is centred at genie_timing + k / symbol_rate on the frame's time axis.
/// Only symbols whose full filter support lies inside the frame are returned.
[[nodiscard]] RecoveredSymbols recover_symbols(const SampleFrame& frame, const StreamTerm& stream,
                                               double genie_timing_s);

}  // namespace spica
