#pragma once

// Phase-shift cancellation baseline: per-element carrier phase alignment
// followed by a balanced +-1 combination. Exact at one frequency only.

#include <span>
#include <vector>

#include "spica/array.hpp"
#include "spica/sample_frame.hpp"

namespace spica {

struct PsCancelPlan {
  int n_elements = 4;
  double align_phase_rad = 0.0;  ///< per-element step, 2 pi f_C dt_UD
  std::vector<double> signs;     ///< +-1, balanced

  void validate() const;
};

/// Alternating (+1, -1, +1, ...) pattern: even elements subtracted from odd ones.
[[nodiscard]] std::vector<double> alternating_signs(int n);

[[nodiscard]] PsCancelPlan make_ps_plan(int n, double align_phase_rad);

/// 2 pi f_C dt_UD = (d / (lambda_C / 2)) pi sin(theta_UD).
[[nodiscard]] double ps_align_phase(const ArrayGeometry& g, double theta_ud_deg);

/// Residual undesired gain at normalized frequency f / f_C after phase-shift
/// alignment. Depends on frequency only through (1 - f_norm).
[[nodiscard]] Complex ps_residual_gain(const PsCancelPlan& plan, double f_norm, double theta_ud_deg,
                                       double d_over_lambda);

/// Rejection in dB against a reference gain: 20 log10(reference / |residual|).
/// Use reference = N for the full-array convention, 1 for per-element.
[[nodiscard]] double ps_rejection_db(Complex residual, double reference);

/// sum_i signs_i exp(j i align_phase) frames_i, sample by sample.
[[nodiscard]] SampleFrame ps_cancel_stream(std::span<const SampleFrame> frames, const PsCancelPlan& plan);

}  // namespace spica
