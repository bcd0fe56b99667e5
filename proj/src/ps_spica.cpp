#include "spica/ps_spica.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace spica {

void PsCancelPlan::validate() const {
  if (n_elements < 1) throw std::invalid_argument("PsCancelPlan: n_elements must be >= 1");
  if (signs.size() != static_cast<std::size_t>(n_elements)) {
    throw std::invalid_argument("PsCancelPlan: signs length must equal n_elements");
  }
  int balance = 0;
  for (double s : signs) {
    if (s != 1.0 && s != -1.0) throw std::invalid_argument("PsCancelPlan: signs must be +-1");
    balance += s > 0.0 ? 1 : -1;
  }
  // A single element cannot be balanced; it degenerates to a pass-through.
  if (n_elements > 1 && balance != 0) throw std::invalid_argument("PsCancelPlan: signs are not balanced");
}

std::vector<double> alternating_signs(int n) {
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : -1.0;
  return s;
}

PsCancelPlan make_ps_plan(int n, double align_phase_rad) {
  PsCancelPlan plan{n, align_phase_rad, alternating_signs(n)};
  plan.validate();
  return plan;
}

double ps_align_phase(const ArrayGeometry& g, double theta_ud_deg) {
  if (std::abs(theta_ud_deg) > 90.0) throw std::invalid_argument("ps_align_phase: |theta| > 90 deg");
  return 2.0 * g.spacing_over_lambda * kPi * std::sin(theta_ud_deg * kPi / 180.0);
}

Complex ps_residual_gain(const PsCancelPlan& plan, double f_norm, double theta_ud_deg, double d_over_lambda) {
  plan.validate();
  if (!(f_norm > 0.0)) throw std::invalid_argument("ps_residual_gain: f_norm must be > 0");
  const double step = 2.0 * kPi * d_over_lambda * std::sin(theta_ud_deg * kPi / 180.0) * (1.0 - f_norm);
  Complex acc{0.0, 0.0};
  for (int i = 0; i < plan.n_elements; ++i) {
    acc += plan.signs[static_cast<std::size_t>(i)] * std::polar(1.0, i * step);
  }
  return acc;
}

double ps_rejection_db(Complex residual, double reference) {
  const double mag = std::abs(residual);
  if (mag == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(reference / mag);
}

SampleFrame ps_cancel_stream(std::span<const SampleFrame> frames, const PsCancelPlan& plan) {
  plan.validate();
  if (static_cast<int>(frames.size()) != plan.n_elements) {
    throw std::invalid_argument("ps_cancel_stream: frame count " + std::to_string(frames.size()) +
                                " != plan size " + std::to_string(plan.n_elements));
  }
  const Eigen::MatrixXcd x = stack_rows(frames);
  Eigen::RowVectorXcd w(plan.n_elements);
  for (int i = 0; i < plan.n_elements; ++i) {
    w[i] = plan.signs[static_cast<std::size_t>(i)] * std::polar(1.0, i * plan.align_phase_rad);
  }
  SampleFrame out;
  out.samples = (w * x).transpose();
  out.sample_rate = frames.front().sample_rate;
  out.start_time = frames.front().start_time;
  return out;
}

}  // namespace spica
