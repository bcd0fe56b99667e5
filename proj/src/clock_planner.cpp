#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "spica/ttd_spica.hpp"

namespace spica {

namespace {

constexpr std::int64_t kQuadrantCount = 4;
constexpr int kPiCodeMax = 255;
// Products such as 3 * 5e-9 land a few ulps above 15e-9.
constexpr double kRoundingSlackS = 1e-18;

std::int64_t max_range_ps(int max_interleave_offset) {
  return max_interleave_offset * kInterleaveStepPs + kQuadrantCount * kQuadrantStepPs;
}

}  // namespace

const char* quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::IP: return "I_P";
    case Quadrant::QP: return "Q_P";
    case Quadrant::IN: return "I_N";
    case Quadrant::QN: return "Q_N";
  }
  return "?";
}

void ClockConfig::validate(int max_interleave_offset) const {
  if (pi_code < 0 || pi_code > kPiCodeMax) {
    throw std::out_of_range("ClockConfig: pi_code " + std::to_string(pi_code) + " outside 0..255");
  }
  const int q = static_cast<int>(quadrant);
  if (q < 0 || q > 3) throw std::out_of_range("ClockConfig: invalid quadrant");
  if (interleave_offset < 0 || interleave_offset > max_interleave_offset) {
    throw std::out_of_range("ClockConfig: interleave_offset " + std::to_string(interleave_offset) +
                            " outside 0.." + std::to_string(max_interleave_offset));
  }
  if (config_total_delay_ps(*this) > max_range_ps(max_interleave_offset)) {
    throw std::out_of_range("ClockConfig: total delay exceeds the interleaver range");
  }
}

double max_plannable_delay(int max_interleave_offset) {
  return static_cast<double>(max_range_ps(max_interleave_offset)) * 1e-12;
}

std::int64_t config_total_delay_ps(const ClockConfig& c) {
  return c.pi_code * kPiStepPs + static_cast<std::int64_t>(c.quadrant) * kQuadrantStepPs +
         c.interleave_offset * kInterleaveStepPs;
}

double config_total_delay(const ClockConfig& c) {
  return static_cast<double>(config_total_delay_ps(c)) * 1e-12;
}

ClockConfig plan_delay(double target_s, int max_interleave_offset) {
  if (max_interleave_offset < 0) throw std::invalid_argument("plan_delay: negative interleave limit");
  const double range_s = max_plannable_delay(max_interleave_offset);
  if (!(target_s >= 0.0) || target_s > range_s + kRoundingSlackS) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "plan_delay: target %.6g s outside [0, %.6g] s", target_s, range_s);
    throw std::out_of_range(msg);
  }
  const double target_ps = std::min(target_s, range_s) * 1e12;

  ClockConfig c;
  c.interleave_offset = static_cast<int>(std::min<double>(
      std::floor(target_ps / static_cast<double>(kInterleaveStepPs)), max_interleave_offset));
  const double r1 = target_ps - static_cast<double>(c.interleave_offset * kInterleaveStepPs);
  const auto q = static_cast<int>(
      std::min<double>(std::floor(r1 / static_cast<double>(kQuadrantStepPs)), kQuadrantCount - 1));
  c.quadrant = static_cast<Quadrant>(q);
  const double r2 = r1 - static_cast<double>(q * kQuadrantStepPs);
  const auto code = static_cast<long long>(std::llround(r2 / static_cast<double>(kPiStepPs)));
  c.pi_code = static_cast<int>(std::clamp<long long>(code, 0, kPiCodeMax));
  return c;
}

std::vector<ClockConfig> plan_array(int n_elements, double dt_s, int max_interleave_offset) {
  std::vector<ClockConfig> out;
  out.reserve(static_cast<std::size_t>(n_elements));
  const double base = dt_s < 0.0 ? -(n_elements - 1) * dt_s : 0.0;
  for (int i = 0; i < n_elements; ++i) {
    out.push_back(plan_delay(std::max(0.0, base + i * dt_s), max_interleave_offset));
  }
  return out;
}

}  // namespace spica
