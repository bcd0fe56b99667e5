#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spica/waveform.hpp"

namespace spica {

/// Uniform-rate complex sample stream. Sample k is taken at
/// start_time + k / sample_rate on the frame's own clock.
struct SampleFrame {
  Eigen::VectorXcd samples;
  double sample_rate = 200e6;
  double start_time = 0.0;
  std::optional<int> element_tag;

  [[nodiscard]] Eigen::Index size() const { return samples.size(); }
  [[nodiscard]] double time_at(Eigen::Index k) const {
    return start_time + static_cast<double>(k) / sample_rate;
  }
  void validate() const;
};

/// Throws unless every frame shares length, rate and start time.
void require_compatible(std::span<const SampleFrame> frames, const char* who);

/// Frames stacked as rows of an (n_frames x length) matrix.
[[nodiscard]] Eigen::MatrixXcd stack_rows(std::span<const SampleFrame> frames);

}  // namespace spica
