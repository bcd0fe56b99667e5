#pragma once

#include <optional>
#include <vector>

#include "spica/waveform.hpp"

namespace spica {

/// Far-field uniform linear array.
struct ArrayGeometry {
  int n_elements = 4;
  double spacing_over_lambda = 0.5;  ///< d / lambda_C
  double carrier_hz = 10e9;          ///< f_C

  void validate() const;
};

/// Inter-element arrival delay (d / lambda_C) * sin(theta) / f_C.
[[nodiscard]] double aoa_to_delay(const ArrayGeometry& g, double theta_deg);

struct SourceSpec {
  Waveform waveform;
  double aoa_deg = 0.0;
  /// When set, used as the inter-element delay in place of the angle.
  std::optional<double> delay_override_s;
};

[[nodiscard]] double inter_element_delay(const ArrayGeometry& g, const SourceSpec& s);

enum class SynthesisMode {
  BbDirect,   ///< pure envelope delays, no carrier rotation
  RfDerived,  ///< envelope delays plus carrier phase exp(-j 2 pi f_C i dt)
};

struct Scene {
  ArrayGeometry geometry;
  SourceSpec desired;
  std::vector<SourceSpec> undesired;
  /// Per-element static complex gain. Empty means all ones.
  std::vector<Complex> element_mismatch;
  SynthesisMode mode = SynthesisMode::BbDirect;

  void validate() const;
  [[nodiscard]] Complex mismatch(int element) const;
};

struct SourceSelector {
  enum class Kind { Desired, Undesired };
  Kind kind = Kind::Undesired;
  std::size_t index = 0;

  static SourceSelector desired() { return {Kind::Desired, 0}; }
  static SourceSelector undesired(std::size_t i = 0) { return {Kind::Undesired, i}; }
};

[[nodiscard]] const SourceSpec& select_source(const Scene& scene, SourceSelector sel);

/// Received signal at one element as a function of time. Elements are
/// zero-based: element 0 is the reference with zero delay.
class ElementSignal {
 public:
  ElementSignal(const Scene& scene, int element);

  [[nodiscard]] Complex operator()(double t) const;
  [[nodiscard]] int element() const { return element_; }

  /// Same signal multiplied by a constant phasor (LO phase shift).
  [[nodiscard]] ElementSignal rotated(Complex phasor) const;

 private:
  struct Component {
    Waveform waveform;
    double delay_s;
    Complex carrier;
  };
  std::vector<Component> components_;
  Complex gain_;
  int element_;
};

[[nodiscard]] ElementSignal element_signal(const Scene& scene, int element);

/// LO phasors exp(+j i 2 pi f_C dt_target) that remove the target's carrier
/// progression. Only defined for RfDerived scenes.
[[nodiscard]] std::vector<Complex> lo_align(const Scene& scene, SourceSelector target);

/// Element signals ready for delay-compensated sampling. In RfDerived mode
/// the LO phasors for `target` are applied; in BbDirect mode this is just
/// element_signal for every element.
[[nodiscard]] std::vector<ElementSignal> aligned_element_signals(
    const Scene& scene, SourceSelector target = SourceSelector::undesired());

}  // namespace spica
