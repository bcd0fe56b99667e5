#include "spica/array.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spica {

void ArrayGeometry::validate() const {
  if (n_elements < 2) throw std::invalid_argument("ArrayGeometry: n_elements must be >= 2");
  if (!(spacing_over_lambda > 0.0)) throw std::invalid_argument("ArrayGeometry: spacing_over_lambda must be > 0");
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("ArrayGeometry: carrier_hz must be > 0");
}

double aoa_to_delay(const ArrayGeometry& g, double theta_deg) {
  if (std::abs(theta_deg) > 90.0) throw std::invalid_argument("aoa_to_delay: |theta| > 90 deg");
  return g.spacing_over_lambda * std::sin(theta_deg * kPi / 180.0) / g.carrier_hz;
}

double inter_element_delay(const ArrayGeometry& g, const SourceSpec& s) {
  return s.delay_override_s ? *s.delay_override_s : aoa_to_delay(g, s.aoa_deg);
}

void Scene::validate() const {
  geometry.validate();
  if (!element_mismatch.empty() &&
      element_mismatch.size() != static_cast<std::size_t>(geometry.n_elements)) {
    throw std::invalid_argument("Scene: element_mismatch length " +
                                std::to_string(element_mismatch.size()) + " != n_elements " +
                                std::to_string(geometry.n_elements));
  }
}

Complex Scene::mismatch(int element) const {
  return element_mismatch.empty() ? Complex{1.0, 0.0}
                                  : element_mismatch[static_cast<std::size_t>(element)];
}

const SourceSpec& select_source(const Scene& scene, SourceSelector sel) {
  if (sel.kind == SourceSelector::Kind::Desired) return scene.desired;
  if (sel.index >= scene.undesired.size()) throw std::out_of_range("select_source: no such undesired source");
  return scene.undesired[sel.index];
}

ElementSignal::ElementSignal(const Scene& scene, int element) : element_(element) {
  scene.validate();
  if (element < 0 || element >= scene.geometry.n_elements) {
    throw std::out_of_range("element_signal: element " + std::to_string(element) + " outside [0, " +
                            std::to_string(scene.geometry.n_elements) + ")");
  }
  gain_ = scene.mismatch(element);

  auto push = [&](const SourceSpec& src) {
    if (src.waveform.empty()) return;
    const double delay = element * inter_element_delay(scene.geometry, src);
    Complex carrier{1.0, 0.0};
    if (scene.mode == SynthesisMode::RfDerived) {
      carrier = std::polar(1.0, -2.0 * kPi * scene.geometry.carrier_hz * delay);
    }
    components_.push_back({src.waveform, delay, carrier});
  };
  push(scene.desired);
  for (const auto& u : scene.undesired) push(u);
}

Complex ElementSignal::operator()(double t) const {
  Complex acc{0.0, 0.0};
  for (const auto& c : components_) acc += c.carrier * c.waveform(t - c.delay_s);
  return gain_ * acc;
}

ElementSignal ElementSignal::rotated(Complex phasor) const {
  ElementSignal out = *this;
  out.gain_ *= phasor;
  return out;
}

ElementSignal element_signal(const Scene& scene, int element) { return ElementSignal(scene, element); }

std::vector<Complex> lo_align(const Scene& scene, SourceSelector target) {
  if (scene.mode != SynthesisMode::RfDerived) {
    throw std::logic_error("lo_align: BB_DIRECT scene has no carrier phase to align");
  }
  scene.validate();
  const double dt = inter_element_delay(scene.geometry, select_source(scene, target));
  const double step = 2.0 * kPi * scene.geometry.carrier_hz * dt;
  std::vector<Complex> phasors;
  phasors.reserve(static_cast<std::size_t>(scene.geometry.n_elements));
  for (int i = 0; i < scene.geometry.n_elements; ++i) phasors.push_back(std::polar(1.0, i * step));
  return phasors;
}

std::vector<ElementSignal> aligned_element_signals(const Scene& scene, SourceSelector target) {
  std::vector<ElementSignal> out;
  const int n = scene.geometry.n_elements;
  out.reserve(static_cast<std::size_t>(n));
  if (scene.mode == SynthesisMode::RfDerived) {
    const auto phasors = lo_align(scene, target);
    for (int i = 0; i < n; ++i) out.push_back(ElementSignal(scene, i).rotated(phasors[i]));
  } else {
    for (int i = 0; i < n; ++i) out.emplace_back(scene, i);
  }
  return out;
}

}  // namespace spica
