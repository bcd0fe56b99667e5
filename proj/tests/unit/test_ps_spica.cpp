#include <cmath>
#include <random>

#include "doctest.h"
#include "spica/metrics.hpp"
#include "spica/ps_spica.hpp"
#include "spica/ttd_spica.hpp"

using namespace spica;

namespace {

// Closed form for the alternating pattern: |sum (-1)^i e^{j i x}| =
// |sin(N (x + pi) / 2) / sin((x + pi) / 2)|.
double dirichlet_residual(int n, double f_norm, double theta_deg, double d_over_lambda) {
  const double x = 2.0 * kPi * d_over_lambda * std::sin(theta_deg * kPi / 180.0) * (1.0 - f_norm);
  const double half = 0.5 * (x + kPi);
  return std::abs(std::sin(n * half) / std::sin(half));
}

}  // namespace

TEST_CASE("ps_align_phase") {
  CHECK(ps_align_phase(ArrayGeometry{4, 0.5, 1e9}, 90.0) == doctest::Approx(kPi));
  CHECK(ps_align_phase(ArrayGeometry{4, 0.5, 1e9}, 45.0) == doctest::Approx(2.2214415).epsilon(1e-7));
  CHECK(ps_align_phase(ArrayGeometry{4, 0.5, 1e9}, 0.0) == 0.0);
  CHECK_THROWS(ps_align_phase(ArrayGeometry{4, 0.5, 1e9}, 91.0));
}

TEST_CASE("plan validation") {
  CHECK_NOTHROW(make_ps_plan(4, 0.0));
  CHECK_NOTHROW(make_ps_plan(1, 0.0));
  CHECK_THROWS(make_ps_plan(3, 0.0));
  CHECK_THROWS((PsCancelPlan{4, 0.0, {1.0, 1.0, 1.0, -1.0}}.validate()));
  CHECK_THROWS((PsCancelPlan{4, 0.0, {1.0, 0.5, -1.0, -0.5}}.validate()));
  CHECK_THROWS((PsCancelPlan{4, 0.0, {1.0, -1.0}}.validate()));
}

TEST_CASE("residual gain examples") {
  const auto p4 = make_ps_plan(4, 0.0);
  CHECK(std::abs(ps_residual_gain(p4, 1.0, 45.0, 0.5)) == 0.0);
  CHECK(ps_rejection_db(ps_residual_gain(p4, 1.0, 45.0, 0.5), 4.0) == std::numeric_limits<double>::infinity());

  const double r4 = std::abs(ps_residual_gain(p4, 1.1, 45.0, 0.5));
  CHECK(r4 == doctest::Approx(0.43248).epsilon(1e-4));
  CHECK(r4 == doctest::Approx(dirichlet_residual(4, 1.1, 45.0, 0.5)).epsilon(1e-12));
  CHECK(ps_rejection_db(ps_residual_gain(p4, 1.1, 45.0, 0.5), 4.0) == doctest::Approx(19.3219).epsilon(1e-4));

  const double r16 = std::abs(ps_residual_gain(make_ps_plan(16, 0.0), 1.1, 45.0, 0.5));
  CHECK(r16 == doctest::Approx(dirichlet_residual(16, 1.1, 45.0, 0.5)).epsilon(1e-10));
  CHECK(r16 > r4);

  CHECK_THROWS(ps_residual_gain(p4, 0.0, 45.0, 0.5));
}

TEST_CASE("residual depends only on (1 - f_norm) d sin(theta)") {
  const auto p = make_ps_plan(8, 0.0);
  // Doubling spacing and halving the offset leaves the product fixed.
  CHECK(std::abs(ps_residual_gain(p, 1.1, 30.0, 0.5) - ps_residual_gain(p, 1.05, 30.0, 1.0)) < 1e-12);
  CHECK(std::abs(ps_residual_gain(p, 0.9, 45.0, 0.5)) ==
        doctest::Approx(std::abs(ps_residual_gain(p, 1.1, 45.0, 0.5))));
}

TEST_CASE("residual grows monotonically away from the carrier") {
  // Over the full 20 % band for N = 4; for larger arrays only up to the
  // first residual peak, |x| < pi / N, where x is the per-element phase error.
  for (int n : {4, 16, 64}) {
    CAPTURE(n);
    const auto p = make_ps_plan(n, 0.0);
    const double x_per_df = 2.0 * kPi * 0.5 * std::sin(kPi / 4.0);
    const double df_max = n == 4 ? 0.1 : kPi / n / x_per_df * 0.999;
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double df = df_max * k / 100.0;
      const double r = std::abs(ps_residual_gain(p, 1.0 + df, 45.0, 0.5));
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("ps_cancel_stream nulls a DC target and passes N = 1") {
  const Eigen::Index len = 64;
  std::vector<SampleFrame> frames(4);
  for (auto& f : frames) f.samples = Eigen::VectorXcd::Constant(len, Complex{0.3, -0.7});
  const auto out = ps_cancel_stream(frames, make_ps_plan(4, 0.0));
  CHECK(out.samples.cwiseAbs().maxCoeff() == 0.0);

  std::vector<SampleFrame> one(1);
  one[0].samples = Eigen::VectorXcd::LinSpaced(len, 0.0, 1.0);
  const auto passed = ps_cancel_stream(one, make_ps_plan(1, 1.234));
  CHECK(passed.samples == one[0].samples);

  CHECK_THROWS(ps_cancel_stream(std::span<const SampleFrame>(frames.data(), 3), make_ps_plan(4, 0.0)));
}

TEST_CASE("streamed tones reproduce the analytic residual") {
  Scene s;
  s.geometry = ArrayGeometry{4, 0.5, 1e9};
  s.mode = SynthesisMode::RfDerived;
  const auto plan = make_ps_plan(4, ps_align_phase(s.geometry, 45.0));
  for (int mhz = 1; mhz <= 99; mhz += 7) {
    const double f = mhz * 1e6;
    SourceSpec u;
    u.waveform = Waveform::tone(1.0, f);
    u.aoa_deg = 45.0;
    s.undesired = {u};
    std::vector<SampleFrame> frames;
    for (int i = 0; i < 4; ++i) {
      const auto sig = element_signal(s, i);
      frames.push_back(sample_with_delay([&sig](double t) { return sig(t); }, 0.0, 200e6, 256));
    }
    const auto out = ps_cancel_stream(frames, plan);
    const double measured_db = 20.0 * std::log10(out.samples.cwiseAbs().mean());
    const double theory_db = 20.0 * std::log10(std::abs(ps_residual_gain(plan, 1.0 + f / 1e9, 45.0, 0.5)));
    CAPTURE(mhz);
    CHECK(std::abs(measured_db - theory_db) <= 0.1);
  }
}
