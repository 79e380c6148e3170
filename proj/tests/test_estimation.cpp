#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinlock/errors.hpp"
#include "spinlock/estimation.hpp"
#include "spinlock/units.hpp"

using namespace spinlock;

namespace {

const RateSet kRates{from_khz(1.27), from_khz(7.33), from_khz(4.42)};

}  // namespace

TEST_CASE("rng streams are deterministic and independent") {
  Rng a(12, "stream", 5);
  Rng b(12, "stream", 5);
  Rng c(12, "stream", 6);
  Rng d(12, "other", 5);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() == b.next_u64());
  CHECK(Rng(12, "stream", 5).next_u64() != c.next_u64());
  CHECK(Rng(12, "stream", 5).next_u64() != d.next_u64());

  Rng u(99);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  CHECK(Rng(1).binomial(100, 1.0) == 100u);
  CHECK(Rng(1).binomial(100, 0.0) == 0u);
}

TEST_CASE("population measurement") {
  const DensityMatrix rho = rho_from_bloch({0.0, 0.0, 0.2});  // p1 = 0.6
  MeasurementConfig cfg;
  cfg.spam_error = 0.0;
  cfg.shots = 0;  // noiseless mode
  CHECK(measure_population(rho, cfg) == doctest::Approx(0.6).epsilon(1e-14));

  cfg.spam_error = 0.05;
  // p_eff = p (1 - e) + (1 - p) e
  CHECK(measure_population(rho, cfg) ==
        doctest::Approx(0.6 * 0.95 + 0.4 * 0.05).epsilon(1e-14));

  cfg.shots = 500;
  cfg.seed = 7;
  const double s1 = measure_population(rho, cfg);
  const double s2 = measure_population(rho, cfg);
  CHECK(s1 == s2);  // same seed, same draw
  // The sample is a multiple of 1/shots.
  CHECK(std::abs(s1 * 500.0 - std::round(s1 * 500.0)) < 1e-9);
  // And within a generous binomial envelope of p_eff = 0.59.
  CHECK(std::abs(s1 - 0.59) < 5.0 * std::sqrt(0.59 * 0.41 / 500.0));
}

TEST_CASE("analysis pulses measure the right axes") {
  const std::vector<AnalysisPulse> set = resonant_pulse_set();
  REQUIRE(set.size() == 3u);
  const BlochVector axes[3] = {measurement_axis(set[0]),
                               measurement_axis(set[1]),
                               measurement_axis(set[2])};
  CHECK(std::abs(axes[0].x - 1.0) < 1e-12);
  CHECK(std::abs(axes[0].y) < 1e-12);
  CHECK(std::abs(axes[0].z) < 1e-12);
  CHECK(std::abs(axes[1].y - 1.0) < 1e-12);
  CHECK(std::abs(axes[2].z - 1.0) < 1e-12);

  // Unitarity of the analysis rotations.
  for (const auto& pulse : set) {
    const ComplexMatrix u = pulse.unitary();
    CHECK((u * u.adjoint() - identity(2)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // tau_pi is fixed by omega_mw * tau = pi.
  const PulseTimings timings;
  CHECK(timings.tau_pi() ==
        doctest::Approx(std::numbers::pi / timings.omega_mw).epsilon(1e-14));
}

TEST_CASE("resonant tomography inverts exactly in the noiseless limit") {
  MeasurementConfig cfg;
  cfg.shots = 0;
  cfg.spam_error = 0.0;
  const BlochVector m{0.31, -0.42, 0.27};
  const BlochVector est = tomography_resonant(rho_from_bloch(m), cfg);
  CHECK(std::abs(est.x - m.x) < 1e-10);
  CHECK(std::abs(est.y - m.y) < 1e-10);
  CHECK(std::abs(est.z - m.z) < 1e-10);
}

TEST_CASE("spam flip biases each component by 1 - 2e") {
  MeasurementConfig cfg;
  cfg.shots = 0;
  cfg.spam_error = 7e-3;
  const BlochVector m{0.5, 0.1, -0.6};
  const BlochVector est = tomography_resonant(rho_from_bloch(m), cfg);
  const double k = 1.0 - 2.0 * cfg.spam_error;
  CHECK(est.x == doctest::Approx(k * m.x).epsilon(1e-10));
  CHECK(est.y == doctest::Approx(k * m.y).epsilon(1e-10));
  CHECK(est.z == doctest::Approx(k * m.z).epsilon(1e-10));
}

TEST_CASE("finite shots estimate is clipped and converges") {
  MeasurementConfig cfg;
  cfg.spam_error = 0.0;
  const BlochVector m{0.0, 0.0, 1.0};  // pole state: noise pushes outward
  cfg.shots = 100;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const BlochVector est = tomography_resonant(rho_from_bloch(m), cfg);
    CHECK(est.norm() <= 1.0 + 1e-12);
  }
}

TEST_CASE("detuned tomography maximum likelihood") {
  MeasurementConfig cfg;
  cfg.shots = 0;
  cfg.spam_error = 0.0;
  const BlochVector m{0.25, 0.35, -0.40};
  const BlochVector est =
      tomography_detuned(rho_from_bloch(m), from_khz(16.0), cfg);
  CHECK(std::abs(est.x - m.x) < 1e-5);
  CHECK(std::abs(est.y - m.y) < 1e-5);
  CHECK(std::abs(est.z - m.z) < 1e-5);

  // A detuning so large the pulse axes collapse onto sigma_z cannot span
  // the sphere (the axes stay within ~2 omega_mw / delta of the pole).
  CHECK_THROWS_AS(
      tomography_detuned(rho_from_bloch(m), from_mhz(5.0e7), cfg),
      IllConditionedDesignError);
}

TEST_CASE("rate fit protocol recovers the rates without noise") {
  // Zero shots means the exact populations feed the fit; the only error
  // left is the integrator's, a few 1e-6 relative at the default step.
  MeasurementConfig cfg;
  cfg.shots = 0;
  cfg.spam_error = 0.0;
  const RateFitReport report = rate_fit_protocol(kRates, cfg, 30);

  CHECK(report.gamma_g == doctest::Approx(kRates.gamma_g()).epsilon(1e-4));
  CHECK(report.gamma_d == doctest::Approx(kRates.gamma_d()).epsilon(1e-4));
  CHECK(report.gamma_sum ==
        doctest::Approx(kRates.gamma_g() + kRates.gamma_d()).epsilon(1e-4));
  CHECK(report.gamma_z == doctest::Approx(kRates.gamma_z()).epsilon(1e-4));
  // Coherence decay rate 2 g_z + (g_g + g_d) / 2 drives the last fit.
  CHECK(report.coherence.params[1] ==
        doctest::Approx(2.0 * kRates.gamma_z() +
                        0.5 * (kRates.gamma_g() + kRates.gamma_d()))
            .epsilon(1e-4));

  REQUIRE(report.gain_data.t.size() == 30u);
  REQUIRE(report.gain_data.p.size() == 30u);
  CHECK(report.damping_data.t.size() == 30u);
  CHECK(report.combined_data.t.size() == 30u);
  CHECK(report.coherence_data.t.size() == 30u);
  // Population samples are probabilities.
  for (double p : report.combined_data.p) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("spam does not bias the fitted rates") {
  // The flip maps p -> p (1-2e) + e, which rescales amplitude and offset
  // but preserves the decay exponent, so the noiseless fit must land on
  // the same rates with and without it.
  MeasurementConfig clean;
  clean.shots = 0;
  clean.spam_error = 0.0;
  MeasurementConfig flipped = clean;
  flipped.spam_error = 7e-3;
  const RateFitReport a = rate_fit_protocol(kRates, clean, 30);
  const RateFitReport b = rate_fit_protocol(kRates, flipped, 30);
  CHECK(b.gamma_g == doctest::Approx(a.gamma_g).epsilon(1e-7));
  CHECK(b.gamma_d == doctest::Approx(a.gamma_d).epsilon(1e-7));
  CHECK(b.gamma_z == doctest::Approx(a.gamma_z).epsilon(1e-7));
}

TEST_CASE("rate fit with shot noise is reproducible") {
  MeasurementConfig cfg;
  cfg.shots = 500;
  cfg.spam_error = 7e-3;
  cfg.seed = 1;
  const RateFitReport a = rate_fit_protocol(kRates, cfg, 30);
  const RateFitReport b = rate_fit_protocol(kRates, cfg, 30);
  CHECK(a.gamma_g == b.gamma_g);
  CHECK(a.gamma_d == b.gamma_d);
  CHECK(a.gamma_z == b.gamma_z);
  // Errors are propagated, not zero, under noise.
  CHECK(a.gamma_g_error > 0.0);
  CHECK(a.gamma_d_error > 0.0);
  CHECK(a.gamma_z_error > 0.0);
}
