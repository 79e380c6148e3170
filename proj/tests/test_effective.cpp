#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "spinlock/effective.hpp"
#include "spinlock/errors.hpp"
#include "spinlock/logging.hpp"
#include "spinlock/units.hpp"

using namespace spinlock;

namespace {

const double kGg = from_khz(1.27);
const double kGd = from_khz(7.33);

struct WarnCapture {
  std::vector<std::string> messages;
  WarnSink previous;

  WarnCapture() {
    previous = set_warn_sink(
        [this](const std::string& m) { messages.push_back(m); });
  }
  ~WarnCapture() { set_warn_sink(previous); }
};

}  // namespace

TEST_CASE("calibrated scheme hits the target rates") {
  const YbLevelScheme scheme = yb_calibrated_scheme(kGg, kGd);
  CHECK_NOTHROW(scheme.validate());

  // The calibration inverts the closed form, so both targets land exactly.
  const RateSet closed = yb_closed_form_rates(scheme);
  CHECK(closed.gamma_g() == doctest::Approx(kGg).epsilon(1e-9));
  CHECK(closed.gamma_d() == doctest::Approx(kGd).epsilon(1e-9));

  // The operator reduction sees the two-photon offset the closed form
  // ignores; the damping and dephasing rates pick up a second-order shift,
  // a few 1e-4 at the default offset.
  const YbReduction red = yb_reduce(scheme);
  CHECK(red.rates.gamma_g() == doctest::Approx(closed.gamma_g()).epsilon(1e-9));
  CHECK(red.rates.gamma_d() == doctest::Approx(closed.gamma_d()).epsilon(5e-4));
  CHECK(red.rates.gamma_z() == doctest::Approx(closed.gamma_z()).epsilon(5e-4));
  CHECK(red.mixed_weight < 1e-12);
}

TEST_CASE("closed form matches the operator reduction exactly on a symmetric scheme") {
  // No frame offsets: the reduction and the closed form must agree to
  // rounding.
  const YbLevelScheme scheme =
      yb_calibrated_scheme(kGg, kGd, from_mhz(19.6), from_mhz(4.4), 0.0);
  const RateSet closed = yb_closed_form_rates(scheme);
  const YbReduction red = yb_reduce(scheme);
  CHECK(std::abs(red.rates.gamma_g() - closed.gamma_g()) <
        1e-12 * closed.gamma_g());
  CHECK(std::abs(red.rates.gamma_d() - closed.gamma_d()) <
        1e-12 * closed.gamma_d());
  CHECK(std::abs(red.rates.gamma_z() - closed.gamma_z()) <
        1e-12 * closed.gamma_z());
}

TEST_CASE("cross-field Raman terms cancel on the symmetric scheme") {
  const YbLevelScheme off = yb_calibrated_scheme(kGg, kGd);
  const PartitionedModel part = yb_partitioned_model(off, true);
  const ComplexMatrix h = effective_hamiltonian(part);
  REQUIRE(h.rows() == 2);
  CHECK(hermiticity_defect(h) < 1e-9 * h.cwiseAbs().maxCoeff());

  // With the lasers on the Zeeman midpoints the cross-field products
  // cancel identically and the effective Hamiltonian is diagonal. The
  // two-photon offset breaks the cancellation and leaves a static residue,
  // far below the beat frequency it actually oscillates at.
  const YbLevelScheme sym =
      yb_calibrated_scheme(kGg, kGd, from_mhz(19.6), from_mhz(4.4), 0.0);
  const ComplexMatrix h_sym =
      effective_hamiltonian(yb_partitioned_model(sym, true));
  CHECK(std::abs(h_sym(0, 1)) < 1e-6);
  CHECK(std::abs(h(0, 1)) > 0.0);
  CHECK(std::abs(h(0, 1)) < 1e-3 * from_khz(300.0));
}

TEST_CASE("stronger beams at fixed rates degrade the reduction") {
  // A wide two-photon offset keeps the Raman residue out of the comparison
  // so the (Omega/gamma)^2 trend is visible between two points.
  const YbLevelScheme base = yb_calibrated_scheme(
      kGg, kGd, from_mhz(19.6), from_mhz(4.4), from_mhz(2.0));
  const YbLevelScheme doubled = yb_scaled_scheme(base, 2.0);

  // The retune preserves the closed-form rates.
  const RateSet rb = yb_closed_form_rates(base);
  const RateSet rd = yb_closed_form_rates(doubled);
  CHECK(rd.gamma_g() == doctest::Approx(rb.gamma_g()).epsilon(1e-9));
  CHECK(rd.gamma_d() == doctest::Approx(rb.gamma_d()).epsilon(1e-9));
  CHECK(doubled.rabi_g == doctest::Approx(2.0 * base.rabi_g).epsilon(1e-12));

  const double horizon = 100e-6;
  const ReductionReport a = validate_reduction(base, horizon);
  const ReductionReport b = validate_reduction(doubled, horizon);
  CHECK(b.max_bloch_deviation > a.max_bloch_deviation);
  CHECK(a.min_target_population > 0.99);
}

TEST_CASE("scaling floor") {
  const YbLevelScheme base = yb_calibrated_scheme(kGg, kGd);
  // Fixed rates put a lower bound on how weak the beams can get; far below
  // it no detuning can compensate.
  CHECK_THROWS_AS(yb_scaled_scheme(base, 0.5), ConfigError);
  CHECK_THROWS_AS(yb_scaled_scheme(base, 0.0), ConfigError);
  CHECK_NOTHROW(yb_scaled_scheme(base, 1.5));
}

TEST_CASE("partitioned model validation") {
  ComplexMatrix ht = ComplexMatrix::Zero(2, 2);
  ComplexMatrix ha = ComplexMatrix::Zero(1, 1);
  ComplexMatrix v(1, 2);
  v << Complex(1.0), Complex(0.0);
  PerturbativeCoupling good{"g", 0.0, 0, 0.0, v};

  // A jump acting inside the target block is not an elimination problem.
  ComplexMatrix bad_jump = ComplexMatrix::Zero(3, 3);
  bad_jump(0, 1) = Complex(1.0);
  CHECK_THROWS_AS(
      PartitionedModel(ht, ha, {good}, {LindbladTerm{bad_jump, 1.0}}),
      ConfigError);

  // Coupling shape must be aux x target.
  PerturbativeCoupling wrong = good;
  wrong.v = ComplexMatrix::Zero(2, 2);
  CHECK_THROWS_AS(PartitionedModel(ht, ha, {wrong}, {}), DimensionError);

  CHECK_THROWS_AS(PartitionedModel(ComplexMatrix::Zero(0, 0), ha, {}, {}),
                  ConfigError);

  // A drive tuned into an undamped auxiliary level has no resolvent.
  PartitionedModel resonant(ht, ha, {good}, {});
  CHECK_THROWS_AS(resolvent(resonant, resonant.couplings()[0]),
                  ResonanceError);
}

TEST_CASE("scheme validation and regime warnings") {
  YbLevelScheme s = yb_calibrated_scheme(kGg, kGd);
  s.gamma = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = yb_calibrated_scheme(kGg, kGd);
  s.rabi_g = -from_khz(1.0);
  CHECK_THROWS_AS(s.validate(), ConfigError);

  // Default calibrated scheme sits inside the perturbative regime.
  CHECK(regime_warnings(yb_calibrated_scheme(kGg, kGd)).empty());

  // A qubit beam comparable to the linewidth is flagged.
  s = yb_calibrated_scheme(kGg, kGd);
  s.rabi_g = s.gamma;
  CHECK(!regime_warnings(s).empty());
}

TEST_CASE("full model structure") {
  const YbLevelScheme scheme = yb_calibrated_scheme(kGg, kGd);
  const OpenSystemModel full = yb_full_model(scheme);
  CHECK(full.dim() == 8);
  CHECK(!full.time_dependent());
  CHECK(hermiticity_defect(full.hamiltonian(0.0)) < 1e-9);
  // Twelve decay channels at gamma / 3 each.
  REQUIRE(full.terms().size() == 12u);
  for (const auto& term : full.terms()) {
    CHECK(term.rate == doctest::Approx(scheme.gamma / 3.0).epsilon(1e-14));
  }

  // The repumped partition merges the stretch-level decays.
  const PartitionedModel part = yb_partitioned_model(scheme, true);
  CHECK(part.target_dim() == 2);
  CHECK(part.aux_dim() == 6);
  CHECK(part.jumps().size() < 12u);
  const PartitionedModel raw = yb_partitioned_model(scheme, false);
  CHECK(raw.jumps().size() == 12u);
}

TEST_CASE("validate_reduction stays quiet and accurate in the weak-beam regime") {
  WarnCapture capture;
  const ReductionReport report =
      validate_reduction(yb_calibrated_scheme(kGg, kGd), 50e-6);
  CHECK(report.max_bloch_deviation < 0.03);
  CHECK(report.min_target_population > 0.995);
  CHECK(report.warnings.empty());
  CHECK(capture.messages.empty());
  REQUIRE(report.times.size() == report.deviation.size());
  CHECK(report.times.back() == doctest::Approx(50e-6).epsilon(1e-12));

  CHECK_THROWS_AS(validate_reduction(yb_calibrated_scheme(kGg, kGd), -1.0),
                  ConfigError);
}
