#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "spinlock/errors.hpp"
#include "spinlock/lindblad.hpp"
#include "spinlock/rng.hpp"
#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

using namespace spinlock;

namespace {

const RateSet kRates{from_khz(1.27), from_khz(7.33), from_khz(4.42)};

// Stationary solution obtained directly from the master equation: the
// Bloch vector obeys m' = A m + b (affine), so probing rhs() at four states
// determines A and b, and the fixed point is -A^{-1} b. Independent of the
// closed form under test.
BlochVector reference_steady(const RateSet& r, const DriveParams& d) {
  const OpenSystemModel m = build_rotating_model(r, d);
  auto bloch_rhs = [&](const BlochVector& v) {
    const ComplexMatrix rho =
        0.5 * (identity(2) + v.x * pauli(Pauli::X) + v.y * pauli(Pauli::Y) +
               v.z * pauli(Pauli::Z));
    return bloch_from_matrix(rhs(m, rho, 0.0));
  };
  const BlochVector b = bloch_rhs({0.0, 0.0, 0.0});
  Eigen::Matrix3d a;
  const BlochVector cols[3] = {bloch_rhs({1.0, 0.0, 0.0}),
                               bloch_rhs({0.0, 1.0, 0.0}),
                               bloch_rhs({0.0, 0.0, 1.0})};
  for (int j = 0; j < 3; ++j) {
    a(0, j) = cols[j].x - b.x;
    a(1, j) = cols[j].y - b.y;
    a(2, j) = cols[j].z - b.z;
  }
  const Eigen::Vector3d sol =
      a.colPivHouseholderQr().solve(Eigen::Vector3d(-b.x, -b.y, -b.z));
  return {sol(0), sol(1), sol(2)};
}

}  // namespace

TEST_CASE("limit cycle") {
  const BlochVector lc = limit_cycle(kRates);
  CHECK(lc.x == 0.0);
  CHECK(lc.y == 0.0);
  CHECK(lc.z == doctest::Approx((1.27 - 7.33) / (1.27 + 7.33)).epsilon(1e-14));
  CHECK(limit_cycle_theta0(kRates) ==
        doctest::Approx(std::acos(lc.z)).epsilon(1e-14));

  CHECK_THROWS_AS(limit_cycle(RateSet(0.0, 0.0, from_khz(1.0))),
                  UndefinedLimitCycleError);
}

TEST_CASE("steady state closed form") {
  Rng rng(23);
  for (int i = 0; i < 40; ++i) {
    const RateSet r{from_khz(0.2 + 3.0 * rng.uniform()),
                    from_khz(0.2 + 8.0 * rng.uniform()),
                    from_khz(5.0 * rng.uniform())};
    const DriveParams d{from_khz(4.0 * rng.uniform()),
                        from_khz(10.0 * (rng.uniform() - 0.5)),
                        kTwoPi * (rng.uniform() - 0.5)};
    const BlochVector s = steady_bloch(r, d);
    const BlochVector ref = reference_steady(r, d);
    CHECK(std::abs(s.x - ref.x) < 1e-10);
    CHECK(std::abs(s.y - ref.y) < 1e-10);
    CHECK(std::abs(s.z - ref.z) < 1e-10);

    // The formula must agree with the Liouvillian nullspace.
    const BlochVector num =
        bloch_from_rho(steady_state(build_rotating_model(r, d)));
    CHECK((s - num).norm() < 1e-10);
  }

  // Zero drive degenerates to the limit cycle.
  const BlochVector s0 = steady_bloch(kRates, DriveParams(0.0));
  CHECK((s0 - limit_cycle(kRates)).norm() < 1e-15);
}

TEST_CASE("contrast") {
  const DriveParams d{from_khz(2.37), 0.0, std::numbers::pi / 2};
  const double c = contrast(kRates, d);
  // epsilon |g_g - g_d| sqrt(u) / D at delta = 0.
  const double gt = kRates.gamma_t();
  const double denom = gt * gt * (kRates.gamma_g() + kRates.gamma_d()) +
                       8.0 * gt * d.epsilon() * d.epsilon();
  CHECK(c == doctest::Approx(d.epsilon() *
                             (kRates.gamma_d() - kRates.gamma_g()) * gt /
                             denom)
                 .epsilon(1e-13));
  // Phase independence and gain/damping symmetry.
  CHECK(contrast(kRates, DriveParams(d.epsilon(), 0.0, 1.234)) ==
        doctest::Approx(c).epsilon(1e-14));
  CHECK(contrast(RateSet(from_khz(2.0), from_khz(2.0), from_khz(1.0)), d) ==
        0.0);
  CHECK(contrast(kRates, DriveParams(0.0)) == 0.0);
}

TEST_CASE("synchronized phase") {
  const double eps = from_khz(2.37);

  // Damping-dominant locks a quarter turn ahead of the drive phase.
  SyncAnalytics a =
      sync_analytics(kRates, DriveParams(eps, 0.0, std::numbers::pi / 2));
  CHECK(a.sync_phase == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(a.phase_shift == 0.0);
  CHECK(a.contrast == doctest::Approx(contrast(
                          kRates, DriveParams(eps, 0.0, 0.0))));

  // Gain-dominant locks a quarter turn behind.
  const RateSet inverted{from_khz(7.33), from_khz(1.27), from_khz(4.42)};
  SyncAnalytics b =
      sync_analytics(inverted, DriveParams(eps, 0.0, std::numbers::pi / 2));
  CHECK(b.sync_phase == doctest::Approx(0.0).epsilon(1e-14));

  // Detuning tilts the locked phase by atan(4 delta / gamma_t).
  const double delta = from_khz(3.0);
  SyncAnalytics c = sync_analytics(kRates, DriveParams(eps, delta, 0.0));
  CHECK(c.phase_shift ==
        doctest::Approx(std::atan(4.0 * delta / kRates.gamma_t()))
            .epsilon(1e-14));
  CHECK(c.sync_phase ==
        doctest::Approx(wrap_angle(0.0 + c.phase_shift + std::numbers::pi / 2))
            .epsilon(1e-12));

  // The result stays in (-pi, pi].
  SyncAnalytics d =
      sync_analytics(kRates, DriveParams(eps, 0.0, 3.0));
  CHECK(d.sync_phase > -std::numbers::pi);
  CHECK(d.sync_phase <= std::numbers::pi);

  CHECK_THROWS_AS(
      sync_analytics(RateSet(from_khz(2.0), from_khz(2.0), from_khz(1.0)),
                     DriveParams(eps)),
      NoPhasePreferenceError);
}

TEST_CASE("locked phase matches the steady transverse direction") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const RateSet r{from_khz(0.3 + 2.0 * rng.uniform()),
                    from_khz(3.0 + 6.0 * rng.uniform()),
                    from_khz(4.0 * rng.uniform())};
    const DriveParams d{from_khz(0.5 + 3.0 * rng.uniform()),
                        from_khz(8.0 * (rng.uniform() - 0.5)),
                        kTwoPi * (rng.uniform() - 0.5)};
    const SyncAnalytics a = sync_analytics(r, d);
    const BlochVector s = steady_bloch(r, d);
    CHECK(std::abs(wrap_angle(std::atan2(s.y, s.x) - a.sync_phase)) < 1e-10);
  }
}

TEST_CASE("critical epsilon") {
  // Analytic optimum sqrt(u (g_g + g_d) / (8 gamma_t)).
  for (double delta_khz : {0.0, 2.0, -7.0}) {
    const double delta = from_khz(delta_khz);
    const double gt = kRates.gamma_t();
    const double u = 16.0 * delta * delta + gt * gt;
    const double expected =
        std::sqrt(u * (kRates.gamma_g() + kRates.gamma_d()) / (8.0 * gt));
    const double eps_c = critical_epsilon(kRates, delta);
    CHECK(eps_c == doctest::Approx(expected).epsilon(1e-5));
    // Local maximality of the contrast.
    const double c0 = contrast(kRates, DriveParams(eps_c, delta));
    CHECK(c0 >= contrast(kRates, DriveParams(eps_c * 1.01, delta)));
    CHECK(c0 >= contrast(kRates, DriveParams(eps_c * 0.99, delta)));
  }
}

TEST_CASE("bandwidth") {
  const double eps = 1.87 * kRates.gamma_g();
  const double width = bandwidth_3db(kRates, eps);
  const double half = 0.5 * width;
  const double ratio = contrast(kRates, DriveParams(eps, half)) /
                       contrast(kRates, DriveParams(eps, 0.0));
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-6));
  // Response widens with drive strength.
  CHECK(bandwidth_3db(kRates, 2.0 * eps) > width);
}

TEST_CASE("deformation") {
  CHECK(deformation(kRates, 0.0) == 0.0);
  double prev = 0.0;
  for (double e = 0.5; e < 60.0; e *= 2.0) {
    const double p = deformation(kRates, e * kRates.gamma_g());
    CHECK(p > prev);
    prev = p;
  }
  // Strong drive depolarizes the state completely: the deformation
  // saturates at |m_z| of the limit cycle.
  CHECK(deformation(kRates, 1e4 * kRates.gamma_g()) ==
        doctest::Approx(-limit_cycle(kRates).z).epsilon(1e-5));
}

TEST_CASE("rotating model layout") {
  const double eps = from_khz(2.37);
  const double delta = from_khz(1.1);
  const double phi = std::numbers::pi / 2;
  const OpenSystemModel m =
      build_rotating_model(kRates, DriveParams(eps, delta, phi));

  // H = (delta sigma_z + eps sigma_phi) / 2 with sigma_phi at phi = pi/2
  // equal to sigma_y.
  const ComplexMatrix h = m.hamiltonian(0.0);
  CHECK(std::abs(h(0, 0) - Complex(-delta / 2.0)) < 1e-12);
  CHECK(std::abs(h(1, 1) - Complex(delta / 2.0)) < 1e-12);
  CHECK(std::abs(h(0, 1) - Complex(0.0, eps / 2.0)) < 1e-9);

  // Dissipator rates carry the gamma/2 prefactor.
  REQUIRE(m.terms().size() == 3);
  double rate_plus = -1.0, rate_minus = -1.0, rate_z = -1.0;
  for (const auto& term : m.terms()) {
    if (std::abs(term.op(1, 0)) > 0.5) rate_plus = term.rate;
    if (std::abs(term.op(0, 1)) > 0.5) rate_minus = term.rate;
    if (std::abs(term.op(0, 0)) > 0.5) rate_z = term.rate;
  }
  CHECK(rate_plus == doctest::Approx(kRates.gamma_g() / 2.0).epsilon(1e-14));
  CHECK(rate_minus == doctest::Approx(kRates.gamma_d() / 2.0).epsilon(1e-14));
  CHECK(rate_z == doctest::Approx(kRates.gamma_z() / 2.0).epsilon(1e-14));
}

TEST_CASE("parameter validation names the field") {
  try {
    RateSet r(from_khz(1.0), -1.0, 0.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gamma_d") != std::string::npos);
  }
  CHECK_THROWS_AS(DriveParams(-1.0), ConfigError);
  CHECK_THROWS_AS(RateSet(from_khz(1.0), from_khz(1.0), -2.0), ConfigError);

  // varphi is normalized to (-pi, pi].
  const DriveParams d{from_khz(1.0), 0.0, 5.0};
  CHECK(d.varphi() == doctest::Approx(5.0 - kTwoPi).epsilon(1e-14));
}
