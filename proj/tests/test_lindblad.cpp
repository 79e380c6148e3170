#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinlock/errors.hpp"
#include "spinlock/lindblad.hpp"
#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

using namespace spinlock;

namespace {

const RateSet kRates{from_khz(1.27), from_khz(7.33), from_khz(4.42)};
const DriveParams kDrive{from_khz(2.37), 0.0, std::numbers::pi / 2};

double bloch_dist(const BlochVector& a, const BlochVector& b) {
  return (a - b).norm();
}

// Same dynamics as a time callback, which forces the generic matrix path.
OpenSystemModel as_time_dependent(const OpenSystemModel& m) {
  const ComplexMatrix h = m.hamiltonian(0.0);
  return OpenSystemModel(
      m.dim(), [h](double) { return h; },
      std::vector<LindbladTerm>(m.terms().begin(), m.terms().end()));
}

}  // namespace

TEST_CASE("model construction guards") {
  ComplexMatrix h(2, 2);
  h << Complex(0.0), Complex(1.0, 0.5), Complex(1.0, 0.5), Complex(0.0);
  CHECK_THROWS_AS(OpenSystemModel(h, {}), ConfigError);

  ComplexMatrix wrong = identity(3);
  CHECK_THROWS_AS(
      OpenSystemModel(identity(2), {LindbladTerm{wrong, 1.0}}),
      DimensionError);
  CHECK_THROWS_AS(
      OpenSystemModel(identity(2), {LindbladTerm{pauli(Pauli::Minus), -1.0}}),
      ConfigError);

  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  CHECK(!m.time_dependent());
  CHECK(as_time_dependent(m).time_dependent());
}

TEST_CASE("rhs is trace free") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  const ComplexMatrix rho = rho_from_bloch({0.3, -0.2, 0.4}).matrix();
  CHECK(std::abs(rhs(m, rho, 0.0).trace()) < 1e-12 * from_khz(10.0));
}

TEST_CASE("integration paths agree") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  const DensityMatrix rho0 = rho_from_bloch({0.0, 0.0, 1.0});
  const std::pair<double, double> span{0.0, 100e-6};
  const double dt = 0.2e-6;

  IntegrateOptions bloch_opt;
  bloch_opt.prefer_bloch_path = true;
  IntegrateOptions dense_opt;
  dense_opt.prefer_bloch_path = false;

  const Trajectory a = integrate(m, rho0, span, dt, bloch_opt);
  const Trajectory b = integrate(m, rho0, span, dt, dense_opt);
  const Trajectory c = integrate(as_time_dependent(m), rho0, span, dt,
                                 dense_opt);

  REQUIRE(a.times.size() == b.times.size());
  REQUIRE(a.times.size() == c.times.size());
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(bloch_dist(a.bloch[i], b.bloch[i]) < 1e-11);
    CHECK(bloch_dist(a.bloch[i], c.bloch[i]) < 1e-11);
  }
}

TEST_CASE("grid ends exactly at the requested time") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  const DensityMatrix rho0 = rho_from_bloch({0.0, 0.0, 1.0});
  // dt that does not divide the span: the step must shrink, not drop the
  // remainder.
  const double span = 200e-6;
  const double dt = 5.457e-6;

  for (bool prefer_bloch : {true, false}) {
    IntegrateOptions opt;
    opt.prefer_bloch_path = prefer_bloch;
    const Trajectory tr = integrate(m, rho0, {0.0, span}, dt, opt);
    CHECK(tr.times.back() == span);
    const Trajectory td = integrate(as_time_dependent(m), rho0, {0.0, span},
                                    dt, opt);
    CHECK(td.times.back() == span);
  }

  // The shrunken step stays uniform.
  IntegrateOptions opt;
  const Trajectory tr = integrate(m, rho0, {0.0, span}, dt, opt);
  const double h0 = tr.times[1] - tr.times[0];
  for (std::size_t i = 2; i < tr.times.size(); ++i) {
    CHECK(std::abs((tr.times[i] - tr.times[i - 1]) - h0) < 1e-12 * span);
  }
  CHECK(h0 <= dt * (1.0 + 1e-12));
}

TEST_CASE("sampling controls") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  const DensityMatrix rho0 = rho_from_bloch({0.0, 0.0, 1.0});

  IntegrateOptions opt;
  opt.sample_stride = 7;
  opt.store_states = false;
  const Trajectory tr = integrate(m, rho0, {0.0, 100e-6}, 1e-6, opt);
  // Initial sample, every 7th step, and the forced final sample.
  CHECK(tr.times.size() == 1 + 100 / 7 + 1);
  CHECK(tr.times.back() == 100e-6);
  CHECK(tr.bloch.size() == tr.times.size());
  CHECK_THROWS_AS(tr.state(0), ConfigError);  // states not stored

  opt.store_states = true;
  const Trajectory ts = integrate(m, rho0, {0.0, 10e-6}, 1e-6, opt);
  CHECK(ts.state(0).rows() == 2);
  CHECK(std::abs(ts.density_matrix(1).matrix().trace() - Complex(1.0)) <
        1e-12);

  opt.sample_stride = 0;
  CHECK_THROWS_AS(integrate(m, rho0, {0.0, 1e-6}, 1e-6, opt), ConfigError);
  CHECK_THROWS_AS(integrate(m, rho0, {1e-6, 0.0}, 1e-6, IntegrateOptions{}),
                  ConfigError);
  CHECK_THROWS_AS(integrate(m, rho0, {0.0, 1e-6}, 0.0, IntegrateOptions{}),
                  ConfigError);
  CHECK_THROWS_AS(
      integrate(m, DensityMatrix(identity(3) / 3.0), {0.0, 1e-6}, 1e-6,
                IntegrateOptions{}),
      DimensionError);
}

TEST_CASE("zero-length span returns the initial state") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  const Trajectory tr =
      integrate(m, rho_from_bloch({0.1, 0.2, 0.3}), {0.0, 0.0}, 1e-6, {});
  REQUIRE(tr.times.size() == 1);
  CHECK(bloch_dist(tr.bloch[0], {0.1, 0.2, 0.3}) < 1e-15);
}

TEST_CASE("state invariants hold along a trajectory") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  IntegrateOptions opt;
  opt.prefer_bloch_path = false;
  opt.sample_stride = 1000;
  const Trajectory tr = integrate(m, rho_from_bloch({0.0, 0.0, 1.0}),
                                  {0.0, 500e-6}, 5e-8, opt);
  CHECK(tr.max_trace_deviation < 1e-12);
  CHECK(tr.max_hermiticity_correction < 1e-12);
  CHECK(tr.min_eigenvalue_seen > -1e-12);
}

TEST_CASE("divergence is detected and named") {
  // dt far beyond the stability limit blows the state up.
  const RateSet fast{from_mhz(5.0), from_mhz(5.0), from_mhz(5.0)};
  const OpenSystemModel m = build_rotating_model(fast, DriveParams(0.0));
  IntegrateOptions opt;
  opt.prefer_bloch_path = false;
  try {
    integrate(m, rho_from_bloch({0.0, 0.0, 1.0}), {0.0, 1e-3}, 1e-5, opt);
    FAIL("expected IntegrationDivergedError");
  } catch (const IntegrationDivergedError& e) {
    CHECK(std::string(e.what()).find("diverged at t") != std::string::npos);
  }
}

TEST_CASE("steady state matches the closed form") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  const BlochVector numeric = bloch_from_rho(steady_state(m));
  const BlochVector analytic = steady_bloch(kRates, kDrive);
  CHECK(bloch_dist(numeric, analytic) < 1e-12);

  const OpenSystemModel free_model =
      build_rotating_model(kRates, DriveParams(0.0));
  CHECK(bloch_dist(bloch_from_rho(steady_state(free_model)),
                   limit_cycle(kRates)) < 1e-12);
}

TEST_CASE("steady state requires uniqueness and a constant Hamiltonian") {
  // No dissipation: every diagonal state is stationary.
  const OpenSystemModel degenerate(0.5 * from_khz(1.0) * pauli(Pauli::Z), {});
  CHECK_THROWS_AS(steady_state(degenerate), NonUniqueSteadyStateError);

  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  CHECK_THROWS_AS(steady_state(as_time_dependent(m)), ConfigError);
}

TEST_CASE("suggest_dt tracks the fastest scale") {
  const OpenSystemModel m = build_rotating_model(kRates, kDrive);
  const double dt = suggest_dt(m);
  CHECK(dt > 0.0);
  // An explicit faster scale wins.
  const double fast = suggest_dt(m, {from_mhz(10.0)});
  CHECK(fast == doctest::Approx(1.0 / (50.0 * 10e6)).epsilon(1e-12));
  CHECK(fast < dt);

  CHECK_THROWS_AS(suggest_dt(OpenSystemModel(ComplexMatrix::Zero(2, 2), {})),
                  ConfigError);
}
