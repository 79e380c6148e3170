#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinlock/phase_space.hpp"
#include "spinlock/rng.hpp"
#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

using namespace spinlock;

namespace {

BlochVector random_ball(Rng& rng) {
  for (;;) {
    const BlochVector m{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                        2.0 * rng.uniform() - 1.0};
    if (m.norm() <= 1.0) return {0.999 * m.x, 0.999 * m.y, 0.999 * m.z};
  }
}

int count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("q function forms agree") {
  Rng rng(41);
  for (int i = 0; i < 30; ++i) {
    const BlochVector m = random_ball(rng);
    const DensityMatrix rho = rho_from_bloch(m);
    const SpinCoherentDirection dir(std::acos(2.0 * rng.uniform() - 1.0),
                                    kTwoPi * rng.uniform());
    const double braket = q_function(rho, dir);
    const double closed = q_function_bloch(m, dir);
    CHECK(braket == doctest::Approx(closed).epsilon(1e-11));
    CHECK(closed ==
          doctest::Approx((1.0 + m.dot(dir.unit())) / (4.0 * std::numbers::pi))
              .epsilon(1e-12));
  }
}

TEST_CASE("q is maximal along the state direction") {
  const SpinCoherentDirection dir(1.1, 2.3);
  const DensityMatrix rho = coherent_state(dir);
  // Q(n|n) = 1/(2 pi); the antipode vanishes.
  CHECK(q_function(rho, dir) ==
        doctest::Approx(1.0 / kTwoPi).epsilon(1e-12));
  const SpinCoherentDirection anti(std::numbers::pi - 1.1,
                                   2.3 + std::numbers::pi);
  CHECK(q_function(rho, anti) < 1e-15);
}

TEST_CASE("grid layout and normalization") {
  const PhaseSpaceGrid grid = q_grid(rho_from_bloch({0.2, -0.3, 0.4}), 81, 160);
  REQUIRE(grid.n_theta == 81);
  REQUIRE(grid.n_phi == 160);
  CHECK(grid.theta.front() == 0.0);
  CHECK(grid.theta.back() == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(grid.phi.front() == 0.0);
  // phi covers [0, 2 pi) without the duplicate endpoint.
  CHECK(grid.phi.back() ==
        doctest::Approx(kTwoPi * (1.0 - 1.0 / 160)).epsilon(1e-12));
  CHECK(grid.values.size() == 81u * 160u);

  CHECK(grid_normalization(grid) == doctest::Approx(1.0).epsilon(1e-8));

  Rng rng(43);
  for (int i = 0; i < 5; ++i) {
    const PhaseSpaceGrid g = q_grid(rho_from_bloch(random_ball(rng)));
    CHECK(grid_normalization(g) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("s function closed form vs quadrature") {
  Rng rng(47);
  for (int i = 0; i < 15; ++i) {
    const BlochVector m = random_ball(rng);
    const DensityMatrix rho = rho_from_bloch(m);
    const double phi = kTwoPi * rng.uniform();
    const double closed = s_function(rho, phi);
    CHECK(closed == doctest::Approx((m.x * std::cos(phi) +
                                     m.y * std::sin(phi)) /
                                    8.0)
                        .epsilon(1e-12));
    CHECK(s_function_quadrature(rho, phi) ==
          doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("s profile first harmonic") {
  const RateSet rates{from_khz(1.27), from_khz(7.33), from_khz(4.42)};
  const DriveParams drive{from_khz(2.37), 0.0, std::numbers::pi / 2};
  const DensityMatrix rho =
      rho_from_bloch(steady_bloch(rates, drive));

  const SProfile prof = s_profile(rho, 181);
  REQUIRE(prof.phi.size() == 181);
  REQUIRE(prof.s.size() == 181);
  CHECK(prof.phase_defined);
  // Peak-to-peak of S equals the analytic contrast; the peak position is
  // the locked phase.
  const SyncAnalytics a = sync_analytics(rates, drive);
  CHECK(prof.fitted_contrast == doctest::Approx(a.contrast).epsilon(1e-12));
  CHECK(std::abs(wrap_angle(prof.fitted_phase - a.sync_phase)) < 1e-12);
  // Max of the sampled profile is half the peak-to-peak (zero-mean
  // harmonic); the locked phase pi falls mid-node on this grid, so allow
  // the cos(pi/181) sampling defect.
  double max_s = -1.0;
  for (double s : prof.s) max_s = std::max(max_s, s);
  CHECK(max_s == doctest::Approx(0.5 * a.contrast).epsilon(3e-4));
}

TEST_CASE("flat profile has no phase") {
  const SProfile prof = s_profile(rho_from_bloch({0.0, 0.0, -0.7}), 64);
  for (double s : prof.s) CHECK(std::abs(s) < 1e-15);
  CHECK(!prof.phase_defined);
  CHECK(prof.fitted_contrast == 0.0);
}

TEST_CASE("fit recovers a planted harmonic") {
  SProfile prof;
  const int n = 90;
  const double a = 3e-3, b = -4e-3;
  for (int i = 0; i < n; ++i) {
    const double phi = kTwoPi * i / n;
    prof.phi.push_back(phi);
    prof.s.push_back(a * std::cos(phi) + b * std::sin(phi));
  }
  const SProfile fit = fit_s_profile(prof);
  CHECK(fit.phase_defined);
  CHECK(fit.fitted_contrast ==
        doctest::Approx(2.0 * std::hypot(a, b)).epsilon(1e-12));
  CHECK(fit.fitted_phase == doctest::Approx(std::atan2(b, a)).epsilon(1e-12));
}

TEST_CASE("csv writers") {
  const auto dir = std::filesystem::temp_directory_path() / "spinlock_ps_test";
  std::filesystem::create_directories(dir);

  const PhaseSpaceGrid grid = q_grid(rho_from_bloch({0.1, 0.0, 0.5}), 9, 16);
  write_q_grid_csv(dir / "q.csv", grid);
  CHECK(count_lines(dir / "q.csv") == 1 + 9 * 16);
  {
    std::ifstream in(dir / "q.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "theta,phi,q");
    double theta = -1.0, phi = -1.0, q = -1.0;
    char comma;
    in >> theta >> comma >> phi >> comma >> q;
    CHECK(theta == 0.0);
    CHECK(phi == 0.0);
    CHECK(q == doctest::Approx(grid.at(0, 0)).epsilon(1e-15));
  }

  const SProfile prof = s_profile(rho_from_bloch({0.3, 0.2, 0.0}), 33);
  write_s_profile_csv(dir / "s.csv", prof);
  CHECK(count_lines(dir / "s.csv") == 1 + 33);

  std::filesystem::remove_all(dir);
}

TEST_CASE("uniform quadrature") {
  // Simpson handles even interval counts; the 3/8 correction covers odd.
  for (int n : {101, 102}) {
    std::vector<double> v(n);
    const double h = std::numbers::pi / (n - 1);
    for (int i = 0; i < n; ++i) v[i] = std::sin(i * h);
    CHECK(integrate_uniform(v, h) == doctest::Approx(2.0).epsilon(1e-7));
  }
}
