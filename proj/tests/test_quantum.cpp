#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinlock/errors.hpp"
#include "spinlock/quantum.hpp"
#include "spinlock/rng.hpp"
#include "spinlock/units.hpp"

using namespace spinlock;

namespace {

double mat_dist(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

BlochVector random_ball(Rng& rng) {
  // Rejection sample inside the closed unit ball, then pull slightly in so
  // positivity is strict.
  for (;;) {
    const BlochVector m{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                        2.0 * rng.uniform() - 1.0};
    if (m.norm() <= 1.0) return {0.999 * m.x, 0.999 * m.y, 0.999 * m.z};
  }
}

}  // namespace

TEST_CASE("pauli algebra and basis convention") {
  const ComplexMatrix sx = pauli(Pauli::X);
  const ComplexMatrix sy = pauli(Pauli::Y);
  const ComplexMatrix sz = pauli(Pauli::Z);
  const ComplexMatrix id = identity(2);

  CHECK(mat_dist(sx * sx, id) < 1e-15);
  CHECK(mat_dist(sy * sy, id) < 1e-15);
  CHECK(mat_dist(sz * sz, id) < 1e-15);
  // [sx, sy] = 2i sz
  CHECK(mat_dist(sx * sy - sy * sx, Complex(0.0, 2.0) * sz) < 1e-15);

  // sigma_z = diag(-1, +1): the excited state |1> has <sigma_z> = +1.
  CHECK(sz(0, 0) == Complex(-1.0, 0.0));
  CHECK(sz(1, 1) == Complex(1.0, 0.0));

  // sigma_plus = |1><0| excites.
  const ComplexMatrix sp = pauli(Pauli::Plus);
  CHECK(sp(1, 0) == Complex(1.0, 0.0));
  CHECK(std::abs(sp(0, 1)) == 0.0);
  CHECK(mat_dist(pauli(Pauli::Minus), ComplexMatrix(sp.adjoint())) < 1e-15);
  CHECK(mat_dist(0.5 * (sx + Complex(0, 1) * sy), sp) < 1e-15);
}

TEST_CASE("bloch round trip") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const BlochVector m = random_ball(rng);
    const BlochVector r = bloch_from_rho(rho_from_bloch(m));
    CHECK(std::abs(r.x - m.x) < 1e-14);
    CHECK(std::abs(r.y - m.y) < 1e-14);
    CHECK(std::abs(r.z - m.z) < 1e-14);
  }

  // m_y sign convention: with |0> first and sigma_z = diag(-1, +1), sigma_y
  // carries +i in the (0, 1) slot, so rho_01 = (m_x + i m_y) / 2.
  const ComplexMatrix rho = rho_from_bloch({0.0, 0.6, 0.0}).matrix();
  CHECK(std::abs(rho(0, 1) - Complex(0.0, 0.3)) < 1e-15);

  CHECK_THROWS_AS(rho_from_bloch({0.8, 0.8, 0.8}), InvalidStateError);
}

TEST_CASE("density matrix validation") {
  ComplexMatrix m(2, 2);
  m << Complex(0.5), Complex(0.1, 0.2), Complex(0.1, -0.2), Complex(0.5);
  CHECK_NOTHROW(DensityMatrix{m});

  ComplexMatrix nonherm = m;
  nonherm(0, 1) = Complex(0.4, 0.2);
  CHECK_THROWS_AS(DensityMatrix{nonherm}, InvalidStateError);

  ComplexMatrix badtrace = m;
  badtrace(0, 0) = Complex(0.7);
  CHECK_THROWS_AS(DensityMatrix{badtrace}, InvalidStateError);

  ComplexMatrix negative(2, 2);
  negative << Complex(0.5), Complex(0.6), Complex(0.6), Complex(0.5);
  CHECK_THROWS_AS(DensityMatrix{negative}, InvalidStateError);
}

TEST_CASE("coherent states") {
  // theta = 0 is the excited state.
  const ComplexVector north = coherent_ket({0.0, 0.0});
  CHECK(std::abs(north(1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(north(0)) < 1e-12);

  Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    const SpinCoherentDirection a(std::acos(2.0 * rng.uniform() - 1.0),
                                  kTwoPi * rng.uniform());
    const SpinCoherentDirection b(std::acos(2.0 * rng.uniform() - 1.0),
                                  kTwoPi * rng.uniform());
    // Coherent-state Bloch vector is the direction itself.
    const BlochVector m = bloch_from_rho(coherent_state(a));
    const BlochVector u = a.unit();
    CHECK(std::abs(m.x - u.x) < 1e-12);
    CHECK(std::abs(m.y - u.y) < 1e-12);
    CHECK(std::abs(m.z - u.z) < 1e-12);
    // |<a|b>|^2 = (1 + a.b) / 2 for spin 1/2.
    const Complex ov = (coherent_ket(a).adjoint() * coherent_ket(b))(0);
    CHECK(std::norm(ov) ==
          doctest::Approx(0.5 * (1.0 + u.dot(b.unit()))).epsilon(1e-10));
  }
}

TEST_CASE("direction canonicalization") {
  const SpinCoherentDirection d(-0.3, -1.0);
  CHECK(d.theta() >= 0.0);
  CHECK(d.theta() <= std::numbers::pi);
  CHECK(d.phi() >= 0.0);
  CHECK(d.phi() < kTwoPi);
  // (-theta, phi) and (theta, phi + pi) are the same point.
  const BlochVector u = d.unit();
  const BlochVector v = SpinCoherentDirection(0.3, std::numbers::pi - 1.0).unit();
  CHECK(std::abs(u.x - v.x) < 1e-12);
  CHECK(std::abs(u.y - v.y) < 1e-12);
  CHECK(std::abs(u.z - v.z) < 1e-12);
}

TEST_CASE("hermitian helpers") {
  ComplexMatrix m(2, 2);
  m << Complex(0.3), Complex(0.2, 0.1), Complex(0.2, -0.1), Complex(0.7);
  CHECK(hermiticity_defect(m) < 1e-15);
  CHECK(is_hermitian(m, 1e-12));

  ComplexMatrix skew = m;
  skew(0, 1) += Complex(0.0, 1e-6);
  CHECK(hermiticity_defect(skew) == doctest::Approx(1e-6).epsilon(1e-6));
  CHECK(!is_hermitian(skew, 1e-9));

  // Closed-form dim-2 eigenvalue against the trace/det identity.
  const double lo = min_eigenvalue_hermitian(m);
  const double tr = 1.0;
  const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
  CHECK(lo == doctest::Approx(0.5 * (tr - std::sqrt(tr * tr - 4.0 * det)))
                  .epsilon(1e-12));
  CHECK(gershgorin_lower_bound(m) <= lo + 1e-15);

  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const ComplexMatrix rho = rho_from_bloch(random_ball(rng)).matrix();
    CHECK(gershgorin_lower_bound(rho) <= min_eigenvalue_hermitian(rho) + 1e-14);
    CHECK(min_eigenvalue_hermitian(rho) >= -1e-14);
  }
}

TEST_CASE("dimension guards") {
  ComplexMatrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(require_square(rect, "x"), DimensionError);
  ComplexMatrix three = identity(3);
  CHECK_THROWS_AS(require_dim(three, 2, "x"), DimensionError);
  CHECK_NOTHROW(require_dim(three, 3, "x"));
}
