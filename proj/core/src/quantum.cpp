#include "spinlock/quantum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spinlock/errors.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

namespace {
constexpr Complex kI{0.0, 1.0};
}

ComplexMatrix pauli(Pauli p) {
  ComplexMatrix m(2, 2);
  switch (p) {
    case Pauli::I:
      m << 1, 0, 0, 1;
      break;
    case Pauli::X:
      m << 0, 1, 1, 0;
      break;
    case Pauli::Y:
      m << 0, kI, -kI, 0;
      break;
    case Pauli::Z:
      m << -1, 0, 0, 1;
      break;
    case Pauli::Plus:  // |1><0|
      m << 0, 0, 1, 0;
      break;
    case Pauli::Minus:  // |0><1|
      m << 0, 1, 0, 0;
      break;
  }
  return m;
}

ComplexMatrix identity(int dim) {
  if (dim < 1) throw DimensionError("identity: dimension must be positive");
  return ComplexMatrix::Identity(dim, dim);
}

SpinCoherentDirection::SpinCoherentDirection(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw ConfigError("SpinCoherentDirection: angles must be finite");
  }
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t > std::numbers::pi) {
    t = kTwoPi - t;
    phi += std::numbers::pi;
  }
  double p = std::fmod(phi, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  theta_ = t;
  phi_ = p;
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  require_square(m, "DensityMatrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m) > 1e-12 * scale) {
    throw InvalidStateError("DensityMatrix: matrix is not Hermitian");
  }
  const double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (tr_err > 1e-10) {
    throw InvalidStateError("DensityMatrix: trace deviates from 1 by " +
                            std::to_string(tr_err));
  }
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  const double lambda_min = min_eigenvalue_hermitian(h);
  if (lambda_min < -1e-10) {
    throw InvalidStateError("DensityMatrix: negative eigenvalue " +
                            std::to_string(lambda_min));
  }
  m_ = h;
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix m) {
  DensityMatrix rho;
  rho.m_ = std::move(m);
  return rho;
}

BlochVector bloch_from_matrix(const ComplexMatrix& rho) {
  require_dim(rho, 2, "bloch_from_matrix");
  const Complex r01 = rho(0, 1);
  return {2.0 * r01.real(), 2.0 * r01.imag(),
          (rho(1, 1) - rho(0, 0)).real()};
}

BlochVector bloch_from_rho(const DensityMatrix& rho) {
  return bloch_from_matrix(rho.matrix());
}

DensityMatrix rho_from_bloch(const BlochVector& m) {
  if (m.norm() > 1.0 + 1e-12) {
    throw InvalidStateError("rho_from_bloch: |m| = " + std::to_string(m.norm()) +
                            " exceeds 1");
  }
  ComplexMatrix rho(2, 2);
  rho(0, 0) = 0.5 * (1.0 - m.z);
  rho(1, 1) = 0.5 * (1.0 + m.z);
  rho(0, 1) = 0.5 * Complex(m.x, m.y);
  rho(1, 0) = std::conj(rho(0, 1));
  return DensityMatrix::trusted(std::move(rho));
}

ComplexVector coherent_ket(const SpinCoherentDirection& dir) {
  const double half_theta = 0.5 * dir.theta();
  const double half_phi = 0.5 * dir.phi();
  ComplexVector ket(2);
  ket(0) = std::exp(kI * half_phi) * std::sin(half_theta);
  ket(1) = std::exp(-kI * half_phi) * std::cos(half_theta);
  return ket;
}

DensityMatrix coherent_state(const SpinCoherentDirection& dir) {
  const ComplexVector ket = coherent_ket(dir);
  ComplexMatrix rho = ket * ket.adjoint();
  return DensityMatrix::trusted(std::move(rho));
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return hermiticity_defect(m) <= tol * scale;
}

double min_eigenvalue_hermitian(const ComplexMatrix& m) {
  if (m.rows() == 2) {
    // Eigenvalues of [[a, b], [b*, d]]: mean +- sqrt(((a-d)/2)^2 + |b|^2).
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double half_diff = 0.5 * (a - d);
    const double radius = std::sqrt(half_diff * half_diff + std::norm(m(0, 1)));
    return 0.5 * (a + d) - radius;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double gershgorin_lower_bound(const ComplexMatrix& m) {
  double bound = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    double radius = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) radius += std::abs(m(i, j));
    }
    bound = std::min(bound, m(i, i).real() - radius);
  }
  return bound;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

void require_dim(const ComplexMatrix& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError(std::string(what) + ": expected " +
                         std::to_string(dim) + "x" + std::to_string(dim) +
                         ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

}  // namespace spinlock
