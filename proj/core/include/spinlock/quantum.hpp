#pragma once

#include <Eigen/Dense>
#include <complex>

namespace spinlock {

using Complex = std::complex<double>;

// Dense row-major complex matrix. All operators and states in the library
// use this type; dimension agreement is checked at the API boundaries and
// reported as DimensionError.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  BlochVector operator-(const BlochVector& o) const {
    return {x - o.x, y - o.y, z - o.z};
  }
  BlochVector operator+(const BlochVector& o) const {
    return {x + o.x, y + o.y, z + o.z};
  }
  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
};

// Qubit basis convention: index 0 is the ground state |0>, index 1 the
// excited state |1>, and sigma_z = diag(-1, +1) so that <sigma_z> = +1 for
// the excited state. sigma_plus = |1><0| is the gain (excitation) operator.
enum class Pauli { I, X, Y, Z, Plus, Minus };

ComplexMatrix pauli(Pauli p);
ComplexMatrix identity(int dim);

// Direction on the Bloch sphere. Construction canonicalizes the angles to
// theta in [0, pi], phi in [0, 2*pi).
class SpinCoherentDirection {
 public:
  SpinCoherentDirection(double theta, double phi);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

  BlochVector unit() const {
    return {std::sin(theta_) * std::cos(phi_),
            std::sin(theta_) * std::sin(phi_), std::cos(theta_)};
  }

 private:
  double theta_;
  double phi_;
};

// Validated quantum state. Construction checks hermiticity (1e-12), unit
// trace (1e-10) and positivity (smallest eigenvalue >= -1e-10); failures
// raise InvalidStateError. Engine-internal code that maintains these
// invariants itself wraps matrices with trusted() to avoid re-validating
// once per integrator step.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix trusted(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  DensityMatrix() = default;
  ComplexMatrix m_;
};

// Pauli expectation values of a 2x2 state.
BlochVector bloch_from_rho(const DensityMatrix& rho);
BlochVector bloch_from_matrix(const ComplexMatrix& rho);

// (I + m . sigma) / 2. Requires |m| <= 1 (tolerance 1e-12).
DensityMatrix rho_from_bloch(const BlochVector& m);

// |theta,phi> = exp(-i phi sigma_z / 2) exp(-i theta sigma_y / 2) |1>.
// The excited state |1> sits at the north pole theta = 0.
ComplexVector coherent_ket(const SpinCoherentDirection& dir);
DensityMatrix coherent_state(const SpinCoherentDirection& dir);

// --- small numeric helpers shared across modules ---

// max_ij |m - m^dagger|_ij
double hermiticity_defect(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tol);

// Smallest eigenvalue of a Hermitian matrix (closed form for dim 2).
double min_eigenvalue_hermitian(const ComplexMatrix& m);

// Cheap certified lower bound on the smallest eigenvalue (Gershgorin).
double gershgorin_lower_bound(const ComplexMatrix& m);

void require_square(const ComplexMatrix& m, const char* what);
void require_dim(const ComplexMatrix& m, int dim, const char* what);

}  // namespace spinlock
