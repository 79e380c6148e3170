#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "spinlock/quantum.hpp"

namespace spinlock {

// One dissipation channel: contributes rate * D[op] rho to the master
// equation, with D[A]rho = A rho A^dag - (A^dag A rho + rho A^dag A) / 2.
// The rate carries the full prefactor; nothing else is implied.
struct LindbladTerm {
  ComplexMatrix op;
  double rate = 0.0;
};

using HamiltonianFn = std::function<ComplexMatrix(double)>;

// A master equation d rho/dt = -i [H(t), rho] + sum_k rate_k D[A_k] rho.
// The Hamiltonian is either a constant matrix or a time callback; constant
// models additionally precompute the full Liouvillian superoperator, which
// integrate() and steady_state() use directly.
class OpenSystemModel {
 public:
  OpenSystemModel(ComplexMatrix hamiltonian, std::vector<LindbladTerm> terms);
  OpenSystemModel(int dim, HamiltonianFn hamiltonian,
                  std::vector<LindbladTerm> terms);

  int dim() const { return dim_; }
  bool time_dependent() const { return static_cast<bool>(h_fn_); }

  // H(t); checks hermiticity of callback results (tolerance 1e-12 relative).
  ComplexMatrix hamiltonian(double t) const;

  const std::vector<LindbladTerm>& terms() const { return terms_; }

  // sum_k rate_k * A_k^dag A_k, precomputed for the anticommutator part.
  const ComplexMatrix& damping_sum() const { return damping_sum_; }

  // Largest angular frequency scale of the model at t = 0 (Hamiltonian
  // spectral radius and all rates), in rad/s.
  double max_angular_scale() const;

 private:
  int dim_;
  ComplexMatrix h_static_;
  HamiltonianFn h_fn_;
  std::vector<LindbladTerm> terms_;
  ComplexMatrix damping_sum_;
};

// D[A]rho. Dimension-checked; no rate factor.
ComplexMatrix dissipator(const ComplexMatrix& a, const ComplexMatrix& rho);

// Right-hand side of the master equation at time t.
ComplexMatrix rhs(const OpenSystemModel& model, const ComplexMatrix& rho,
                  double t);
ComplexMatrix rhs(const OpenSystemModel& model, const DensityMatrix& rho,
                  double t);

// Superoperator matrix of a time-independent model in row-stacking
// convention: vec(A X B) = (A kron B^T) vec(X) with vec reading the matrix
// row by row. L * vec(rho) == vec(rhs(rho)).
ComplexMatrix liouvillian_matrix(const OpenSystemModel& model);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct Trajectory {
  std::vector<double> times;
  // Row-major dim*dim blocks, one per stored sample; empty when states were
  // not requested.
  std::vector<Complex> states_flat;
  // Pauli expectations per stored sample; filled for dim == 2 only.
  std::vector<BlochVector> bloch;
  int dim = 0;

  std::size_t size() const { return times.size(); }
  ComplexMatrix state(std::size_t i) const;
  DensityMatrix density_matrix(std::size_t i) const;
  // Largest drift seen during integration, for diagnostics.
  double max_trace_deviation = 0.0;
  double max_hermiticity_correction = 0.0;
  double min_eigenvalue_seen = 0.0;
};

struct IntegrateOptions {
  // Store every k-th step (step 0 and the final step are always stored).
  int sample_stride = 1;
  bool store_states = true;
  // Dim-2 models can integrate the Pauli expectations directly (the master
  // equation is affine in the Bloch vector). Cheaper for long runs; agrees
  // with the matrix path to rounding. Off by default so that the generic
  // path stays the reference.
  bool prefer_bloch_path = false;
  // Divergence thresholds (per step): |tr(rho) - 1| and allowed negativity.
  double trace_tol = 1e-6;
  double negativity_tol = 1e-6;
  // Re-symmetrization corrections larger than this are reported via warn().
  double hermiticity_warn_tol = 1e-9;
};

// Fixed-step RK4 on a uniform grid that ends exactly at t_span.second. The
// requested dt is a ceiling: the actual step is span / ceil(span / dt), so
// it only ever shrinks. The final state is always stored.
Trajectory integrate(const OpenSystemModel& model, const DensityMatrix& rho0,
                     std::pair<double, double> t_span, double dt,
                     const IntegrateOptions& options = {});

// dt = 1 / (50 * f_max) where f_max is the largest ordinary frequency among
// the model scales and any extra angular frequencies supplied by the caller
// (e.g. a lab-frame drive frequency).
double suggest_dt(const OpenSystemModel& model,
                  const std::vector<double>& extra_angular_freqs = {});

// Nullspace steady state of a time-independent model via SVD-verified
// least squares on the Liouvillian with a trace constraint appended.
// Throws NonUniqueSteadyStateError when the second-smallest singular value
// is below 1e-8 of the largest.
DensityMatrix steady_state(const OpenSystemModel& model);

}  // namespace spinlock
