#include "spinlock/lindblad.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "spinlock/errors.hpp"
#include "spinlock/logging.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

namespace {

constexpr Complex kI{0.0, 1.0};

std::string format_time(double t) {
  std::ostringstream os;
  os << t << " s";
  return os.str();
}

void validate_terms(int dim, const std::vector<LindbladTerm>& terms) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    require_dim(terms[k].op, dim, "LindbladTerm");
    const double rate = terms[k].rate;
    if (!std::isfinite(rate) || rate < 0.0) {
      throw ConfigError("LindbladTerm " + std::to_string(k) +
                        ": rate must be finite and non-negative");
    }
  }
}

ComplexMatrix accumulate_damping(int dim,
                                 const std::vector<LindbladTerm>& terms) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (const auto& term : terms) {
    m.noalias() += term.rate * (term.op.adjoint() * term.op);
  }
  return m;
}

}  // namespace

OpenSystemModel::OpenSystemModel(ComplexMatrix hamiltonian,
                                 std::vector<LindbladTerm> terms)
    : h_static_(std::move(hamiltonian)), terms_(std::move(terms)) {
  require_square(h_static_, "OpenSystemModel Hamiltonian");
  dim_ = static_cast<int>(h_static_.rows());
  if (!is_hermitian(h_static_, 1e-12)) {
    throw ConfigError("OpenSystemModel: Hamiltonian is not Hermitian");
  }
  validate_terms(dim_, terms_);
  damping_sum_ = accumulate_damping(dim_, terms_);
}

OpenSystemModel::OpenSystemModel(int dim, HamiltonianFn hamiltonian,
                                 std::vector<LindbladTerm> terms)
    : dim_(dim), h_fn_(std::move(hamiltonian)), terms_(std::move(terms)) {
  if (dim < 1) throw DimensionError("OpenSystemModel: dimension must be >= 1");
  if (!h_fn_) throw ConfigError("OpenSystemModel: null Hamiltonian callback");
  validate_terms(dim_, terms_);
  damping_sum_ = accumulate_damping(dim_, terms_);
}

ComplexMatrix OpenSystemModel::hamiltonian(double t) const {
  if (!h_fn_) return h_static_;
  ComplexMatrix h = h_fn_(t);
  require_dim(h, dim_, "OpenSystemModel Hamiltonian(t)");
  if (!is_hermitian(h, 1e-12)) {
    throw ConfigError("OpenSystemModel: Hamiltonian not Hermitian at t = " +
                      format_time(t));
  }
  return h;
}

double OpenSystemModel::max_angular_scale() const {
  double scale = 0.0;
  const ComplexMatrix h = hamiltonian(0.0);
  if (h.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h,
                                                        Eigen::EigenvaluesOnly);
    scale = solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  for (const auto& term : terms_) scale = std::max(scale, term.rate);
  return scale;
}

ComplexMatrix dissipator(const ComplexMatrix& a, const ComplexMatrix& rho) {
  require_square(a, "dissipator operator");
  require_dim(rho, static_cast<int>(a.rows()), "dissipator state");
  const ComplexMatrix ada = a.adjoint() * a;
  return a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada);
}

ComplexMatrix rhs(const OpenSystemModel& model, const ComplexMatrix& rho,
                  double t) {
  require_dim(rho, model.dim(), "rhs state");
  const ComplexMatrix h = model.hamiltonian(t);
  ComplexMatrix out = -kI * (h * rho - rho * h);
  const ComplexMatrix& m = model.damping_sum();
  out.noalias() -= 0.5 * (m * rho + rho * m);
  for (const auto& term : model.terms()) {
    if (term.rate == 0.0) continue;
    out.noalias() += term.rate * (term.op * rho * term.op.adjoint());
  }
  return out;
}

ComplexMatrix rhs(const OpenSystemModel& model, const DensityMatrix& rho,
                  double t) {
  return rhs(model, rho.matrix(), t);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix liouvillian_matrix(const OpenSystemModel& model) {
  if (model.time_dependent()) {
    throw ConfigError("liouvillian_matrix requires a time-independent model");
  }
  const int n = model.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix h = model.hamiltonian(0.0);
  ComplexMatrix l = -kI * (kron(h, id) - kron(id, h.transpose()));
  for (const auto& term : model.terms()) {
    if (term.rate == 0.0) continue;
    l.noalias() += term.rate * kron(term.op, term.op.conjugate());
  }
  const ComplexMatrix& m = model.damping_sum();
  l.noalias() -= 0.5 * (kron(m, id) + kron(id, m.transpose()));
  return l;
}

ComplexMatrix Trajectory::state(std::size_t i) const {
  if (states_flat.empty()) {
    throw ConfigError("Trajectory: states were not stored for this run");
  }
  const std::size_t stride = static_cast<std::size_t>(dim) * dim;
  Eigen::Map<const ComplexMatrix> map(states_flat.data() + i * stride, dim,
                                      dim);
  return map;
}

DensityMatrix Trajectory::density_matrix(std::size_t i) const {
  return DensityMatrix::trusted(state(i));
}

namespace {

struct StepGrid {
  long long n;
  double dt;
};

// Uniform grid covering [t0, t1] exactly. The requested dt is a ceiling: it
// is shrunk (never grown) so that n steps of the returned dt reach t1.
StepGrid step_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("integrate: dt must be positive and finite");
  }
  if (!(t1 >= t0)) {
    throw ConfigError("integrate: t_span must be ordered");
  }
  const double span = t1 - t0;
  if (span == 0.0) return {0, dt};
  const double raw = span / dt;
  const long long n = std::max<long long>(
      1, static_cast<long long>(std::ceil(raw - 1e-9 * std::max(1.0, raw))));
  return {n, span / static_cast<double>(n)};
}

struct StepGuard {
  const IntegrateOptions& opt;
  Trajectory& traj;
  double worst_defect = 0.0;

  // Symmetrizes rho in place and checks the per-step invariants. Throws
  // IntegrationDivergedError naming the offending time.
  template <typename MatrixRef>
  void enforce(MatrixRef&& rho, double t) {
    if (!rho.allFinite()) {
      throw IntegrationDivergedError(
          "integration diverged at t = " + format_time(t) +
          ": non-finite state");
    }
    const double defect = hermiticity_defect(rho);
    if (defect > 0.0) {
      rho = (0.5 * (rho + rho.adjoint())).eval();
    }
    worst_defect = std::max(worst_defect, defect);
    traj.max_hermiticity_correction =
        std::max(traj.max_hermiticity_correction, defect);

    const double trace_dev = std::abs(rho.trace() - Complex(1.0, 0.0));
    traj.max_trace_deviation = std::max(traj.max_trace_deviation, trace_dev);
    if (trace_dev > opt.trace_tol) {
      throw IntegrationDivergedError(
          "integration diverged at t = " + format_time(t) +
          ": trace deviation " + std::to_string(trace_dev));
    }

    double lambda_min = gershgorin_lower_bound(rho);
    if (lambda_min < -opt.negativity_tol) {
      lambda_min = min_eigenvalue_hermitian(rho);
    }
    traj.min_eigenvalue_seen = std::min(traj.min_eigenvalue_seen, lambda_min);
    if (lambda_min < -opt.negativity_tol) {
      throw IntegrationDivergedError(
          "integration diverged at t = " + format_time(t) +
          ": negative eigenvalue " + std::to_string(lambda_min));
    }
  }

  void finish() const {
    if (worst_defect > opt.hermiticity_warn_tol) {
      std::ostringstream os;
      os << "integrate: hermiticity correction reached " << worst_defect;
      warn(os.str());
    }
  }
};

void record_sample(Trajectory& traj, const IntegrateOptions& opt, double t,
                   const ComplexMatrix& rho) {
  traj.times.push_back(t);
  if (opt.store_states) {
    traj.states_flat.insert(traj.states_flat.end(), rho.data(),
                            rho.data() + rho.size());
  }
  if (traj.dim == 2) traj.bloch.push_back(bloch_from_matrix(rho));
}

Trajectory integrate_matrix(const OpenSystemModel& model,
                            const DensityMatrix& rho0,
                            std::pair<double, double> t_span, double dt,
                            const IntegrateOptions& opt) {
  const StepGrid grid = step_grid(t_span.first, t_span.second, dt);
  const long long n = grid.n;
  dt = grid.dt;
  Trajectory traj;
  traj.dim = model.dim();
  StepGuard guard{opt, traj};

  ComplexMatrix rho = rho0.matrix();
  record_sample(traj, opt, t_span.first, rho);

  ComplexMatrix k1, k2, k3, k4;
  for (long long step = 0; step < n; ++step) {
    const double t = t_span.first + static_cast<double>(step) * dt;
    k1 = rhs(model, rho, t);
    k2 = rhs(model, ComplexMatrix(rho + 0.5 * dt * k1), t + 0.5 * dt);
    k3 = rhs(model, ComplexMatrix(rho + 0.5 * dt * k2), t + 0.5 * dt);
    k4 = rhs(model, ComplexMatrix(rho + dt * k3), t + dt);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = (step + 1 == n)
                              ? t_span.second
                              : t_span.first + static_cast<double>(step + 1) * dt;
    guard.enforce(rho, t_next);
    if ((step + 1) % opt.sample_stride == 0 || step == n - 1) {
      record_sample(traj, opt, t_next, rho);
    }
  }
  guard.finish();
  return traj;
}

Trajectory integrate_superop(const OpenSystemModel& model,
                             const DensityMatrix& rho0,
                             std::pair<double, double> t_span, double dt,
                             const IntegrateOptions& opt) {
  const StepGrid grid = step_grid(t_span.first, t_span.second, dt);
  const long long n = grid.n;
  dt = grid.dt;
  const int dim = model.dim();
  const int nn = dim * dim;
  Trajectory traj;
  traj.dim = dim;
  StepGuard guard{opt, traj};

  const ComplexMatrix l = liouvillian_matrix(model);
  ComplexVector v(nn);
  {
    Eigen::Map<ComplexMatrix> m(v.data(), dim, dim);
    m = rho0.matrix();
    record_sample(traj, opt, t_span.first, m);
  }

  ComplexVector k1(nn), k2(nn), k3(nn), k4(nn), tmp(nn);
  for (long long step = 0; step < n; ++step) {
    k1.noalias() = l * v;
    tmp = v + (0.5 * dt) * k1;
    k2.noalias() = l * tmp;
    tmp = v + (0.5 * dt) * k2;
    k3.noalias() = l * tmp;
    tmp = v + dt * k3;
    k4.noalias() = l * tmp;
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = (step + 1 == n)
                              ? t_span.second
                              : t_span.first + static_cast<double>(step + 1) * dt;
    Eigen::Map<ComplexMatrix> rho(v.data(), dim, dim);
    guard.enforce(rho, t_next);
    if ((step + 1) % opt.sample_stride == 0 || step == n - 1) {
      record_sample(traj, opt, t_next, rho);
    }
  }
  guard.finish();
  return traj;
}

// Dim-2 fast path: the master equation acts on (1, m) affinely, so the
// Bloch vector obeys m' = M m + b with M, b read off from the dissipators
// and the Hamiltonian entering as a rotation m' += 2 h x m where
// h_i = Re tr(sigma_i H) / 2.
struct BlochField {
  Eigen::Matrix3d m_diss;
  Eigen::Vector3d b_diss;
  const OpenSystemModel* model;
  bool time_dep;
  Eigen::Vector3d omega_static;

  static Eigen::Vector3d bloch_of(const ComplexMatrix& m) {
    const BlochVector v = bloch_from_matrix(m);
    return {v.x, v.y, v.z};
  }

  explicit BlochField(const OpenSystemModel& mod) : model(&mod) {
    time_dep = mod.time_dependent();
    OpenSystemModel diss_only(ComplexMatrix::Zero(2, 2),
                              std::vector<LindbladTerm>(mod.terms().begin(),
                                                        mod.terms().end()));
    const ComplexMatrix rho_half = 0.5 * ComplexMatrix::Identity(2, 2);
    b_diss = bloch_of(rhs(diss_only, rho_half, 0.0));
    const Pauli axes[3] = {Pauli::X, Pauli::Y, Pauli::Z};
    for (int i = 0; i < 3; ++i) {
      const ComplexMatrix rho_i = rho_half + 0.5 * pauli(axes[i]);
      m_diss.col(i) = bloch_of(rhs(diss_only, rho_i, 0.0)) - b_diss;
    }
    if (!time_dep) omega_static = omega_at(0.0);
  }

  Eigen::Vector3d omega_at(double t) const {
    const ComplexMatrix h = model->hamiltonian(t);
    // 2 * (Re tr(sigma_i H) / 2) = Re tr(sigma_i H)
    const Complex h01 = h(0, 1);
    return {2.0 * h01.real(), 2.0 * h01.imag(),
            (h(1, 1) - h(0, 0)).real()};
  }

  Eigen::Vector3d deriv(const Eigen::Vector3d& m,
                        const Eigen::Vector3d& omega) const {
    return m_diss * m + b_diss + omega.cross(m);
  }
};

Trajectory integrate_bloch(const OpenSystemModel& model,
                           const DensityMatrix& rho0,
                           std::pair<double, double> t_span, double dt,
                           const IntegrateOptions& opt) {
  const StepGrid grid = step_grid(t_span.first, t_span.second, dt);
  const long long n = grid.n;
  dt = grid.dt;
  Trajectory traj;
  traj.dim = 2;

  const BlochField field(model);
  const BlochVector m0 = bloch_from_rho(rho0);
  Eigen::Vector3d m(m0.x, m0.y, m0.z);

  auto record = [&](double t, const Eigen::Vector3d& v) {
    traj.times.push_back(t);
    traj.bloch.push_back({v.x(), v.y(), v.z()});
    if (opt.store_states) {
      const ComplexMatrix rho =
          rho_from_bloch({v.x(), v.y(), v.z()}).matrix();
      traj.states_flat.insert(traj.states_flat.end(), rho.data(),
                              rho.data() + rho.size());
    }
  };
  record(t_span.first, m);

  const double norm_limit = 1.0 + 2.0 * opt.negativity_tol;
  for (long long step = 0; step < n; ++step) {
    const double t = t_span.first + static_cast<double>(step) * dt;
    Eigen::Vector3d w0 = field.omega_static;
    Eigen::Vector3d w_mid = w0;
    Eigen::Vector3d w1 = w0;
    if (field.time_dep) {
      w0 = field.omega_at(t);
      w_mid = field.omega_at(t + 0.5 * dt);
      w1 = field.omega_at(t + dt);
    }
    const Eigen::Vector3d k1 = field.deriv(m, w0);
    const Eigen::Vector3d k2 = field.deriv(m + 0.5 * dt * k1, w_mid);
    const Eigen::Vector3d k3 = field.deriv(m + 0.5 * dt * k2, w_mid);
    const Eigen::Vector3d k4 = field.deriv(m + dt * k3, w1);
    m += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = (step + 1 == n)
                              ? t_span.second
                              : t_span.first + static_cast<double>(step + 1) * dt;
    if (!m.allFinite() || m.norm() > norm_limit) {
      throw IntegrationDivergedError(
          "integration diverged at t = " + format_time(t_next) +
          ": Bloch norm " + std::to_string(m.norm()));
    }
    traj.min_eigenvalue_seen =
        std::min(traj.min_eigenvalue_seen, 0.5 * (1.0 - m.norm()));
    if ((step + 1) % opt.sample_stride == 0 || step == n - 1) {
      record(t_next, m);
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate(const OpenSystemModel& model, const DensityMatrix& rho0,
                     std::pair<double, double> t_span, double dt,
                     const IntegrateOptions& options) {
  if (rho0.dim() != model.dim()) {
    throw DimensionError("integrate: state dimension " +
                         std::to_string(rho0.dim()) +
                         " does not match model dimension " +
                         std::to_string(model.dim()));
  }
  if (options.sample_stride < 1) {
    throw ConfigError("integrate: sample_stride must be >= 1");
  }
  if (options.prefer_bloch_path && model.dim() == 2) {
    return integrate_bloch(model, rho0, t_span, dt, options);
  }
  if (!model.time_dependent()) {
    return integrate_superop(model, rho0, t_span, dt, options);
  }
  return integrate_matrix(model, rho0, t_span, dt, options);
}

double suggest_dt(const OpenSystemModel& model,
                  const std::vector<double>& extra_angular_freqs) {
  double w_max = model.max_angular_scale();
  for (double w : extra_angular_freqs) w_max = std::max(w_max, std::abs(w));
  const double f_max = w_max / kTwoPi;
  if (!(f_max > 0.0)) {
    throw ConfigError("suggest_dt: model has no frequency scale");
  }
  return 1.0 / (50.0 * f_max);
}

DensityMatrix steady_state(const OpenSystemModel& model) {
  if (model.time_dependent()) {
    throw ConfigError("steady_state requires a time-independent model");
  }
  const int dim = model.dim();
  const int nn = dim * dim;
  ComplexMatrix l = liouvillian_matrix(model);
  const double scale = l.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    throw NonUniqueSteadyStateError(
        "steady_state: Liouvillian is identically zero");
  }
  l /= scale;

  Eigen::JacobiSVD<ComplexMatrix> svd(l);
  const auto& sv = svd.singularValues();
  const double ratio = sv(nn - 2) / sv(0);
  if (!(ratio > 1e-8)) {
    throw NonUniqueSteadyStateError(
        "steady_state: null space is not one-dimensional "
        "(second-smallest/largest singular value ratio " +
        std::to_string(ratio) + ")");
  }

  ComplexMatrix a(nn + 1, nn);
  a.topRows(nn) = l;
  a.row(nn).setZero();
  for (int i = 0; i < dim; ++i) a(nn, i * dim + i) = 1.0;
  ComplexVector b = ComplexVector::Zero(nn + 1);
  b(nn) = 1.0;

  const ComplexVector x = a.colPivHouseholderQr().solve(b);
  Eigen::Map<const ComplexMatrix> rho_map(x.data(), dim, dim);
  ComplexMatrix rho = 0.5 * (rho_map + rho_map.adjoint());
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

}  // namespace spinlock
