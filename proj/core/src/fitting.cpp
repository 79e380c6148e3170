#include "spinlock/fitting.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "spinlock/errors.hpp"

namespace spinlock {

namespace {

void check_series(const std::vector<double>& t, const std::vector<double>& y,
                  std::size_t min_points, const char* what) {
  if (t.size() != y.size()) {
    throw DimensionError(std::string(what) + ": t and y lengths differ");
  }
  if (t.size() < min_points) {
    throw ConfigError(std::string(what) + ": need at least " +
                      std::to_string(min_points) + " points");
  }
  for (double v : t) {
    if (!std::isfinite(v)) {
      throw ConfigError(std::string(what) + ": non-finite time value");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw ConfigError(std::string(what) + ": non-finite data value");
    }
  }
}

std::string describe_params(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x(i);
  }
  os << ")";
  return os.str();
}

}  // namespace

FitResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x,
                              int n_residuals, int max_iterations) {
  const int p = static_cast<int>(x.size());
  if (n_residuals < p) {
    throw ConfigError("levenberg_marquardt: fewer residuals than parameters");
  }

  Eigen::VectorXd r(n_residuals);
  Eigen::MatrixXd j(n_residuals, p);
  fn(x, r, j);
  double cost = r.squaredNorm();

  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < max_iterations && !converged; ++iter) {
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd jtr = j.transpose() * r;

    bool accepted = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (int i = 0; i < p; ++i) {
        damped(i, i) += lambda * std::max(jtj(i, i), 1e-30);
      }
      const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      if (!delta.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const Eigen::VectorXd x_try = x + delta;
      Eigen::VectorXd r_try(n_residuals);
      Eigen::MatrixXd j_try(n_residuals, p);
      fn(x_try, r_try, j_try);
      const double cost_try = r_try.squaredNorm();
      if (std::isfinite(cost_try) && cost_try <= cost) {
        const double rel_step =
            (delta.cwiseAbs().array() /
             (x.cwiseAbs().array() + 1e-12)).maxCoeff();
        const double rel_improvement =
            (cost - cost_try) / std::max(cost, 1e-300);
        x = x_try;
        r.swap(r_try);
        j.swap(j_try);
        cost = cost_try;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (rel_step < 1e-10 || rel_improvement < 1e-13) converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      // Damping saturated without any acceptable step: stationary point.
      converged = true;
    }
  }

  if (!converged) {
    throw FitFailedError(
        "fit did not converge after " + std::to_string(max_iterations) +
        " iterations; last params " + describe_params(x) +
        ", residual rms " +
        std::to_string(std::sqrt(cost / n_residuals)));
  }

  FitResult out;
  out.params.assign(x.data(), x.data() + p);
  out.iterations = iter;
  out.residual_rms = std::sqrt(cost / n_residuals);

  const int dof = n_residuals - p;
  const double sigma2 = dof > 0 ? cost / dof : 0.0;
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse();
  out.covariance = sigma2 * cov;
  out.param_errors.resize(p);
  for (int i = 0; i < p; ++i) {
    const double v = out.covariance(i, i);
    out.param_errors[i] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return out;
}

FitResult fit_decay(const std::vector<double>& t,
                    const std::vector<double>& y) {
  check_series(t, y, 4, "fit_decay");
  const int n = static_cast<int>(t.size());

  // Log-linear initialization against the tail value.
  const double b0 = y.back();
  double amp_max = 0.0;
  for (double v : y) amp_max = std::max(amp_max, std::abs(v - b0));
  double sx = 0.0, sz = 0.0, sxx = 0.0, sxz = 0.0;
  int m = 0;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(y[i] - b0);
    if (d > 1e-3 * amp_max && d > 0.0) {
      const double z = std::log(d);
      sx += t[i];
      sz += z;
      sxx += t[i] * t[i];
      sxz += t[i] * z;
      ++m;
    }
  }
  double gamma0 = 0.0;
  double a0 = y.front() - b0;
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      const double slope = (m * sxz - sx * sz) / denom;
      const double intercept = (sz - slope * sx) / m;
      gamma0 = std::max(-2.0 * slope, 0.0);
      a0 = (y.front() >= b0 ? 1.0 : -1.0) * std::exp(intercept);
    }
  }
  if (gamma0 == 0.0) {
    const double span = t.back() - t.front();
    gamma0 = span > 0.0 ? 1.0 / span : 1.0;
  }

  Eigen::VectorXd x0(3);
  x0 << a0, gamma0, b0;
  const auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                      Eigen::MatrixXd& j) {
    const double a = x(0), gamma = x(1), b = x(2);
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-0.5 * gamma * t[i]);
      r(i) = a * e + b - y[i];
      j(i, 0) = e;
      j(i, 1) = -0.5 * t[i] * a * e;
      j(i, 2) = 1.0;
    }
  };
  return levenberg_marquardt(fn, x0, n);
}

FitResult fit_damped_cosine(const std::vector<double>& t,
                            const std::vector<double>& y) {
  check_series(t, y, 8, "fit_damped_cosine");
  const int n = static_cast<int>(t.size());
  const double span = t.back() - t.front();
  if (!(span > 0.0)) {
    throw ConfigError("fit_damped_cosine: zero time span");
  }

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;

  // Coarse DFT scan for the carrier.
  const int k_max = n / 2;
  double best_mag = -1.0;
  double omega0 = 0.0;
  std::complex<double> best_proj;
  for (int k = 1; k <= k_max; ++k) {
    const double omega = 2.0 * std::numbers::pi * k / span;
    std::complex<double> proj(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      proj += (y[i] - mean) *
              std::exp(std::complex<double>(0.0, -omega * t[i]));
    }
    if (std::abs(proj) > best_mag) {
      best_mag = std::abs(proj);
      omega0 = omega;
      best_proj = proj;
    }
  }
  const double a0 = 2.0 * best_mag / n;
  const double psi0 = std::arg(best_proj);

  // Envelope decay from the RMS ratio of the two halves.
  double rms1 = 0.0, rms2 = 0.0;
  int n1 = 0, n2 = 0;
  for (int i = 0; i < n; ++i) {
    const double d = y[i] - mean;
    if (t[i] < t.front() + 0.5 * span) {
      rms1 += d * d;
      ++n1;
    } else {
      rms2 += d * d;
      ++n2;
    }
  }
  double gamma0 = 0.0;
  if (n1 > 0 && n2 > 0 && rms1 > 0.0 && rms2 > 0.0) {
    const double ratio = std::sqrt((rms2 / n2) / (rms1 / n1));
    if (ratio < 1.0) gamma0 = -4.0 * std::log(ratio) / span;
  }

  Eigen::VectorXd x0(5);
  x0 << a0, gamma0, omega0, psi0, mean;
  const auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                      Eigen::MatrixXd& j) {
    const double a = x(0), gamma = x(1), omega = x(2), psi = x(3), b = x(4);
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-0.5 * gamma * t[i]);
      const double c = std::cos(omega * t[i] + psi);
      const double s = std::sin(omega * t[i] + psi);
      r(i) = a * e * c + b - y[i];
      j(i, 0) = e * c;
      j(i, 1) = -0.5 * t[i] * a * e * c;
      j(i, 2) = -a * e * s * t[i];
      j(i, 3) = -a * e * s;
      j(i, 4) = 1.0;
    }
  };
  return levenberg_marquardt(fn, x0, n);
}

}  // namespace spinlock
