#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace spinlock {

struct FitResult {
  // Model-specific parameter order; see the fit functions below.
  std::vector<double> params;
  // Standard errors: sqrt of the covariance diagonal.
  std::vector<double> param_errors;
  Eigen::MatrixXd covariance;
  double residual_rms = 0.0;
  int iterations = 0;
};

// residuals_and_jacobian(x, r, J): fills r (n) and J = dr/dx (n x p).
using ResidualFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                       Eigen::MatrixXd&)>;

// Dense Levenberg-Marquardt with analytic Jacobians. Throws FitFailedError
// (with the last parameter vector and residual in the message) if it has
// not converged after max_iterations.
FitResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0,
                              int n_residuals, int max_iterations = 200);

// y = A exp(-gamma t / 2) + B; params = {A, gamma, B}. Initialized by
// log-linear regression of |y - y_last| against t.
FitResult fit_decay(const std::vector<double>& t,
                    const std::vector<double>& y);

// y = A exp(-gamma t / 2) cos(omega t + psi) + B;
// params = {A, gamma, omega, psi, B}. Initialized from a coarse DFT scan.
FitResult fit_damped_cosine(const std::vector<double>& t,
                            const std::vector<double>& y);

}  // namespace spinlock
