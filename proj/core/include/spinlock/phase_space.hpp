#pragma once

#include <filesystem>
#include <vector>

#include "spinlock/quantum.hpp"

namespace spinlock {

// Husimi-Q values on a regular sphere grid: theta has n_theta nodes
// including both poles, phi has n_phi nodes covering [0, 2*pi) without the
// duplicate endpoint. values is row-major with theta as the outer index.
struct PhaseSpaceGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> values;

  double at(int i_theta, int i_phi) const {
    return values[static_cast<std::size_t>(i_theta) * n_phi + i_phi];
  }
};

// Marginal phase distribution S(phi) sampled at nodes, plus the fitted
// first harmonic. phase_defined is false for an identically flat profile.
struct SProfile {
  std::vector<double> phi;
  std::vector<double> s;
  double fitted_contrast = 0.0;  // peak-to-peak, 2 * sqrt(a^2 + b^2)
  double fitted_phase = 0.0;     // maximizing phi, in (-pi, pi]
  bool phase_defined = false;
};

// Q(theta, phi) = <theta,phi| rho |theta,phi> / (2*pi), evaluated from the
// coherent-state overlap.
double q_function(const DensityMatrix& rho, const SpinCoherentDirection& dir);

// Same quantity from the Bloch form (1 + m . n) / (4*pi).
double q_function_bloch(const BlochVector& m, const SpinCoherentDirection& dir);

PhaseSpaceGrid q_grid(const DensityMatrix& rho, int n_theta = 64,
                      int n_phi = 128);

// Integral of Q over the sphere, for normalization checks (composite
// Simpson in theta, periodic rectangle rule in phi).
double grid_normalization(const PhaseSpaceGrid& grid);

// S(phi) = integral of Q sin(theta) over theta minus 1/(2*pi); closed form
// (m_x cos(phi) + m_y sin(phi)) / 8.
double s_function(const DensityMatrix& rho, double phi);

// Same by quadrature over the bra-ket Q (composite Simpson, n_theta nodes).
double s_function_quadrature(const DensityMatrix& rho, double phi,
                             int n_theta = 257);

// Closed-form S sampled at n_phi uniform nodes in [0, 2*pi), with the
// first harmonic fitted.
SProfile s_profile(const DensityMatrix& rho, int n_phi = 64);

// Least-squares first harmonic a cos(phi) + b sin(phi) through the samples;
// fills fitted_contrast (= 2 sqrt(a^2+b^2)), fitted_phase (= atan2(b, a))
// and phase_defined.
SProfile fit_s_profile(SProfile profile);

// CSV writers: columns "theta,phi,q" (theta outer loop) and "phi,s".
void write_q_grid_csv(const std::filesystem::path& path,
                      const PhaseSpaceGrid& grid);
void write_s_profile_csv(const std::filesystem::path& path,
                         const SProfile& profile);

// Composite Simpson on a uniform grid (3/8 correction for an odd interval
// count). Exposed for reuse by quadrature checks.
double integrate_uniform(const std::vector<double>& values, double h);

}  // namespace spinlock
