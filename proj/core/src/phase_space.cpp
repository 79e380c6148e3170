#include "spinlock/phase_space.hpp"

#include <cmath>
#include <numbers>

#include "spinlock/errors.hpp"
#include "spinlock/io.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

namespace {

constexpr double kPi = std::numbers::pi;

void require_qubit(const DensityMatrix& rho, const char* what) {
  if (rho.dim() != 2) {
    throw DimensionError(std::string(what) +
                         ": phase-space functions are defined for dim 2");
  }
}

}  // namespace

double q_function(const DensityMatrix& rho, const SpinCoherentDirection& dir) {
  require_qubit(rho, "q_function");
  const ComplexVector ket = coherent_ket(dir);
  const Complex expectation = (ket.adjoint() * rho.matrix() * ket)(0, 0);
  return expectation.real() / kTwoPi;
}

double q_function_bloch(const BlochVector& m,
                        const SpinCoherentDirection& dir) {
  const BlochVector n = dir.unit();
  return (1.0 + m.dot(n)) / (4.0 * kPi);
}

PhaseSpaceGrid q_grid(const DensityMatrix& rho, int n_theta, int n_phi) {
  require_qubit(rho, "q_grid");
  if (n_theta < 2 || n_phi < 3) {
    throw ConfigError("q_grid: need n_theta >= 2 and n_phi >= 3");
  }
  PhaseSpaceGrid grid;
  grid.n_theta = n_theta;
  grid.n_phi = n_phi;
  grid.theta.resize(n_theta);
  grid.phi.resize(n_phi);
  grid.values.resize(static_cast<std::size_t>(n_theta) * n_phi);

  const BlochVector m = bloch_from_rho(rho);
  for (int i = 0; i < n_theta; ++i) {
    grid.theta[i] = kPi * i / (n_theta - 1);
  }
  for (int j = 0; j < n_phi; ++j) {
    grid.phi[j] = kTwoPi * j / n_phi;
  }
  for (int i = 0; i < n_theta; ++i) {
    const double sin_t = std::sin(grid.theta[i]);
    const double cos_t = std::cos(grid.theta[i]);
    for (int j = 0; j < n_phi; ++j) {
      const double ndotm = sin_t * std::cos(grid.phi[j]) * m.x +
                           sin_t * std::sin(grid.phi[j]) * m.y + cos_t * m.z;
      grid.values[static_cast<std::size_t>(i) * n_phi + j] =
          (1.0 + ndotm) / (4.0 * kPi);
    }
  }
  return grid;
}

double integrate_uniform(const std::vector<double>& values, double h) {
  const std::size_t n = values.size();
  if (n < 2) throw ConfigError("integrate_uniform: need at least two nodes");
  if (n == 2) return 0.5 * h * (values[0] + values[1]);
  const std::size_t intervals = n - 1;

  auto simpson13 = [&](std::size_t first, std::size_t last) {
    // last - first even; plain composite Simpson.
    double sum = values[first] + values[last];
    for (std::size_t i = first + 1; i < last; ++i) {
      sum += values[i] * ((i - first) % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
  };

  if (intervals % 2 == 0) return simpson13(0, n - 1);
  if (n == 4) {
    return 3.0 * h / 8.0 *
           (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]);
  }
  // Odd interval count: 3/8 rule on the last three intervals.
  const std::size_t split = n - 4;
  const double tail = 3.0 * h / 8.0 *
                      (values[split] + 3.0 * values[split + 1] +
                       3.0 * values[split + 2] + values[split + 3]);
  return simpson13(0, split) + tail;
}

double grid_normalization(const PhaseSpaceGrid& grid) {
  if (grid.n_theta < 2 || grid.n_phi < 1 ||
      grid.values.size() !=
          static_cast<std::size_t>(grid.n_theta) * grid.n_phi) {
    throw ConfigError("grid_normalization: malformed grid");
  }
  const double h_theta = kPi / (grid.n_theta - 1);
  const double h_phi = kTwoPi / grid.n_phi;
  std::vector<double> column(grid.n_theta);
  double total = 0.0;
  for (int j = 0; j < grid.n_phi; ++j) {
    for (int i = 0; i < grid.n_theta; ++i) {
      column[i] = grid.at(i, j) * std::sin(grid.theta[i]);
    }
    total += integrate_uniform(column, h_theta);
  }
  return total * h_phi;
}

double s_function(const DensityMatrix& rho, double phi) {
  require_qubit(rho, "s_function");
  const BlochVector m = bloch_from_rho(rho);
  return (m.x * std::cos(phi) + m.y * std::sin(phi)) / 8.0;
}

double s_function_quadrature(const DensityMatrix& rho, double phi,
                             int n_theta) {
  require_qubit(rho, "s_function_quadrature");
  if (n_theta < 3) {
    throw ConfigError("s_function_quadrature: need at least 3 theta nodes");
  }
  const double h = kPi / (n_theta - 1);
  std::vector<double> integrand(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    const double theta = h * i;
    integrand[i] =
        q_function(rho, SpinCoherentDirection(theta, phi)) * std::sin(theta);
  }
  return integrate_uniform(integrand, h) - 1.0 / kTwoPi;
}

SProfile s_profile(const DensityMatrix& rho, int n_phi) {
  require_qubit(rho, "s_profile");
  if (n_phi < 3) throw ConfigError("s_profile: need at least 3 phi nodes");
  SProfile profile;
  profile.phi.resize(n_phi);
  profile.s.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) {
    profile.phi[j] = kTwoPi * j / n_phi;
    profile.s[j] = s_function(rho, profile.phi[j]);
  }
  return fit_s_profile(std::move(profile));
}

SProfile fit_s_profile(SProfile profile) {
  const std::size_t n = profile.phi.size();
  if (n != profile.s.size()) {
    throw DimensionError("fit_s_profile: phi and s lengths differ");
  }
  if (n < 2) {
    throw ConfigError("fit_s_profile: need at least two samples");
  }

  double scc = 0.0, css = 0.0, scs = 0.0, rc = 0.0, rs = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(profile.phi[i]);
    const double s = std::sin(profile.phi[i]);
    scc += c * c;
    css += s * s;
    scs += c * s;
    rc += profile.s[i] * c;
    rs += profile.s[i] * s;
    if (profile.s[i] != 0.0) all_zero = false;
  }
  const double det = scc * css - scs * scs;
  if (!(det > 1e-12 * static_cast<double>(n * n))) {
    throw IllConditionedDesignError(
        "fit_s_profile: phi nodes do not separate the two harmonics");
  }
  const double a = (css * rc - scs * rs) / det;
  const double b = (scc * rs - scs * rc) / det;

  const double amplitude = std::hypot(a, b);
  profile.fitted_contrast = 2.0 * amplitude;
  if (all_zero || amplitude == 0.0) {
    profile.fitted_contrast = 0.0;
    profile.fitted_phase = 0.0;
    profile.phase_defined = false;
  } else {
    profile.fitted_phase = wrap_angle(std::atan2(b, a));
    profile.phase_defined = true;
  }
  return profile;
}

void write_q_grid_csv(const std::filesystem::path& path,
                      const PhaseSpaceGrid& grid) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(grid.n_theta) * grid.n_phi);
  for (int i = 0; i < grid.n_theta; ++i) {
    for (int j = 0; j < grid.n_phi; ++j) {
      rows.push_back({grid.theta[i], grid.phi[j], grid.at(i, j)});
    }
  }
  write_csv_atomic(path, "theta,phi,q", rows);
}

void write_s_profile_csv(const std::filesystem::path& path,
                         const SProfile& profile) {
  std::vector<std::vector<double>> rows;
  rows.reserve(profile.phi.size());
  for (std::size_t i = 0; i < profile.phi.size(); ++i) {
    rows.push_back({profile.phi[i], profile.s[i]});
  }
  write_csv_atomic(path, "phi,s", rows);
}

}  // namespace spinlock
