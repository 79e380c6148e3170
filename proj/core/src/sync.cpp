#include "spinlock/sync.hpp"

#include <cmath>
#include <numbers>

#include "spinlock/errors.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

namespace {

void require_finite_rate(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ConfigError(std::string("RateSet: ") + name +
                      " must be finite and non-negative");
  }
}

// Shared denominator of the stationary solution:
// D = (16 delta^2 + gamma_t^2)(gamma_g + gamma_d) + 8 gamma_t epsilon^2.
struct StationaryParts {
  double u;  // 16 delta^2 + gamma_t^2
  double d;  // denominator
};

StationaryParts stationary_parts(const RateSet& r, double epsilon,
                                 double delta) {
  const double gt = r.gamma_t();
  StationaryParts p;
  p.u = 16.0 * delta * delta + gt * gt;
  p.d = p.u * (r.gamma_g() + r.gamma_d()) + 8.0 * gt * epsilon * epsilon;
  return p;
}

}  // namespace

RateSet::RateSet(double gamma_g, double gamma_d, double gamma_z)
    : gamma_g_(gamma_g), gamma_d_(gamma_d), gamma_z_(gamma_z) {
  require_finite_rate(gamma_g, "gamma_g");
  require_finite_rate(gamma_d, "gamma_d");
  require_finite_rate(gamma_z, "gamma_z");
}

DriveParams::DriveParams(double epsilon, double delta, double varphi)
    : epsilon_(epsilon), delta_(delta), varphi_(wrap_angle(varphi)) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ConfigError("DriveParams: epsilon must be finite and non-negative");
  }
  if (!std::isfinite(delta) || !std::isfinite(varphi)) {
    throw ConfigError("DriveParams: delta and varphi must be finite");
  }
}

BlochVector limit_cycle(const RateSet& rates) {
  const double sum = rates.gamma_g() + rates.gamma_d();
  if (sum <= 0.0) {
    throw UndefinedLimitCycleError(
        "limit_cycle: gamma_g + gamma_d = 0 leaves the populations free");
  }
  return {0.0, 0.0, (rates.gamma_g() - rates.gamma_d()) / sum};
}

double limit_cycle_theta0(const RateSet& rates) {
  return std::acos(limit_cycle(rates).z);
}

BlochVector steady_bloch(const RateSet& rates, const DriveParams& drive) {
  const StationaryParts p =
      stationary_parts(rates, drive.epsilon(), drive.delta());
  if (p.d <= 0.0) {
    throw NonUniqueSteadyStateError(
        "steady_bloch: no relaxation channel fixes the state");
  }
  const double diff = rates.gamma_g() - rates.gamma_d();
  const double gt = rates.gamma_t();
  const double four_delta = 4.0 * drive.delta();
  const double cos_phi = std::cos(drive.varphi());
  const double sin_phi = std::sin(drive.varphi());
  const double k = 4.0 * drive.epsilon() * diff / p.d;
  return {k * (four_delta * cos_phi + gt * sin_phi),
          k * (four_delta * sin_phi - gt * cos_phi), p.u * diff / p.d};
}

double contrast(const RateSet& rates, const DriveParams& drive) {
  const StationaryParts p =
      stationary_parts(rates, drive.epsilon(), drive.delta());
  if (p.d <= 0.0) {
    throw NonUniqueSteadyStateError(
        "contrast: no relaxation channel fixes the state");
  }
  return drive.epsilon() * std::abs(rates.gamma_g() - rates.gamma_d()) *
         std::sqrt(p.u) / p.d;
}

SyncAnalytics sync_analytics(const RateSet& rates, const DriveParams& drive) {
  if (rates.gamma_g() == rates.gamma_d()) {
    throw NoPhasePreferenceError(
        "sync_analytics: gamma_g == gamma_d gives zero contrast for every "
        "drive; no phase is preferred");
  }
  SyncAnalytics out;
  out.steady = steady_bloch(rates, drive);
  out.contrast = contrast(rates, drive);
  out.phase_shift = std::atan(4.0 * drive.delta() / rates.gamma_t());
  const double half_pi = 0.5 * std::numbers::pi;
  const double offset =
      rates.gamma_g() > rates.gamma_d() ? -half_pi : half_pi;
  out.sync_phase = wrap_angle(drive.varphi() + out.phase_shift + offset);
  return out;
}

double critical_epsilon(const RateSet& rates, double delta) {
  if (rates.gamma_g() == rates.gamma_d()) {
    throw NoPhasePreferenceError(
        "critical_epsilon: contrast vanishes identically for "
        "gamma_g == gamma_d");
  }
  const auto value = [&](double eps) {
    return contrast(rates, DriveParams(eps, delta));
  };

  // Bracket the single interior maximum of eps -> contrast.
  double hi = rates.gamma_t() + rates.gamma_g() + rates.gamma_d();
  while (value(hi) >= value(0.5 * hi)) hi *= 2.0;

  // Golden-section search on [0, hi].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = value(x1);
  double f2 = value(x2);
  while (b - a > 1e-6 * std::max(b, 1e-300)) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = value(x1);
    }
  }
  return 0.5 * (a + b);
}

double bandwidth_3db(const RateSet& rates, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw ConfigError("bandwidth_3db: requires a nonzero drive");
  }
  if (rates.gamma_g() == rates.gamma_d()) {
    throw NoPhasePreferenceError(
        "bandwidth_3db: contrast vanishes identically for "
        "gamma_g == gamma_d");
  }
  const auto value = [&](double delta) {
    return contrast(rates, DriveParams(epsilon, delta));
  };
  const double target = 0.5 * value(0.0);

  double hi = 0.25 * rates.gamma_t();
  while (value(hi) >= target) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 2.0 * 0.5 * (lo + hi);
}

double deformation(const RateSet& rates, double epsilon, double delta) {
  const BlochVector driven = steady_bloch(rates, DriveParams(epsilon, delta));
  const BlochVector undriven = steady_bloch(rates, DriveParams(0.0, delta));
  return driven.z - undriven.z;
}

OpenSystemModel build_rotating_model(const RateSet& rates,
                                     const DriveParams& drive) {
  const ComplexMatrix h =
      0.5 * (drive.delta() * pauli(Pauli::Z) +
             drive.epsilon() * (std::cos(drive.varphi()) * pauli(Pauli::X) +
                                std::sin(drive.varphi()) * pauli(Pauli::Y)));
  std::vector<LindbladTerm> terms;
  terms.push_back({pauli(Pauli::Plus), 0.5 * rates.gamma_g()});
  terms.push_back({pauli(Pauli::Minus), 0.5 * rates.gamma_d()});
  terms.push_back({pauli(Pauli::Z), 0.5 * rates.gamma_z()});
  return OpenSystemModel(h, std::move(terms));
}

}  // namespace spinlock
