#include "spinlock/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spinlock/errors.hpp"
#include "spinlock/lindblad.hpp"

namespace spinlock {

namespace {

constexpr Complex kI{0.0, 1.0};

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

void validate_measurement(const MeasurementConfig& config) {
  if (!(config.spam_error >= 0.0 && config.spam_error <= 0.5)) {
    throw ConfigError("MeasurementConfig: spam_error must be in [0, 0.5]");
  }
}

}  // namespace

double measure_population(const DensityMatrix& rho,
                          const MeasurementConfig& config, Rng& rng) {
  require_dim(rho.matrix(), 2, "measure_population");
  validate_measurement(config);
  const double p = clamp01(rho.matrix()(1, 1).real());
  const double e = config.spam_error;
  const double p_eff = p * (1.0 - e) + (1.0 - p) * e;
  if (config.shots == 0) return p_eff;
  const std::uint64_t k = rng.binomial(config.shots, p_eff);
  return static_cast<double>(k) / static_cast<double>(config.shots);
}

double measure_population(const DensityMatrix& rho,
                          const MeasurementConfig& config) {
  Rng rng(config.seed);
  return measure_population(rho, config, rng);
}

ComplexMatrix AnalysisPulse::unitary() const {
  require_dim(generator, 2, "AnalysisPulse generator");
  if (!is_hermitian(generator, 1e-12)) {
    throw ConfigError("AnalysisPulse: generator must be Hermitian");
  }
  // G = c I + g . sigma; exp(-i G tau) in closed form.
  const double c = 0.5 * (generator(0, 0) + generator(1, 1)).real();
  const double gx = generator(0, 1).real();
  const double gy = generator(0, 1).imag();
  const double gz = 0.5 * (generator(1, 1) - generator(0, 0)).real();
  const double r = std::sqrt(gx * gx + gy * gy + gz * gz);
  const Complex phase = std::exp(-kI * c * duration);
  ComplexMatrix u = ComplexMatrix::Identity(2, 2);
  if (r * duration != 0.0) {
    const double angle = r * duration;
    const ComplexMatrix axis =
        (gx * pauli(Pauli::X) + gy * pauli(Pauli::Y) + gz * pauli(Pauli::Z)) /
        r;
    u = std::cos(angle) * ComplexMatrix::Identity(2, 2) -
        kI * std::sin(angle) * axis;
  }
  return phase * u;
}

double PulseTimings::tau_pi() const {
  if (!(omega_mw > 0.0)) {
    throw ConfigError("PulseTimings: omega_mw must be positive");
  }
  return std::numbers::pi / omega_mw;
}

std::vector<AnalysisPulse> resonant_pulse_set(const PulseTimings& timings) {
  const double tau = timings.tau_pi();
  const double w = timings.omega_mw;
  std::vector<AnalysisPulse> set(3);
  set[0].generator = -0.25 * w * pauli(Pauli::Y);
  set[0].duration = tau;
  set[1].generator = 0.25 * w * pauli(Pauli::X);
  set[1].duration = tau;
  set[2].generator = ComplexMatrix::Zero(2, 2);
  set[2].duration = 0.0;
  return set;
}

std::vector<AnalysisPulse> detuned_pulse_set(double delta,
                                             const PulseTimings& timings) {
  const double tau = timings.tau_pi();
  const double w = timings.omega_mw;
  const ComplexMatrix gx = delta * pauli(Pauli::Z) + w * pauli(Pauli::X);
  const ComplexMatrix gy = delta * pauli(Pauli::Z) + w * pauli(Pauli::Y);
  std::vector<AnalysisPulse> set(5);
  set[0] = {gx, 0.25 * tau};
  set[1] = {gx, 0.5 * tau};
  set[2] = {gy, 0.25 * tau};
  set[3] = {gy, 0.5 * tau};
  set[4] = {ComplexMatrix::Zero(2, 2), 0.0};
  return set;
}

BlochVector measurement_axis(const AnalysisPulse& pulse) {
  const ComplexMatrix u = pulse.unitary();
  const ComplexMatrix a = u.adjoint() * pauli(Pauli::Z) * u;
  return {a(0, 1).real(), a(0, 1).imag(),
          0.5 * (a(1, 1) - a(0, 0)).real()};
}

namespace {

std::vector<double> measure_through_pulses(
    const DensityMatrix& rho, const std::vector<AnalysisPulse>& pulses,
    const MeasurementConfig& config, Rng& rng) {
  std::vector<double> fractions;
  fractions.reserve(pulses.size());
  for (const auto& pulse : pulses) {
    const ComplexMatrix u = pulse.unitary();
    const ComplexMatrix rotated = u * rho.matrix() * u.adjoint();
    fractions.push_back(
        measure_population(DensityMatrix::trusted(rotated), config, rng));
  }
  return fractions;
}

BlochVector clip_to_ball(const BlochVector& m) {
  const double n = m.norm();
  if (n <= 1.0) return m;
  return {m.x / n, m.y / n, m.z / n};
}

Eigen::MatrixXd axis_matrix(const std::vector<AnalysisPulse>& pulses) {
  Eigen::MatrixXd n(static_cast<Eigen::Index>(pulses.size()), 3);
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const BlochVector axis = measurement_axis(pulses[i]);
    n(static_cast<Eigen::Index>(i), 0) = axis.x;
    n(static_cast<Eigen::Index>(i), 1) = axis.y;
    n(static_cast<Eigen::Index>(i), 2) = axis.z;
  }
  return n;
}

void require_spanning(const Eigen::MatrixXd& axes) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(axes);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-8 * sv(0))) {
    throw IllConditionedDesignError(
        "tomography: measurement axes span fewer than three directions");
  }
}

}  // namespace

BlochVector tomography_resonant(const DensityMatrix& rho,
                                const MeasurementConfig& config, Rng& rng,
                                const PulseTimings& timings) {
  const auto pulses = resonant_pulse_set(timings);
  const Eigen::MatrixXd axes = axis_matrix(pulses);
  require_spanning(axes);
  const auto fractions = measure_through_pulses(rho, pulses, config, rng);
  Eigen::VectorXd b(3);
  for (int i = 0; i < 3; ++i) b(i) = 2.0 * fractions[i] - 1.0;
  const Eigen::Vector3d m = axes.colPivHouseholderQr().solve(b);
  return clip_to_ball({m(0), m(1), m(2)});
}

BlochVector tomography_resonant(const DensityMatrix& rho,
                                const MeasurementConfig& config,
                                const PulseTimings& timings) {
  Rng rng(config.seed);
  return tomography_resonant(rho, config, rng, timings);
}

namespace {

// Binomial log-likelihood of the measured fractions under the Bloch model
// p_i = (1 + m . n_i) / 2, and its gradient.
struct Likelihood {
  const Eigen::MatrixXd& axes;
  const std::vector<double>& fractions;
  double weight;  // shots per pulse; 1 in infinite-shot mode

  double value(const Eigen::Vector3d& m) const {
    double l = 0.0;
    for (Eigen::Index i = 0; i < axes.rows(); ++i) {
      const double p = clamp_p(0.5 * (1.0 + axes.row(i).dot(m)));
      l += weight * (fractions[i] * std::log(p) +
                     (1.0 - fractions[i]) * std::log(1.0 - p));
    }
    return l;
  }

  Eigen::Vector3d gradient(const Eigen::Vector3d& m) const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (Eigen::Index i = 0; i < axes.rows(); ++i) {
      const double p = clamp_p(0.5 * (1.0 + axes.row(i).dot(m)));
      const double factor =
          weight * (fractions[i] / p - (1.0 - fractions[i]) / (1.0 - p));
      g += 0.5 * factor * axes.row(i).transpose();
    }
    return g;
  }

  static double clamp_p(double p) {
    return std::min(1.0 - 1e-12, std::max(1e-12, p));
  }
};

Eigen::Vector3d project_ball(const Eigen::Vector3d& m) {
  const double n = m.norm();
  return n > 1.0 ? Eigen::Vector3d(m / n) : m;
}

}  // namespace

BlochVector tomography_detuned(const DensityMatrix& rho, double delta,
                               const MeasurementConfig& config, Rng& rng,
                               const PulseTimings& timings) {
  const auto pulses = detuned_pulse_set(delta, timings);
  const Eigen::MatrixXd axes = axis_matrix(pulses);
  require_spanning(axes);
  const auto fractions = measure_through_pulses(rho, pulses, config, rng);

  const double weight =
      config.shots == 0 ? 1.0 : static_cast<double>(config.shots);
  const Likelihood likelihood{axes, fractions, weight};

  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_value = likelihood.value(best);

  for (int restart = 0; restart < 10; ++restart) {
    // Random start inside the ball.
    Eigen::Vector3d m;
    do {
      m = Eigen::Vector3d(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                          2.0 * rng.uniform() - 1.0);
    } while (m.norm() > 1.0);

    double value = likelihood.value(m);
    double step = 1.0 / (weight * static_cast<double>(axes.rows()));
    for (int iter = 0; iter < 5000; ++iter) {
      const Eigen::Vector3d grad = likelihood.gradient(m);
      Eigen::Vector3d next;
      double next_value = -std::numeric_limits<double>::infinity();
      bool improved = false;
      for (int backtrack = 0; backtrack < 40; ++backtrack) {
        next = project_ball(m + step * grad);
        next_value = likelihood.value(next);
        if (next_value >= value) {
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
      const double move = (next - m).norm();
      m = next;
      value = next_value;
      step *= 1.5;
      if (move < 1e-9) break;
    }
    if (value > best_value) {
      best_value = value;
      best = m;
    }
  }
  return {best(0), best(1), best(2)};
}

BlochVector tomography_detuned(const DensityMatrix& rho, double delta,
                               const MeasurementConfig& config,
                               const PulseTimings& timings) {
  Rng rng(config.seed);
  return tomography_detuned(rho, delta, config, rng, timings);
}

namespace {

// Integrates the model to each sample time exactly (dt adjusted per point
// to land on it), applies an optional analysis pulse, and measures.
std::vector<double> sample_populations(const OpenSystemModel& model,
                                       const DensityMatrix& rho0,
                                       const std::vector<double>& times,
                                       const AnalysisPulse* pulse,
                                       const MeasurementConfig& config,
                                       Rng& rng) {
  const double dt_hint = suggest_dt(model);
  std::vector<double> populations;
  populations.reserve(times.size());
  for (double t : times) {
    DensityMatrix rho = rho0;
    if (t > 0.0) {
      const long long n =
          std::max(1LL, static_cast<long long>(std::ceil(t / dt_hint)));
      IntegrateOptions options;
      options.sample_stride = std::numeric_limits<int>::max();
      options.store_states = true;
      const Trajectory traj =
          integrate(model, rho0, {0.0, t}, t / static_cast<double>(n), options);
      rho = traj.density_matrix(traj.size() - 1);
    }
    if (pulse != nullptr) {
      const ComplexMatrix u = pulse->unitary();
      rho = DensityMatrix::trusted(u * rho.matrix() * u.adjoint());
    }
    populations.push_back(measure_population(rho, config, rng));
  }
  return populations;
}

std::vector<double> linspace(double t_max, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t_max * i / (n - 1);
  return t;
}

}  // namespace

RateFitReport rate_fit_protocol(const RateSet& truth,
                                const MeasurementConfig& config,
                                int n_points) {
  if (n_points < 4) {
    throw ConfigError("rate_fit_protocol: need at least 4 points");
  }
  if (!(truth.gamma_g() > 0.0) || !(truth.gamma_d() > 0.0)) {
    throw ConfigError(
        "rate_fit_protocol: both gain and damping must be nonzero");
  }
  const DriveParams off(0.0);
  const ComplexMatrix ket0 = pauli(Pauli::Minus) * pauli(Pauli::Plus);
  const DensityMatrix ground = DensityMatrix::trusted(ket0);
  const DensityMatrix excited =
      DensityMatrix::trusted(pauli(Pauli::Plus) * pauli(Pauli::Minus));
  const DensityMatrix plus = rho_from_bloch({1.0, 0.0, 0.0});

  RateFitReport report;
  const auto x_pulse = resonant_pulse_set()[0];

  {
    Rng rng(config.seed, "ratefit/gain", 0);
    const OpenSystemModel model =
        build_rotating_model(RateSet(truth.gamma_g(), 0.0, 0.0), off);
    const auto t = linspace(12.0 / truth.gamma_g(), n_points);
    const auto p = sample_populations(model, ground, t, nullptr, config, rng);
    report.gain_data = {t, p};
    report.gain = fit_decay(t, p);
    report.gamma_g = report.gain.params[1];
    report.gamma_g_error = report.gain.param_errors[1];
  }
  {
    Rng rng(config.seed, "ratefit/damping", 0);
    const OpenSystemModel model =
        build_rotating_model(RateSet(0.0, truth.gamma_d(), 0.0), off);
    const auto t = linspace(12.0 / truth.gamma_d(), n_points);
    const auto p = sample_populations(model, excited, t, nullptr, config, rng);
    report.damping_data = {t, p};
    report.damping = fit_decay(t, p);
    report.gamma_d = report.damping.params[1];
    report.gamma_d_error = report.damping.param_errors[1];
  }
  {
    Rng rng(config.seed, "ratefit/combined", 0);
    const OpenSystemModel model = build_rotating_model(truth, off);
    const double rate = truth.gamma_g() + truth.gamma_d();
    const auto t = linspace(12.0 / rate, n_points);
    const auto p = sample_populations(model, excited, t, nullptr, config, rng);
    report.combined_data = {t, p};
    report.combined = fit_decay(t, p);
    report.gamma_sum = report.combined.params[1];
  }
  {
    Rng rng(config.seed, "ratefit/coherence", 0);
    const OpenSystemModel model = build_rotating_model(truth, off);
    const double rate = 0.5 * truth.gamma_t();
    const auto t = linspace(12.0 / rate, n_points);
    const auto p = sample_populations(model, plus, t, &x_pulse, config, rng);
    report.coherence_data = {t, p};
    report.coherence = fit_decay(t, p);
  }

  const double gamma_coh = report.coherence.params[1];
  report.gamma_z =
      0.5 * (gamma_coh - 0.5 * (report.gamma_g + report.gamma_d));
  const double coh_err = report.coherence.param_errors[1];
  report.gamma_z_error =
      0.5 * std::sqrt(coh_err * coh_err +
                      0.25 * (report.gamma_g_error * report.gamma_g_error +
                              report.gamma_d_error * report.gamma_d_error));
  return report;
}

}  // namespace spinlock
