#include "spinlock/labframe.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>

#include "spinlock/errors.hpp"
#include "spinlock/lindblad.hpp"
#include "spinlock/quantum.hpp"

namespace spinlock {

namespace {

// FFTW plan creation is not thread safe; execution of distinct plans is.
std::mutex fftw_plan_mutex;

void validate(const LabFrameConfig& config) {
  if (!(config.omega_q > 0.0)) {
    throw ConfigError("LabFrameConfig: omega_q must be positive");
  }
  if (!(config.omega > 0.0)) {
    throw ConfigError("LabFrameConfig: omega must be positive");
  }
  if (config.epsilon < 0.0) {
    throw ConfigError("LabFrameConfig: epsilon must be nonnegative");
  }
  if (!(config.sample_dt > 0.0)) {
    throw ConfigError("LabFrameConfig: sample_dt must be positive");
  }
  if (!(config.duration > config.sample_dt)) {
    throw ConfigError("LabFrameConfig: duration too short to sample");
  }
  if (config.drive_start < 0.0) {
    throw ConfigError("LabFrameConfig: drive_start must be nonnegative");
  }
}

}  // namespace

LabSeries simulate_lab(const LabFrameConfig& config) {
  validate(config);

  const ComplexMatrix sz = pauli(Pauli::Z);
  const ComplexMatrix sx = pauli(Pauli::X);
  auto hamiltonian = [config, sz, sx](double t) -> ComplexMatrix {
    ComplexMatrix h = 0.5 * config.omega_q * sz;
    if (t >= config.drive_start && config.epsilon > 0.0) {
      h += config.epsilon * std::cos(config.omega * t + config.varphi) * sx;
    }
    return h;
  };

  std::vector<LindbladTerm> terms;
  if (config.rates.gamma_g() > 0.0) {
    terms.push_back({pauli(Pauli::Plus), 0.5 * config.rates.gamma_g()});
  }
  if (config.rates.gamma_d() > 0.0) {
    terms.push_back({pauli(Pauli::Minus), 0.5 * config.rates.gamma_d()});
  }
  if (config.rates.gamma_z() > 0.0) {
    terms.push_back({sz, 0.5 * config.rates.gamma_z()});
  }
  const OpenSystemModel model(2, hamiltonian, std::move(terms));

  // The carrier must be resolved far below the sampling criterion: RK4
  // phase error accrues as (w dt)^4 per cycle, and megahertz carriers over
  // millisecond horizons need ~0.03 rad per step to keep the accumulated
  // phase error below a milliradian.
  const double w_max = std::max(config.omega_q + config.epsilon,
                                config.omega);
  const double dt_needed = 0.03 / w_max;
  const int k = std::max(1, static_cast<int>(
                                std::ceil(config.sample_dt / dt_needed)));
  const double dt = config.sample_dt / k;

  IntegrateOptions options;
  options.prefer_bloch_path = true;
  options.store_states = false;
  options.sample_stride = k;

  const DensityMatrix rho0 = rho_from_bloch({1.0, 0.0, 0.0});
  const Trajectory traj =
      integrate(model, rho0, {0.0, config.duration}, dt, options);

  LabSeries series;
  series.t = traj.times;
  series.mx.reserve(traj.bloch.size());
  series.my.reserve(traj.bloch.size());
  series.mz.reserve(traj.bloch.size());
  for (const auto& m : traj.bloch) {
    series.mx.push_back(m.x);
    series.my.push_back(m.y);
    series.mz.push_back(m.z);
  }
  return series;
}

std::pair<std::size_t, std::size_t> window_indices(const LabSeries& series,
                                                   double t0, double t1) {
  if (!(t0 < t1)) {
    throw ConfigError("window_indices: need t0 < t1");
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(t1));
  const auto begin = std::lower_bound(series.t.begin(), series.t.end(),
                                      t0 - slack);
  const auto end = std::upper_bound(begin, series.t.end(), t1 + slack);
  return {static_cast<std::size_t>(begin - series.t.begin()),
          static_cast<std::size_t>(end - series.t.begin())};
}

Spectrum power_spectrum(const std::vector<double>& values, double dt) {
  const std::size_t n = values.size();
  if (n < 8) {
    throw ConfigError("power_spectrum: need at least 8 samples");
  }
  if (!(dt > 0.0)) {
    throw ConfigError("power_spectrum: dt must be positive");
  }

  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  std::copy(values.begin(), values.end(), in);
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(plan);
  }

  Spectrum spectrum;
  const std::size_t bins = n / 2 + 1;
  spectrum.freq_hz.resize(bins);
  spectrum.magnitude.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    spectrum.freq_hz[k] = static_cast<double>(k) / (static_cast<double>(n) * dt);
    spectrum.magnitude[k] =
        std::hypot(out[k][0], out[k][1]) / static_cast<double>(n);
  }
  fftw_free(in);
  fftw_free(out);

  std::size_t peak = 1;
  for (std::size_t k = 2; k < bins; ++k) {
    if (spectrum.magnitude[k] > spectrum.magnitude[peak]) peak = k;
  }
  if (!(spectrum.magnitude[peak] > 0.0)) {
    throw NoCarrierError("power_spectrum: no nonzero component");
  }

  double refined_bin = static_cast<double>(peak);
  double refined_mag = spectrum.magnitude[peak];
  if (peak > 1 && peak + 1 < bins && spectrum.magnitude[peak - 1] > 0.0 &&
      spectrum.magnitude[peak + 1] > 0.0) {
    const double lm = std::log(spectrum.magnitude[peak - 1]);
    const double l0 = std::log(spectrum.magnitude[peak]);
    const double lp = std::log(spectrum.magnitude[peak + 1]);
    const double denom = lm - 2.0 * l0 + lp;
    if (denom < 0.0) {
      const double shift = 0.5 * (lm - lp) / denom;
      refined_bin += shift;
      refined_mag = std::exp(l0 - 0.25 * (lm - lp) * shift);
    }
  }
  spectrum.peak_freq_hz = refined_bin / (static_cast<double>(n) * dt);
  spectrum.peak_magnitude = refined_mag;
  return spectrum;
}

PhasorEstimate extract_phasor(const std::vector<double>& times,
                              const std::vector<double>& values,
                              std::size_t begin, std::size_t end,
                              double omega) {
  if (times.size() != values.size()) {
    throw ConfigError("extract_phasor: time and value lengths differ");
  }
  if (end > times.size() || begin >= end) {
    throw ConfigError("extract_phasor: bad window");
  }
  if (end - begin < 8) {
    throw ConfigError("extract_phasor: window shorter than 8 samples");
  }
  std::complex<double> z = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    z += values[i] * std::polar(1.0, -omega * times[i]);
  }
  const double n = static_cast<double>(end - begin);
  PhasorEstimate estimate;
  estimate.amplitude = 2.0 * std::abs(z) / n;
  if (estimate.amplitude < 1e-6) {
    char msg[120];
    std::snprintf(msg, sizeof msg,
                  "extract_phasor: no carrier near %.6g Hz in the window",
                  to_hz(omega));
    throw NoCarrierError(msg);
  }
  estimate.phase = wrap_angle(std::arg(z));
  return estimate;
}

}  // namespace spinlock
