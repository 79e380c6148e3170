#pragma once

#include <cstdint>
#include <vector>

#include "spinlock/fitting.hpp"
#include "spinlock/quantum.hpp"
#include "spinlock/rng.hpp"
#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

// Readout simulation parameters. shots == 0 selects the noiseless
// infinite-shot mode: the exact flip-adjusted probability is returned with
// no sampling.
struct MeasurementConfig {
  std::uint64_t shots = 500;
  // Symmetric state-preparation-and-measurement flip probability applied to
  // the ideal population: p_eff = p (1 - e) + (1 - p) e.
  double spam_error = 7e-3;
  std::uint64_t seed = 0;
};

// Fraction of shots that read |1>, after the SPAM flip. Deterministic for a
// given rng state.
double measure_population(const DensityMatrix& rho,
                          const MeasurementConfig& config, Rng& rng);
// Convenience overload seeding a fresh generator from config.seed.
double measure_population(const DensityMatrix& rho,
                          const MeasurementConfig& config);

// A microwave analysis rotation: U = exp(-i generator * duration). The
// effective rotation is fixed by the strength-duration product.
struct AnalysisPulse {
  ComplexMatrix generator;
  double duration = 0.0;

  ComplexMatrix unitary() const;
};

// Pulse strength and pi-time. tau_pi is defined by the pi-pulse condition
// omega_mw * tau_pi = pi.
struct PulseTimings {
  double omega_mw = from_khz(32.0);

  double tau_pi() const;
};

// Resonant analysis set {exp(+i w t sy/4), exp(-i w t sx/4), identity}
// measuring (m_x+1)/2, (m_y+1)/2 and (m_z+1)/2.
std::vector<AnalysisPulse> resonant_pulse_set(const PulseTimings& timings = {});

// Non-orthogonal detuned set: quarter and half pulses generated by
// delta sigma_z + omega sigma_{x,y}, plus identity.
std::vector<AnalysisPulse> detuned_pulse_set(double delta,
                                             const PulseTimings& timings = {});

// Direction n such that <1| U rho U^dag |1> = (1 + m . n) / 2.
BlochVector measurement_axis(const AnalysisPulse& pulse);

// Direct inversion of the three resonant populations; the estimate is
// clipped to the unit ball. No SPAM unfolding is applied (mirrors the
// analysis pipeline; the flip biases each component by a factor 1 - 2e).
BlochVector tomography_resonant(const DensityMatrix& rho,
                                const MeasurementConfig& config, Rng& rng,
                                const PulseTimings& timings = {});
BlochVector tomography_resonant(const DensityMatrix& rho,
                                const MeasurementConfig& config,
                                const PulseTimings& timings = {});

// Binomial maximum-likelihood estimate over the detuned pulse set,
// maximized by projected gradient ascent on the closed unit ball with 10
// random restarts and tolerance 1e-9. Throws IllConditionedDesignError if
// the measurement axes do not span three dimensions.
BlochVector tomography_detuned(const DensityMatrix& rho, double delta,
                               const MeasurementConfig& config, Rng& rng,
                               const PulseTimings& timings = {});
BlochVector tomography_detuned(const DensityMatrix& rho, double delta,
                               const MeasurementConfig& config,
                               const PulseTimings& timings = {});

// The four-experiment rate calibration: pure gain from |0>, pure damping
// from |1>, both processes from |1> in the sigma_z basis, and both plus
// dephasing from |+> in the sigma_x basis. Each run simulates the master
// equation, samples populations at n_points times, and fits
// A exp(-gamma t / 2) + B. The dephasing rate follows by subtraction:
// gamma_z = (gamma_coh - (gamma_g + gamma_d) / 2) / 2.
struct DecaySamples {
  std::vector<double> t;
  std::vector<double> p;
};

struct RateFitReport {
  FitResult gain;
  FitResult damping;
  FitResult combined;
  FitResult coherence;
  // The simulated population data each fit consumed.
  DecaySamples gain_data;
  DecaySamples damping_data;
  DecaySamples combined_data;
  DecaySamples coherence_data;
  double gamma_g = 0.0;
  double gamma_d = 0.0;
  double gamma_sum = 0.0;  // from the combined fit
  double gamma_z = 0.0;
  double gamma_g_error = 0.0;
  double gamma_d_error = 0.0;
  double gamma_z_error = 0.0;
};

RateFitReport rate_fit_protocol(const RateSet& truth,
                                const MeasurementConfig& config,
                                int n_points = 30);

}  // namespace spinlock
