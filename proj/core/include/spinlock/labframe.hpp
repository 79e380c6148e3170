#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

// Un-transformed qubit + drive: H(t) = (omega_q/2) sigma_z
// + epsilon cos(omega t + varphi) sigma_x once the drive is on. The drive
// phase is referenced to global time zero, not to drive_start, so switching
// the drive on later does not shift its phase.
struct LabFrameConfig {
  double omega_q = from_mhz(10.0);
  double omega = from_mhz(10.0);
  double epsilon = 0.0;
  double varphi = 0.0;
  RateSet rates{0.0, 0.0, 0.0};
  double sample_dt = from_ns(2.0);
  double duration = 2000e-6;
  double drive_start = 200e-6;
};

// Bloch components sampled on a uniform grid (plus the exact final time).
struct LabSeries {
  std::vector<double> t;
  std::vector<double> mx;
  std::vector<double> my;
  std::vector<double> mz;

  std::size_t size() const { return t.size(); }
};

LabSeries simulate_lab(const LabFrameConfig& config);

// [begin, end) index range covering sample times in [t0, t1].
std::pair<std::size_t, std::size_t> window_indices(const LabSeries& series,
                                                   double t0, double t1);

// One-sided magnitude spectrum |X_k| / n of a uniformly sampled series,
// with the dominant non-DC bin refined by quadratic interpolation of the
// log magnitudes.
struct Spectrum {
  std::vector<double> freq_hz;
  std::vector<double> magnitude;
  double peak_freq_hz = 0.0;
  double peak_magnitude = 0.0;
};

Spectrum power_spectrum(const std::vector<double>& values, double dt);

// Single-bin projection at a known angular frequency: amplitude and phase
// of the cosine component over [begin, end). Throws NoCarrierError when the
// projected amplitude is below 1e-6.
struct PhasorEstimate {
  double amplitude = 0.0;
  double phase = 0.0;
};

PhasorEstimate extract_phasor(const std::vector<double>& times,
                              const std::vector<double>& values,
                              std::size_t begin, std::size_t end,
                              double omega);

}  // namespace spinlock
