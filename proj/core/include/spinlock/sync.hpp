#pragma once

#include "spinlock/lindblad.hpp"
#include "spinlock/quantum.hpp"

namespace spinlock {

// Gain / damping / dephasing rates of the dissipative qubit, angular
// (rad/s). The master equation is
//   d rho/dt = -i/2 [delta sigma_z + eps sigma_phi, rho]
//              + (g_g D[sigma_+] + g_d D[sigma_-] + g_z D[sigma_z]) rho / 2,
// i.e. every rate enters the dissipator with the prefactor gamma/2, and
// sigma_phi = sigma_x cos(varphi) + sigma_y sin(varphi).
class RateSet {
 public:
  RateSet(double gamma_g, double gamma_d, double gamma_z);

  double gamma_g() const { return gamma_g_; }
  double gamma_d() const { return gamma_d_; }
  double gamma_z() const { return gamma_z_; }

  // Total phase-relaxation scale gamma_g + gamma_d + 4 gamma_z.
  double gamma_t() const { return gamma_g_ + gamma_d_ + 4.0 * gamma_z_; }

 private:
  double gamma_g_;
  double gamma_d_;
  double gamma_z_;
};

// External drive in the rotating frame: amplitude epsilon >= 0, detuning
// delta (drive minus qubit frequency sign convention: H contains
// +delta/2 sigma_z), and drive phase varphi, normalized to (-pi, pi].
class DriveParams {
 public:
  explicit DriveParams(double epsilon, double delta = 0.0, double varphi = 0.0);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  double varphi() const { return varphi_; }

 private:
  double epsilon_;
  double delta_;
  double varphi_;
};

struct SyncAnalytics {
  BlochVector steady;
  double contrast = 0.0;     // peak-to-peak of the phase distribution S
  double phase_shift = 0.0;  // detuning-induced offset atan(4 delta / gamma_t)
  double sync_phase = 0.0;   // phase the qubit locks to, in (-pi, pi]
};

// Undriven steady state (0, 0, (g_g - g_d)/(g_g + g_d)). Throws
// UndefinedLimitCycleError when g_g + g_d = 0.
BlochVector limit_cycle(const RateSet& rates);

// Polar angle of the limit cycle, arccos(m_z).
double limit_cycle_theta0(const RateSet& rates);

// Closed-form stationary Bloch vector of the driven master equation.
BlochVector steady_bloch(const RateSet& rates, const DriveParams& drive);

// Peak-to-peak amplitude of the stationary phase distribution. Zero when
// gain and damping balance; no error.
double contrast(const RateSet& rates, const DriveParams& drive);

// Contrast, phase shift and locked phase of the synchronized state.
// Throws NoPhasePreferenceError when gamma_g == gamma_d (contrast is zero
// for every drive, so there is no preferred phase).
SyncAnalytics sync_analytics(const RateSet& rates, const DriveParams& drive);

// Drive amplitude maximizing the contrast at fixed detuning (golden-section
// search, relative tolerance 1e-6).
double critical_epsilon(const RateSet& rates, double delta);

// Full width of the synchronization response: 2 * delta_half where
// contrast(delta_half) = contrast(0) / 2 at fixed epsilon (bisection,
// relative tolerance 1e-6).
double bandwidth_3db(const RateSet& rates, double epsilon);

// Drive-induced population change m_z(epsilon) - m_z(0) at fixed detuning.
double deformation(const RateSet& rates, double epsilon, double delta = 0.0);

// The rotating-frame master equation as an integrable model:
// H = (delta sigma_z + epsilon sigma_phi) / 2 with dissipator rates
// gamma/2 as written above.
OpenSystemModel build_rotating_model(const RateSet& rates,
                                     const DriveParams& drive);

}  // namespace spinlock
