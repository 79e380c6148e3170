#pragma once

#include <array>
#include <string>
#include <vector>

#include "spinlock/lindblad.hpp"
#include "spinlock/quantum.hpp"
#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

// One perturbative drive entering the target -> auxiliary block. v holds the
// raising amplitudes (aux_dim x target_dim); frequency is the residual
// oscillation of this coupling in the working frame (zero when the frame
// already co-rotates with the drive). source_level / source_energy identify
// the target level the drive lifts from.
struct PerturbativeCoupling {
  std::string field;
  double frequency = 0.0;
  int source_level = 0;
  double source_energy = 0.0;
  ComplexMatrix v;
};

// Open system split into a kept target subspace and an auxiliary subspace to
// be adiabatically eliminated. Level ordering in the full space is target
// levels first, then auxiliary. Jump operators live on the full space and
// must annihilate the target block (they drain the auxiliary levels).
class PartitionedModel {
 public:
  PartitionedModel(ComplexMatrix h_target, ComplexMatrix h_aux,
                   std::vector<PerturbativeCoupling> couplings,
                   std::vector<LindbladTerm> jumps);

  int target_dim() const { return target_dim_; }
  int aux_dim() const { return aux_dim_; }
  int dim() const { return target_dim_ + aux_dim_; }

  const ComplexMatrix& h_target() const { return h_target_; }
  const ComplexMatrix& h_aux() const { return h_aux_; }
  const std::vector<PerturbativeCoupling>& couplings() const {
    return couplings_;
  }
  const std::vector<LindbladTerm>& jumps() const { return jumps_; }

  // Lowering coupling acting target <- auxiliary. Defaults to the sum of
  // the raising adjoints; overriding detaches the cross-field diagnostics.
  const ComplexMatrix& v_t() const { return v_t_; }
  void set_v_t(ComplexMatrix v);
  bool v_t_is_default() const { return v_t_is_default_; }

 private:
  int target_dim_;
  int aux_dim_;
  ComplexMatrix h_target_;
  ComplexMatrix h_aux_;
  std::vector<PerturbativeCoupling> couplings_;
  std::vector<LindbladTerm> jumps_;
  ComplexMatrix v_t_;
  bool v_t_is_default_ = true;
};

// H_a - (i/2) sum_k rate_k L_k^dag L_k restricted to the auxiliary block.
ComplexMatrix nonhermitian_h(const PartitionedModel& model);

// (H_NH - E_n - omega_l)^{-1} on the auxiliary block for one coupling.
// Throws ResonanceError naming the coupling when the shifted operator has
// condition number >= 1e12.
ComplexMatrix resolvent(const PartitionedModel& model,
                        const PerturbativeCoupling& coupling);

// H_t - (1/2)[V_t sum_{l,n} R^{(l,n)} V_a^{(l,n)} + h.c.] evaluated on the
// target block. Cross-field products are part of the formula; their
// magnitude is logged when they fail to cancel, since a static treatment of
// beat-frequency terms is only trustworthy when they do.
ComplexMatrix effective_hamiltonian(const PartitionedModel& model);

// One reduced jump operator per (physical jump x drive field), the field's
// resolvent-propagated amplitudes folded into the operator (rate fields are
// 1). Operators are truncated to the target block; any amplitude landing
// outside it is logged as lost weight. Identically vanishing combinations
// are dropped.
std::vector<LindbladTerm> effective_lindblads(const PartitionedModel& model);

// Level order for the eight-level scheme.
enum YbLevel : int {
  kYb0 = 0,      // S ground F=0 clock state
  kYb1 = 1,      // S F=1 mF=0
  kYbSMinus = 2,  // S F=1 mF=-1
  kYbSPlus = 3,   // S F=1 mF=+1
  kYbP00 = 4,     // P F=0
  kYbP10 = 5,     // P F=1 mF=0
  kYbPMinus = 6,  // P F=1 mF=-1
  kYbPPlus = 7,   // P F=1 mF=+1
};

// Eight-level description: bare level energies, the four laser strengths
// and frequencies, the P-state decay rate and the symmetric Zeeman detuning
// of the P F=1 stretch levels. Energies only ever enter through
// differences, so a desk-scale optical reference is used instead of the
// true optical frequency to keep subtractions well conditioned.
struct YbLevelScheme {
  std::array<double, 8> energy{};
  double rabi_g = 0.0;
  double rabi_d = 0.0;
  double rabi_r0 = 0.0;
  double rabi_r1 = 0.0;
  double laser_g = 0.0;
  double laser_d = 0.0;
  double laser_r0 = 0.0;
  double laser_r1 = 0.0;
  double gamma = from_mhz(19.6);
  double delta_p = from_mhz(4.4);

  // Hard consistency checks (positive rates, delta_p matching the stored
  // stretch-level splitting). Throws ConfigError.
  void validate() const;
};

// Soft regime diagnostics: the perturbative drives should sit well below
// the strong repumper, which in turn should be comparable to gamma.
std::vector<std::string> regime_warnings(const YbLevelScheme& scheme);

// Optional frame offsets for a hand-built scheme: two-photon mismatch of
// the gain/damping pair and the two repumper detunings.
struct YbDetunings {
  double two_photon = 0.0;
  double repump0 = 0.0;
  double repump1 = 0.0;
};

// Fabricates a self-consistent scheme: energies from the desk-scale
// reference plus the given Zeeman half-splittings, lasers tuned to the
// Zeeman midpoints up to the requested offsets.
YbLevelScheme make_yb_scheme(double gamma, double delta_p, double delta_s,
                             double rabi_g, double rabi_d, double rabi_r0,
                             double rabi_r1, const YbDetunings& detunings = {});

// Scheme whose effective gain/damping rates equal the targets:
// rabi_g = sqrt(3 g_g (4 dp^2 + g^2) / (8 g)), rabi_d with 4 in place of 8.
// The effective dephasing rate is then fixed by the scheme, not free. The
// gain-damping beat is offset from the qubit splitting by `two_photon`;
// exact two-photon resonance would open a coherent Raman channel between
// the qubit states through the shared P levels, so the beat is parked far
// above the effective rates but well below delta_p and gamma (shifting the
// one-photon rates only at second order).
YbLevelScheme yb_calibrated_scheme(double gamma_g, double gamma_d,
                                   double gamma = from_mhz(19.6),
                                   double delta_p = from_mhz(4.4),
                                   double two_photon = from_khz(300.0));

// Same effective rates with all perturbative strengths scaled by
// `multiplier`, achieved by retuning delta_p. Throws ConfigError when the
// multiplier is too small for any detuning to compensate.
YbLevelScheme yb_scaled_scheme(const YbLevelScheme& scheme, double multiplier);

// Full eight-level model in the frame co-rotating with every laser, where
// the Hamiltonian is time independent; twelve decay terms at rate gamma/3.
// Off-resonant couplings of each beam to the other's transition are
// dropped; their size relative to the beat frequency is logged.
OpenSystemModel yb_full_model(const YbLevelScheme& scheme);

// Qubit-target partition of the same frame. With repump = true the decays
// into S F=1 mF=+-1 are rerouted to |1> and merged (sqrt(gamma/3) ->
// sqrt(2 gamma/3) for the stretch P levels), modelling instantaneous
// repumping; with repump = false the raw twelve-channel list is kept.
PartitionedModel yb_partitioned_model(const YbLevelScheme& scheme,
                                      bool repump = true);

// Reduction of the scheme to qubit rates. target_terms are the raw reduced
// operators; rates classifies them into gain / damping / dephasing in the
// convention of build_rotating_model. mixed_weight reports any operator
// weight that fits none of the three shapes (zero for this level scheme).
struct YbReduction {
  RateSet rates{0.0, 0.0, 0.0};
  std::vector<LindbladTerm> target_terms;
  double mixed_weight = 0.0;
};

YbReduction yb_reduce(const YbLevelScheme& scheme, bool repump = true);

// The closed-form effective rates for this scheme.
RateSet yb_closed_form_rates(const YbLevelScheme& scheme);

// Side-by-side integration of the full eight-level model and the reduced
// two-level model from the same qubit-subspace initial state.
struct ReductionReport {
  RateSet effective_rates{0.0, 0.0, 0.0};
  double max_bloch_deviation = 0.0;
  double max_mz_deviation = 0.0;
  double min_target_population = 1.0;
  std::vector<double> times;
  std::vector<double> deviation;  // |m_full - m_eff| per sample
  std::vector<std::string> warnings;
};

ReductionReport validate_reduction(const YbLevelScheme& scheme,
                                   double horizon);

}  // namespace spinlock
