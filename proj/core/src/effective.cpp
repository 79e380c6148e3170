#include "spinlock/effective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <utility>

#include "spinlock/errors.hpp"
#include "spinlock/logging.hpp"

namespace spinlock {

namespace {

constexpr Complex kI{0.0, 1.0};

// Desk-scale stand-ins for the optical ladder; only energy differences
// enter the dynamics, and GHz-scale references keep those differences well
// conditioned in double precision.
const double kHyperfineS = from_mhz(12642.8);
const double kHyperfineP = from_mhz(2105.0);
const double kOpticalRef = from_mhz(5500.0);

double matrix_scale(const ComplexMatrix& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      s = std::max(s, std::abs(m(i, j)));
    }
  }
  return s;
}

}  // namespace

PartitionedModel::PartitionedModel(ComplexMatrix h_target, ComplexMatrix h_aux,
                                   std::vector<PerturbativeCoupling> couplings,
                                   std::vector<LindbladTerm> jumps)
    : h_target_(std::move(h_target)),
      h_aux_(std::move(h_aux)),
      couplings_(std::move(couplings)),
      jumps_(std::move(jumps)) {
  require_square(h_target_, "PartitionedModel target Hamiltonian");
  require_square(h_aux_, "PartitionedModel auxiliary Hamiltonian");
  target_dim_ = static_cast<int>(h_target_.rows());
  aux_dim_ = static_cast<int>(h_aux_.rows());
  if (target_dim_ < 1 || aux_dim_ < 1) {
    throw ConfigError("PartitionedModel: both subspaces must be nonempty");
  }
  if (!is_hermitian(h_target_, 1e-12) || !is_hermitian(h_aux_, 1e-12)) {
    throw ConfigError("PartitionedModel: subspace Hamiltonians must be "
                      "Hermitian");
  }
  for (const auto& c : couplings_) {
    if (c.v.rows() != aux_dim_ || c.v.cols() != target_dim_) {
      throw DimensionError("PartitionedModel: coupling '" + c.field +
                           "' must map target to auxiliary");
    }
    if (c.source_level < 0 || c.source_level >= target_dim_) {
      throw ConfigError("PartitionedModel: coupling '" + c.field +
                        "' has an out-of-range source level");
    }
  }
  const int n = dim();
  for (const auto& jump : jumps_) {
    require_dim(jump.op, n, "PartitionedModel jump");
    if (jump.rate < 0.0) {
      throw ConfigError("PartitionedModel: negative jump rate");
    }
    const double scale = std::max(matrix_scale(jump.op), 1e-300);
    for (int col = 0; col < target_dim_; ++col) {
      for (int row = 0; row < n; ++row) {
        if (std::abs(jump.op(row, col)) > 1e-12 * scale) {
          throw ConfigError(
              "PartitionedModel: jump operator has support on the target "
              "block");
        }
      }
    }
  }
  v_t_ = ComplexMatrix::Zero(target_dim_, aux_dim_);
  for (const auto& c : couplings_) v_t_ += c.v.adjoint();
}

void PartitionedModel::set_v_t(ComplexMatrix v) {
  if (v.rows() != target_dim_ || v.cols() != aux_dim_) {
    throw DimensionError("PartitionedModel: V_t must map auxiliary to target");
  }
  v_t_ = std::move(v);
  v_t_is_default_ = false;
}

ComplexMatrix nonhermitian_h(const PartitionedModel& model) {
  const int t = model.target_dim();
  const int a = model.aux_dim();
  ComplexMatrix h = model.h_aux();
  for (const auto& jump : model.jumps()) {
    const ComplexMatrix sq = jump.op.adjoint() * jump.op;
    h -= 0.5 * kI * jump.rate * sq.block(t, t, a, a);
  }
  return h;
}

ComplexMatrix resolvent(const PartitionedModel& model,
                        const PerturbativeCoupling& coupling) {
  const int a = model.aux_dim();
  const ComplexMatrix shifted =
      nonhermitian_h(model) -
      (coupling.source_energy + coupling.frequency) *
          ComplexMatrix::Identity(a, a);
  const Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
  const auto& sv = svd.singularValues();
  if (!(sv(a - 1) > 1e-12 * sv(0)) || !(sv(0) > 0.0)) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "resolvent singular for field '%s', source level %d",
                  coupling.field.c_str(), coupling.source_level);
    throw ResonanceError(msg);
  }
  return shifted.partialPivLu().inverse();
}

namespace {

// Resolvent-propagated amplitude R^{(l,n)} V_a^{(l,n)} per coupling, plus
// the field grouping in first-appearance order.
struct PropagatedCouplings {
  std::vector<ComplexMatrix> w;          // aux_dim x target_dim per coupling
  std::vector<std::string> field_order;  // unique labels
};

PropagatedCouplings propagate(const PartitionedModel& model) {
  PropagatedCouplings out;
  for (const auto& c : model.couplings()) {
    out.w.push_back(resolvent(model, c) * c.v);
    if (std::find(out.field_order.begin(), out.field_order.end(), c.field) ==
        out.field_order.end()) {
      out.field_order.push_back(c.field);
    }
  }
  return out;
}

}  // namespace

ComplexMatrix effective_hamiltonian(const PartitionedModel& model) {
  const int t = model.target_dim();
  const auto prop = propagate(model);

  ComplexMatrix total = ComplexMatrix::Zero(t, t);
  ComplexMatrix same_field = ComplexMatrix::Zero(t, t);
  for (std::size_t i = 0; i < prop.w.size(); ++i) {
    total += model.v_t() * prop.w[i];
    if (model.v_t_is_default()) {
      ComplexMatrix v_t_field = ComplexMatrix::Zero(t, model.aux_dim());
      for (const auto& c : model.couplings()) {
        if (c.field == model.couplings()[i].field) v_t_field += c.v.adjoint();
      }
      same_field += v_t_field * prop.w[i];
    }
  }

  const ComplexMatrix correction = -0.5 * (total + total.adjoint());
  if (model.v_t_is_default()) {
    const ComplexMatrix cross = total - same_field;
    const double cross_mag =
        matrix_scale(-0.5 * (cross + ComplexMatrix(cross.adjoint())));
    const double scale =
        std::max({matrix_scale(correction), matrix_scale(model.h_target()),
                  matrix_scale(total)});
    // Asymmetric detunings leave a small genuine residue, so only flag
    // cross-field terms once they are a visible fraction of the correction.
    if (cross_mag > 1e-2 * std::max(scale, 1e-300)) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "effective Hamiltonian keeps uncancelled cross-field "
                    "terms of magnitude %.3g rad/s",
                    cross_mag);
      warn(msg);
    }
  }
  return model.h_target() + correction;
}

std::vector<LindbladTerm> effective_lindblads(const PartitionedModel& model) {
  const int t = model.target_dim();
  const int n = model.dim();
  const auto prop = propagate(model);

  std::vector<LindbladTerm> reduced;
  for (const auto& jump : model.jumps()) {
    for (const auto& field : prop.field_order) {
      ComplexMatrix w_full = ComplexMatrix::Zero(n, t);
      for (std::size_t i = 0; i < prop.w.size(); ++i) {
        if (model.couplings()[i].field == field) {
          w_full.block(t, 0, model.aux_dim(), t) += prop.w[i];
        }
      }
      const ComplexMatrix op_full = jump.op * w_full;  // n x t
      const double total_norm = op_full.norm();
      const double reference =
          std::max(jump.op.norm() * w_full.norm(), 1e-300);
      if (total_norm <= 1e-14 * reference) continue;

      const double outside = op_full.bottomRows(n - t).norm();
      if (outside > 1e-12 * total_norm) {
        char msg[200];
        std::snprintf(msg, sizeof msg,
                      "effective jump for field '%s' leaves the target "
                      "subspace (weight fraction %.3g); truncating",
                      field.c_str(), outside / total_norm);
        warn(msg);
      }
      reduced.push_back({op_full.topRows(t), jump.rate});
    }
  }
  return reduced;
}

void YbLevelScheme::validate() const {
  if (!(gamma > 0.0)) {
    throw ConfigError("YbLevelScheme: gamma must be positive");
  }
  if (delta_p < 0.0) {
    throw ConfigError("YbLevelScheme: delta_p must be nonnegative");
  }
  for (double r : {rabi_g, rabi_d, rabi_r0, rabi_r1}) {
    if (r < 0.0) throw ConfigError("YbLevelScheme: negative laser strength");
  }
  const double stored = 0.5 * (energy[kYbPPlus] - energy[kYbPMinus]);
  if (std::abs(stored - delta_p) > 1e-6 * std::max(delta_p, gamma)) {
    throw ConfigError(
        "YbLevelScheme: delta_p disagrees with the stored P-level splitting");
  }
}

std::vector<std::string> regime_warnings(const YbLevelScheme& scheme) {
  std::vector<std::string> out;
  char msg[160];
  if (scheme.rabi_r0 <= 0.0) {
    out.emplace_back("eight-level scheme: repumper is off; S F=1 mF=+-1 "
                     "population will accumulate");
    return out;
  }
  const struct {
    const char* name;
    double value;
  } weak[] = {{"rabi_g", scheme.rabi_g},
              {"rabi_d", scheme.rabi_d},
              {"rabi_r1", scheme.rabi_r1}};
  for (const auto& w : weak) {
    if (w.value > 0.2 * scheme.rabi_r0) {
      std::snprintf(msg, sizeof msg,
                    "eight-level scheme: %s/rabi_r0 = %.3g exceeds 0.2; "
                    "perturbative reduction degrades",
                    w.name, w.value / scheme.rabi_r0);
      out.emplace_back(msg);
    }
  }
  const double ratio = scheme.rabi_r0 / scheme.gamma;
  if (ratio < 0.2 || ratio > 5.0) {
    std::snprintf(msg, sizeof msg,
                  "eight-level scheme: rabi_r0/gamma = %.3g is far from 1; "
                  "repumping is not in the fast regime",
                  ratio);
    out.emplace_back(msg);
  }
  return out;
}

YbLevelScheme make_yb_scheme(double gamma, double delta_p, double delta_s,
                             double rabi_g, double rabi_d, double rabi_r0,
                             double rabi_r1, const YbDetunings& detunings) {
  YbLevelScheme s;
  s.energy[kYb0] = 0.0;
  s.energy[kYb1] = kHyperfineS;
  s.energy[kYbSMinus] = kHyperfineS - delta_s;
  s.energy[kYbSPlus] = kHyperfineS + delta_s;
  s.energy[kYbP10] = kOpticalRef;
  s.energy[kYbP00] = kOpticalRef + kHyperfineP;
  s.energy[kYbPMinus] = kOpticalRef - delta_p;
  s.energy[kYbPPlus] = kOpticalRef + delta_p;
  s.rabi_g = rabi_g;
  s.rabi_d = rabi_d;
  s.rabi_r0 = rabi_r0;
  s.rabi_r1 = rabi_r1;
  // Gain tuned to the P F=1 Zeeman midpoint; the damping frequency then
  // fixes the two-photon offset, and the repumpers are referenced to the
  // S F=1 Zeeman midpoint.
  s.laser_g = kOpticalRef - s.energy[kYb0];
  s.laser_d = s.laser_g - (s.energy[kYb1] - s.energy[kYb0]) +
              detunings.two_photon;
  s.laser_r0 = s.energy[kYbP00] - kHyperfineS - detunings.repump0;
  s.laser_r1 = s.energy[kYbP10] - kHyperfineS - detunings.repump1;
  s.gamma = gamma;
  s.delta_p = delta_p;
  s.validate();
  return s;
}

YbLevelScheme yb_calibrated_scheme(double gamma_g, double gamma_d,
                                   double gamma, double delta_p,
                                   double two_photon) {
  if (gamma_g < 0.0 || gamma_d < 0.0 || !(gamma > 0.0)) {
    throw ConfigError("yb_calibrated_scheme: invalid rates");
  }
  const double u = 4.0 * delta_p * delta_p + gamma * gamma;
  const double rabi_g = std::sqrt(3.0 * gamma_g * u / (8.0 * gamma));
  const double rabi_d = std::sqrt(3.0 * gamma_d * u / (4.0 * gamma));
  YbDetunings detunings;
  detunings.two_photon = two_photon;
  return make_yb_scheme(gamma, delta_p, delta_p, rabi_g, rabi_d,
                        from_mhz(10.0), from_mhz(0.5), detunings);
}

namespace {

// Rotating-frame diagonal: the frame absorbs each laser frequency so all
// couplings are static. The repump island's overall offset is a gauge
// choice (only dissipators connect it to the qubit island); the S F=1
// Zeeman midpoint is used.
std::array<double, 8> yb_rotating_diag(const YbLevelScheme& s) {
  std::array<double, 8> f{};
  f[kYb0] = s.energy[kYb0];
  f[kYb1] = s.energy[kYb0] + s.laser_g - s.laser_d;
  f[kYbSMinus] = 0.5 * (s.energy[kYbSMinus] + s.energy[kYbSPlus]);
  f[kYbSPlus] = f[kYbSMinus];
  f[kYbP00] = f[kYbSMinus] + s.laser_r0;
  f[kYbP10] = f[kYbSMinus] + s.laser_r1;
  f[kYbPMinus] = s.energy[kYb0] + s.laser_g;
  f[kYbPPlus] = f[kYbPMinus];
  std::array<double, 8> d{};
  for (int i = 0; i < 8; ++i) d[i] = s.energy[i] - f[i];
  return d;
}

struct YbJump {
  int dest;
  int src;
};

// Twelve spontaneous decay channels, three per P level.
constexpr YbJump kYbJumps[12] = {
    {kYbSMinus, kYbP00}, {kYb1, kYbP00},      {kYbSPlus, kYbP00},
    {kYb0, kYbP10},      {kYbSMinus, kYbP10}, {kYbSPlus, kYbP10},
    {kYb0, kYbPMinus},   {kYb1, kYbPMinus},   {kYbSMinus, kYbPMinus},
    {kYb0, kYbPPlus},    {kYb1, kYbPPlus},    {kYbSPlus, kYbPPlus},
};

ComplexMatrix transfer_op(int dim, int dest, int src) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(dest, src) = 1.0;
  return m;
}

void log_dropped_cross_couplings(const YbLevelScheme& s) {
  char msg[200];
  const double qubit_beat = std::abs(s.laser_g - s.laser_d);
  const double repump_beat = std::abs(s.laser_r0 - s.laser_r1);
  const double qubit_ratio =
      qubit_beat > 0.0 ? std::max(s.rabi_g, s.rabi_d) / qubit_beat
                       : std::numeric_limits<double>::infinity();
  const double repump_ratio =
      repump_beat > 0.0 ? std::max(s.rabi_r0, s.rabi_r1) / repump_beat
                        : std::numeric_limits<double>::infinity();
  // Rabi rates far below the beat frequencies make the dropped couplings
  // rotate themselves away; only warn when that separation gets thin.
  if (qubit_ratio < 0.02 && repump_ratio < 0.02) return;
  std::snprintf(msg, sizeof msg,
                "eight-level frame drops beat-frequency couplings: "
                "gain-damping ratio %.3g, repump ratio %.3g",
                qubit_ratio, repump_ratio);
  warn(msg);
}

}  // namespace

OpenSystemModel yb_full_model(const YbLevelScheme& scheme) {
  scheme.validate();
  const auto d = yb_rotating_diag(scheme);
  ComplexMatrix h = ComplexMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) h(i, i) = d[i];

  const auto couple = [&h](int upper, int lower, double rabi) {
    h(upper, lower) += 0.5 * rabi;
    h(lower, upper) += 0.5 * rabi;
  };
  couple(kYbPMinus, kYb0, scheme.rabi_g);
  couple(kYbPPlus, kYb0, scheme.rabi_g);
  couple(kYbPMinus, kYb1, scheme.rabi_d);
  couple(kYbPPlus, kYb1, scheme.rabi_d);
  couple(kYbP00, kYbSMinus, scheme.rabi_r0);
  couple(kYbP00, kYbSPlus, scheme.rabi_r0);
  couple(kYbP10, kYbSMinus, scheme.rabi_r1);
  couple(kYbP10, kYbSPlus, scheme.rabi_r1);

  std::vector<LindbladTerm> terms;
  terms.reserve(12);
  for (const auto& jump : kYbJumps) {
    terms.push_back({transfer_op(8, jump.dest, jump.src), scheme.gamma / 3.0});
  }
  log_dropped_cross_couplings(scheme);
  return OpenSystemModel(h, std::move(terms));
}

PartitionedModel yb_partitioned_model(const YbLevelScheme& scheme,
                                      bool repump) {
  scheme.validate();
  const auto d = yb_rotating_diag(scheme);

  ComplexMatrix h_t = ComplexMatrix::Zero(2, 2);
  h_t(0, 0) = d[kYb0];
  h_t(1, 1) = d[kYb1];

  // Auxiliary block order: S-, S+, P00, P10, P-, P+ (levels 2..7 shifted).
  const auto aux = [](int level) { return level - 2; };
  ComplexMatrix h_a = ComplexMatrix::Zero(6, 6);
  for (int level = 2; level < 8; ++level) {
    h_a(aux(level), aux(level)) = d[level];
  }
  const auto couple = [&](int upper, int lower, double rabi) {
    h_a(aux(upper), aux(lower)) += 0.5 * rabi;
    h_a(aux(lower), aux(upper)) += 0.5 * rabi;
  };
  couple(kYbP00, kYbSMinus, scheme.rabi_r0);
  couple(kYbP00, kYbSPlus, scheme.rabi_r0);
  couple(kYbP10, kYbSMinus, scheme.rabi_r1);
  couple(kYbP10, kYbSPlus, scheme.rabi_r1);

  std::vector<PerturbativeCoupling> couplings(2);
  couplings[0].field = "gain";
  couplings[0].source_level = kYb0;
  couplings[0].source_energy = d[kYb0];
  couplings[0].v = ComplexMatrix::Zero(6, 2);
  couplings[0].v(aux(kYbPMinus), kYb0) = 0.5 * scheme.rabi_g;
  couplings[0].v(aux(kYbPPlus), kYb0) = 0.5 * scheme.rabi_g;
  couplings[1].field = "damping";
  couplings[1].source_level = kYb1;
  couplings[1].source_energy = d[kYb1];
  couplings[1].v = ComplexMatrix::Zero(6, 2);
  couplings[1].v(aux(kYbPMinus), kYb1) = 0.5 * scheme.rabi_d;
  couplings[1].v(aux(kYbPPlus), kYb1) = 0.5 * scheme.rabi_d;

  std::vector<LindbladTerm> jumps;
  if (repump) {
    // Instantaneous repumping: decays into S F=1 mF=+-1 rerouted to |1>,
    // identical channels merged by summing rates.
    std::map<std::pair<int, int>, double> merged;
    for (const auto& jump : kYbJumps) {
      const int dest =
          (jump.dest == kYbSMinus || jump.dest == kYbSPlus) ? kYb1 : jump.dest;
      merged[{dest, jump.src}] += scheme.gamma / 3.0;
    }
    for (const auto& [key, rate] : merged) {
      jumps.push_back({transfer_op(8, key.first, key.second), rate});
    }
  } else {
    for (const auto& jump : kYbJumps) {
      jumps.push_back(
          {transfer_op(8, jump.dest, jump.src), scheme.gamma / 3.0});
    }
  }
  return PartitionedModel(h_t, h_a, std::move(couplings), std::move(jumps));
}

YbReduction yb_reduce(const YbLevelScheme& scheme, bool repump) {
  YbReduction out;
  out.target_terms = effective_lindblads(yb_partitioned_model(scheme, repump));

  double gain = 0.0;
  double damping = 0.0;
  double dephasing = 0.0;
  for (const auto& term : out.target_terms) {
    const double raise = std::norm(term.op(1, 0));
    const double lower = std::norm(term.op(0, 1));
    const Complex diag_z = 0.5 * (term.op(1, 1) - term.op(0, 0));
    const double diag = std::norm(diag_z);
    const double classes[3] = {raise, lower, diag};
    const int dominant = static_cast<int>(
        std::max_element(classes, classes + 3) - classes);
    const double norm2 = raise + lower + std::norm(term.op(1, 1)) +
                         std::norm(term.op(0, 0));
    int active = 0;
    for (double c : classes) {
      if (c > 1e-24 * norm2) ++active;
    }
    if (active > 1) out.mixed_weight += term.rate * (norm2 - classes[dominant]);
    if (dominant == 0) gain += 2.0 * term.rate * raise;
    if (dominant == 1) damping += 2.0 * term.rate * lower;
    if (dominant == 2) dephasing += 2.0 * term.rate * diag;
  }
  if (out.mixed_weight > 0.0) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "yb_reduce: %.3g rad/s of effective jump weight fits no "
                  "single dissipator class",
                  out.mixed_weight);
    warn(msg);
  }
  out.rates = RateSet(gain, damping, dephasing);
  return out;
}

RateSet yb_closed_form_rates(const YbLevelScheme& scheme) {
  const double u =
      4.0 * scheme.delta_p * scheme.delta_p + scheme.gamma * scheme.gamma;
  const double g = scheme.gamma / 3.0;
  return RateSet(8.0 * g * scheme.rabi_g * scheme.rabi_g / u,
                 4.0 * g * scheme.rabi_d * scheme.rabi_d / u,
                 g * (2.0 * scheme.rabi_d * scheme.rabi_d +
                      scheme.rabi_g * scheme.rabi_g) /
                     u);
}

YbLevelScheme yb_scaled_scheme(const YbLevelScheme& scheme,
                               double multiplier) {
  if (!(multiplier > 0.0)) {
    throw ConfigError("yb_scaled_scheme: multiplier must be positive");
  }
  const double u =
      4.0 * scheme.delta_p * scheme.delta_p + scheme.gamma * scheme.gamma;
  const double scaled_u = multiplier * multiplier * u;
  const double dp_sq = 0.25 * (scaled_u - scheme.gamma * scheme.gamma);
  if (!(dp_sq > 0.0)) {
    throw ConfigError(
        "yb_scaled_scheme: multiplier too small; no detuning preserves the "
        "rates");
  }
  const double delta_p = std::sqrt(dp_sq);
  const double delta_s_old =
      0.5 * (scheme.energy[kYbSPlus] - scheme.energy[kYbSMinus]);
  const double delta_s = scheme.delta_p > 0.0
                             ? delta_s_old * delta_p / scheme.delta_p
                             : delta_s_old;
  const auto d = yb_rotating_diag(scheme);
  YbDetunings detunings;
  detunings.two_photon = d[kYb1];
  detunings.repump0 = d[kYbP00];
  detunings.repump1 = d[kYbP10];
  return make_yb_scheme(scheme.gamma, delta_p, delta_s,
                        multiplier * scheme.rabi_g,
                        multiplier * scheme.rabi_d, scheme.rabi_r0,
                        scheme.rabi_r1, detunings);
}

ReductionReport validate_reduction(const YbLevelScheme& scheme,
                                   double horizon) {
  if (!(horizon > 0.0)) {
    throw ConfigError("validate_reduction: horizon must be positive");
  }
  ReductionReport report;
  report.warnings = regime_warnings(scheme);
  for (const auto& w : report.warnings) warn(w);

  const YbReduction reduction = yb_reduce(scheme, true);
  report.effective_rates = reduction.rates;

  const OpenSystemModel full = yb_full_model(scheme);
  // Second-order Hamiltonian (frame detunings + Stark shifts + whatever
  // survives of the Raman term off exact two-photon resonance), so the
  // comparison isolates genuinely higher-order effects.
  const ComplexMatrix h_eff =
      effective_hamiltonian(yb_partitioned_model(scheme, true));
  const OpenSystemModel effective(h_eff, reduction.target_terms);

  const double dt = suggest_dt(full);
  const auto steps = static_cast<long long>(horizon / dt);
  IntegrateOptions options;
  options.sample_stride =
      static_cast<int>(std::max(1LL, steps / 2000));

  ComplexMatrix rho_full = ComplexMatrix::Zero(8, 8);
  rho_full(0, 0) = 0.5;
  rho_full(0, 1) = 0.5;
  rho_full(1, 0) = 0.5;
  rho_full(1, 1) = 0.5;
  const DensityMatrix initial_full = DensityMatrix::trusted(rho_full);
  const DensityMatrix initial_eff = rho_from_bloch({1.0, 0.0, 0.0});

  auto run_full = std::async(std::launch::async, [&] {
    return integrate(full, initial_full, {0.0, horizon}, dt, options);
  });
  const Trajectory traj_eff =
      integrate(effective, initial_eff, {0.0, horizon}, dt, options);
  const Trajectory traj_full = run_full.get();

  if (traj_full.size() != traj_eff.size()) {
    throw NumericError("validate_reduction: sample grids diverged");
  }
  report.times.reserve(traj_full.size());
  report.deviation.reserve(traj_full.size());
  for (std::size_t i = 0; i < traj_full.size(); ++i) {
    const ComplexMatrix rho = traj_full.state(i);
    const BlochVector m_full{2.0 * rho(0, 1).real(), 2.0 * rho(0, 1).imag(),
                             (rho(1, 1) - rho(0, 0)).real()};
    const BlochVector m_eff = traj_eff.bloch[i];
    const BlochVector diff = m_full - m_eff;
    const double dev = diff.norm();
    report.times.push_back(traj_full.times[i]);
    report.deviation.push_back(dev);
    report.max_bloch_deviation = std::max(report.max_bloch_deviation, dev);
    report.max_mz_deviation =
        std::max(report.max_mz_deviation, std::abs(diff.z));
    report.min_target_population =
        std::min(report.min_target_population,
                 (rho(0, 0) + rho(1, 1)).real());
  }
  return report;
}

}  // namespace spinlock
