#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spinlock/effective.hpp"
#include "spinlock/estimation.hpp"
#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

namespace spinlock {

enum class ExperimentKind {
  kRelax,
  kSync,
  kQGrid,
  kSProfile,
  kTongue,
  kBandwidth,
  kDeform,
  kForced,
  kEightLevel,
  kLabFrame,
  kRateFit,
  kTomography,
};

const char* to_string(ExperimentKind kind);
// Throws ConfigError for names outside the enum.
ExperimentKind experiment_kind_from(const std::string& name);

// Inclusive linear scan; count >= 2.
struct SweepRange {
  double min = 0.0;
  double max = 0.0;
  int count = 2;

  std::vector<double> values() const;
};

// Everything a run needs, fully resolved to internal units (rad/s, seconds,
// radians). Fields outside the selected experiment are ignored by the
// runner but still validated on parse.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kRelax;

  RateSet rates{from_khz(1.27), from_khz(7.33), from_khz(4.42)};
  DriveParams drive{from_khz(2.37), 0.0, std::numbers::pi / 2};

  // Start state as a Bloch vector; parse resolves the named forms
  // ("excited", "ground", "plus", "limit_cycle", "steady").
  BlochVector initial{0.0, 0.0, 1.0};

  double duration = 500e-6;  // relax / forced horizon
  double dt_hint = 0.0;      // 0 = automatic step choice
  double stage1 = 200e-6;    // sync timeline: undriven, then driven
  double stage2 = 200e-6;

  int n_theta = 121;  // phase-space grid resolution
  int n_phi = 241;
  int profile_points = 721;

  SweepRange delta_range;    // tongue / bandwidth detuning axis
  SweepRange epsilon_range;  // tongue / deform strength axis
  bool numeric_check = false;

  std::vector<double> forced_epsilons;

  // Eight-level validation. A calibrated scheme is built from the target
  // rates unless an explicit scheme is supplied.
  double el_gamma = from_mhz(19.6);
  double el_delta_p = from_mhz(4.4);
  double el_two_photon = from_khz(300.0);
  double el_horizon = 400e-6;
  bool el_ladder = true;
  std::optional<YbLevelScheme> scheme;

  // Lab-frame runs.
  double omega_q = from_mhz(10.0);
  double sample_dt = from_ns(2.0);
  double lab_duration = 2000e-6;
  double drive_start = 200e-6;
  std::vector<double> drive_offsets;  // drive frequency minus omega_q
  double window_t0 = 300e-6;
  double window_t1 = 2000e-6;
  double spectrum_band = 0.0;  // half-width around omega_q; 0 = 50 gamma_g
  int csv_stride = 100;        // series decimation for CSV export only

  MeasurementConfig measure;
  int fit_points = 30;
  std::string pulse_set = "resonant";
  double tomo_delta = from_khz(16.0);
  PulseTimings timings;

  std::uint64_t seed = 0;
  int workers = 0;  // 0 = SPINLOCK_WORKERS, else hardware
  std::filesystem::path out;  // output stem; empty = experiment name
};

// Per-kind defaults (ranges and state choices differ between experiments).
ExperimentConfig default_config(ExperimentKind kind);

// Strict parse: unknown keys are errors naming the full field path, every
// dimensioned number must carry a unit tag, syntax errors report line and
// column. `expected`, when set, must match the file's experiment kind.
ExperimentConfig parse_config_text(
    const std::string& text, const std::string& source_name,
    std::optional<ExperimentKind> expected = std::nullopt);
ExperimentConfig parse_config(
    const std::filesystem::path& path,
    std::optional<ExperimentKind> expected = std::nullopt);

// Resolved configuration serialized back to JSON (2-space indent), suitable
// for embedding in reports. Frequencies echo in 2pi_kHz, times in us.
std::string config_echo_json(const ExperimentConfig& config);

}  // namespace spinlock
