#include "spinlock/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spinlock/errors.hpp"
#include "spinlock/io.hpp"

namespace spinlock {
namespace {

using nlohmann::json;

const char* kKindNames[] = {
    "relax",      "sync",     "qgrid",  "sprofile", "tongue",  "bandwidth",
    "deform",     "forced",   "eightlevel", "labframe", "ratefit",
    "tomography",
};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config field '" + path + "': " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Every object is checked against the keys its section understands, so a
// typo fails loudly instead of silently falling back to a default.
void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw ConfigError("unknown config key '" +
                        (path.empty() ? item.key() : path + "." + item.key()) +
                        "'");
    }
  }
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

enum class Dimension { kFrequency, kTime, kAngle };

// A dimensioned entry is {"value": v, "unit": "..."} or the single-key
// shorthand {"2pi_kHz": 2.37}. Bare numbers are rejected: silent unit
// mistakes are the dominant config failure mode.
double parse_quantity(const json& j, const std::string& path, Dimension dim,
                      double gamma_g) {
  double value = 0.0;
  std::string unit;
  if (j.is_object() && j.contains("value") && j.contains("unit")) {
    check_keys(j, path, {"value", "unit"});
    value = number_at(j.at("value"), path + ".value");
    if (!j.at("unit").is_string()) fail(path + ".unit", "expected a string");
    unit = j.at("unit").get<std::string>();
  } else if (j.is_object() && j.size() == 1) {
    const auto& item = j.items().begin();
    unit = item.key();
    value = number_at(item.value(), path + "." + unit);
  } else if (j.is_number()) {
    fail(path, "dimensioned values need a unit, e.g. "
               "{\"value\": 2.37, \"unit\": \"2pi_kHz\"}");
  } else {
    fail(path, "expected {\"value\": ..., \"unit\": ...}");
  }

  const std::string u = lower(unit);
  switch (dim) {
    case Dimension::kFrequency:
      if (u == "rad_s") return value;
      if (u == "2pi_hz") return from_hz(value);
      if (u == "2pi_khz") return from_khz(value);
      if (u == "2pi_mhz") return from_mhz(value);
      if (u == "gamma_g") return value * gamma_g;
      fail(path, "unknown frequency unit '" + unit +
                     "' (rad_s, 2pi_Hz, 2pi_kHz, 2pi_MHz, gamma_g)");
    case Dimension::kTime:
      if (u == "s") return value;
      if (u == "ms") return 1e-3 * value;
      if (u == "us") return 1e-6 * value;
      if (u == "ns") return 1e-9 * value;
      fail(path, "unknown time unit '" + unit + "' (s, ms, us, ns)");
    case Dimension::kAngle:
      if (u == "rad") return value;
      if (u == "pi") return value * std::numbers::pi;
      fail(path, "unknown angle unit '" + unit + "' (rad, pi)");
  }
  fail(path, "unreachable");
}

int int_at(const json& j, const std::string& path, int min_value) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < min_value) {
    fail(path, "must be >= " + std::to_string(min_value));
  }
  return static_cast<int>(v);
}

SweepRange parse_range(const json& j, const std::string& path,
                       double gamma_g) {
  require_object(j, path);
  check_keys(j, path, {"min", "max", "count"});
  SweepRange r;
  if (j.contains("min")) {
    r.min = parse_quantity(j.at("min"), path + ".min", Dimension::kFrequency,
                           gamma_g);
  }
  if (j.contains("max")) {
    r.max = parse_quantity(j.at("max"), path + ".max", Dimension::kFrequency,
                           gamma_g);
  }
  if (j.contains("count")) r.count = int_at(j.at("count"), path + ".count", 2);
  if (!(r.min <= r.max)) fail(path, "needs min <= max");
  return r;
}

BlochVector parse_state(const json& j, const std::string& path,
                        const ExperimentConfig& cfg) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "excited") return {0.0, 0.0, 1.0};
    if (name == "ground") return {0.0, 0.0, -1.0};
    if (name == "plus") return {1.0, 0.0, 0.0};
    if (name == "limit_cycle") return limit_cycle(cfg.rates);
    if (name == "steady") return steady_bloch(cfg.rates, cfg.drive);
    fail(path, "unknown state '" + name +
                   "' (excited, ground, plus, limit_cycle, steady, or "
                   "[x, y, z])");
  }
  if (j.is_array() && j.size() == 3) {
    BlochVector m{number_at(j.at(0), path + "[0]"),
                  number_at(j.at(1), path + "[1]"),
                  number_at(j.at(2), path + "[2]")};
    if (m.norm() > 1.0 + 1e-12) fail(path, "Bloch vector outside unit ball");
    return m;
  }
  fail(path, "expected a state name or a 3-element array");
}

YbLevelScheme parse_scheme(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path,
             {"energy", "rabi_g", "rabi_d", "rabi_r0", "rabi_r1", "laser_g",
              "laser_d", "laser_r0", "laser_r1", "gamma", "delta_p"});
  YbLevelScheme s;
  const auto freq = [&](const char* key, double& dst) {
    if (j.contains(key)) {
      dst = parse_quantity(j.at(key), path + "." + key, Dimension::kFrequency,
                           0.0);
    }
  };
  if (j.contains("energy")) {
    const json& e = j.at("energy");
    if (!e.is_array() || e.size() != 8) {
      fail(path + ".energy", "expected 8 entries");
    }
    for (int i = 0; i < 8; ++i) {
      s.energy[i] = parse_quantity(e.at(i),
                                   path + ".energy[" + std::to_string(i) + "]",
                                   Dimension::kFrequency, 0.0);
    }
  } else {
    fail(path, "explicit schemes need the 8-entry 'energy' array");
  }
  freq("rabi_g", s.rabi_g);
  freq("rabi_d", s.rabi_d);
  freq("rabi_r0", s.rabi_r0);
  freq("rabi_r1", s.rabi_r1);
  freq("laser_g", s.laser_g);
  freq("laser_d", s.laser_d);
  freq("laser_r0", s.laser_r0);
  freq("laser_r1", s.laser_r1);
  freq("gamma", s.gamma);
  freq("delta_p", s.delta_p);
  s.validate();
  return s;
}

// json line/column of a byte offset, for syntax diagnostics.
std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

ExperimentKind experiment_kind_from(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (name == kKindNames[i]) return static_cast<ExperimentKind>(i);
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

std::vector<double> SweepRange::values() const {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] =
        min + (max - min) * static_cast<double>(i) /
                  static_cast<double>(count - 1);
  }
  return v;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  const double gg = cfg.rates.gamma_g();
  cfg.delta_range = {-25.0 * gg, 25.0 * gg, 101};
  cfg.epsilon_range = {0.1 * gg, 6.0 * gg, 60};
  cfg.forced_epsilons = {1.87 * gg, 3.75 * gg, 28.7 * gg};
  cfg.drive_offsets = {0.0, -5.0 * gg, 10.0 * gg};
  cfg.spectrum_band = 50.0 * gg;
  switch (kind) {
    case ExperimentKind::kQGrid:
    case ExperimentKind::kSProfile:
      cfg.initial = steady_bloch(cfg.rates, cfg.drive);
      break;
    case ExperimentKind::kForced:
      cfg.initial = limit_cycle(cfg.rates);
      cfg.duration = 1500e-6;
      break;
    case ExperimentKind::kLabFrame:
      cfg.initial = {1.0, 0.0, 0.0};
      break;
    case ExperimentKind::kBandwidth:
      cfg.drive = DriveParams(1.87 * gg, 0.0, std::numbers::pi / 2);
      cfg.delta_range = {-25.0 * gg, 25.0 * gg, 201};
      break;
    case ExperimentKind::kDeform:
      cfg.epsilon_range = {0.5 * gg, 50.0 * gg, 100};
      break;
    default:
      break;
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name,
                                   std::optional<ExperimentKind> expected) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(source_name + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": " + e.what());
  }
  require_object(root, "");
  check_keys(root,
             "", {"experiment", "rates",      "drive",     "initial",
                  "duration",   "dt",         "stages",    "grid",
                  "profile_points", "tongue", "bandwidth", "deform",
                  "forced",     "eightlevel", "labframe",  "measure",
                  "ratefit",    "tomography", "seed",      "workers",
                  "out"});

  ExperimentKind kind = expected.value_or(ExperimentKind::kRelax);
  if (root.contains("experiment")) {
    if (!root.at("experiment").is_string()) {
      fail("experiment", "expected a string");
    }
    kind = experiment_kind_from(root.at("experiment").get<std::string>());
    if (expected && kind != *expected) {
      throw ConfigError(source_name + ": experiment '" +
                        std::string(to_string(kind)) +
                        "' does not match the requested '" +
                        std::string(to_string(*expected)) + "'");
    }
  } else if (!expected) {
    throw ConfigError(source_name + ": missing 'experiment'");
  }

  ExperimentConfig cfg = default_config(kind);

  // Rates come first so later fields can use the gamma_g-relative unit.
  if (root.contains("rates")) {
    const json& r = root.at("rates");
    require_object(r, "rates");
    check_keys(r, "rates", {"gamma_g", "gamma_d", "gamma_z"});
    double gg = cfg.rates.gamma_g();
    double gd = cfg.rates.gamma_d();
    double gz = cfg.rates.gamma_z();
    if (r.contains("gamma_g")) {
      gg = parse_quantity(r.at("gamma_g"), "rates.gamma_g",
                          Dimension::kFrequency, 0.0);
    }
    if (r.contains("gamma_d")) {
      gd = parse_quantity(r.at("gamma_d"), "rates.gamma_d",
                          Dimension::kFrequency, 0.0);
    }
    if (r.contains("gamma_z")) {
      gz = parse_quantity(r.at("gamma_z"), "rates.gamma_z",
                          Dimension::kFrequency, 0.0);
    }
    if (gg < 0.0) fail("rates.gamma_g", "must be >= 0");
    if (gd < 0.0) fail("rates.gamma_d", "must be >= 0");
    if (gz < 0.0) fail("rates.gamma_z", "must be >= 0");
    cfg.rates = RateSet(gg, gd, gz);
    // Rate-relative defaults (sweep extents, drive offsets) track the
    // configured gamma_g rather than the preset's.
    const ExperimentConfig base = default_config(kind);
    const double ratio = gg / base.rates.gamma_g();
    cfg.delta_range = {base.delta_range.min * ratio,
                       base.delta_range.max * ratio, base.delta_range.count};
    cfg.epsilon_range = {base.epsilon_range.min * ratio,
                         base.epsilon_range.max * ratio,
                         base.epsilon_range.count};
    cfg.forced_epsilons.clear();
    for (double e : base.forced_epsilons) {
      cfg.forced_epsilons.push_back(e * ratio);
    }
    cfg.drive_offsets.clear();
    for (double o : base.drive_offsets) cfg.drive_offsets.push_back(o * ratio);
    cfg.spectrum_band = base.spectrum_band * ratio;
    if (kind == ExperimentKind::kBandwidth) {
      cfg.drive = DriveParams(1.87 * gg, 0.0, std::numbers::pi / 2);
    }
  }
  const double gg = cfg.rates.gamma_g();

  if (root.contains("drive")) {
    const json& d = root.at("drive");
    require_object(d, "drive");
    check_keys(d, "drive", {"epsilon", "delta", "varphi"});
    double eps = cfg.drive.epsilon();
    double delta = cfg.drive.delta();
    double varphi = cfg.drive.varphi();
    if (d.contains("epsilon")) {
      eps = parse_quantity(d.at("epsilon"), "drive.epsilon",
                           Dimension::kFrequency, gg);
      if (eps < 0.0) fail("drive.epsilon", "must be >= 0");
    }
    if (d.contains("delta")) {
      delta = parse_quantity(d.at("delta"), "drive.delta",
                             Dimension::kFrequency, gg);
    }
    if (d.contains("varphi")) {
      varphi = parse_quantity(d.at("varphi"), "drive.varphi",
                              Dimension::kAngle, gg);
    }
    cfg.drive = DriveParams(eps, delta, varphi);
    if (!root.contains("initial") &&
        (kind == ExperimentKind::kQGrid || kind == ExperimentKind::kSProfile)) {
      cfg.initial = steady_bloch(cfg.rates, cfg.drive);
    }
  }
  if (root.contains("initial")) {
    cfg.initial = parse_state(root.at("initial"), "initial", cfg);
  } else if (root.contains("rates")) {
    // Re-resolve state defaults that depend on the rates.
    if (kind == ExperimentKind::kForced) cfg.initial = limit_cycle(cfg.rates);
    if (kind == ExperimentKind::kQGrid || kind == ExperimentKind::kSProfile) {
      cfg.initial = steady_bloch(cfg.rates, cfg.drive);
    }
  }

  if (root.contains("duration")) {
    cfg.duration = parse_quantity(root.at("duration"), "duration",
                                  Dimension::kTime, gg);
    if (!(cfg.duration > 0.0)) fail("duration", "must be > 0");
  }
  if (root.contains("dt")) {
    cfg.dt_hint = parse_quantity(root.at("dt"), "dt", Dimension::kTime, gg);
    if (!(cfg.dt_hint > 0.0)) fail("dt", "must be > 0");
  }
  if (root.contains("stages")) {
    const json& s = root.at("stages");
    require_object(s, "stages");
    check_keys(s, "stages", {"stage1", "stage2"});
    if (s.contains("stage1")) {
      cfg.stage1 = parse_quantity(s.at("stage1"), "stages.stage1",
                                  Dimension::kTime, gg);
    }
    if (s.contains("stage2")) {
      cfg.stage2 = parse_quantity(s.at("stage2"), "stages.stage2",
                                  Dimension::kTime, gg);
    }
    if (!(cfg.stage1 > 0.0)) fail("stages.stage1", "must be > 0");
    if (!(cfg.stage2 > 0.0)) fail("stages.stage2", "must be > 0");
  }
  if (root.contains("grid")) {
    const json& g = root.at("grid");
    require_object(g, "grid");
    check_keys(g, "grid", {"n_theta", "n_phi"});
    if (g.contains("n_theta")) {
      cfg.n_theta = int_at(g.at("n_theta"), "grid.n_theta", 2);
    }
    if (g.contains("n_phi")) {
      cfg.n_phi = int_at(g.at("n_phi"), "grid.n_phi", 2);
    }
  }
  if (root.contains("profile_points")) {
    cfg.profile_points = int_at(root.at("profile_points"), "profile_points", 8);
  }
  if (root.contains("tongue")) {
    const json& t = root.at("tongue");
    require_object(t, "tongue");
    check_keys(t, "tongue", {"delta", "epsilon", "numeric_check"});
    if (t.contains("delta")) {
      cfg.delta_range = parse_range(t.at("delta"), "tongue.delta", gg);
    }
    if (t.contains("epsilon")) {
      cfg.epsilon_range = parse_range(t.at("epsilon"), "tongue.epsilon", gg);
      if (cfg.epsilon_range.min < 0.0) fail("tongue.epsilon.min", "must be >= 0");
    }
    if (t.contains("numeric_check")) {
      if (!t.at("numeric_check").is_boolean()) {
        fail("tongue.numeric_check", "expected a boolean");
      }
      cfg.numeric_check = t.at("numeric_check").get<bool>();
    }
  }
  if (root.contains("bandwidth")) {
    const json& b = root.at("bandwidth");
    require_object(b, "bandwidth");
    check_keys(b, "bandwidth", {"epsilon", "delta"});
    if (b.contains("epsilon")) {
      const double eps = parse_quantity(b.at("epsilon"), "bandwidth.epsilon",
                                        Dimension::kFrequency, gg);
      if (!(eps > 0.0)) fail("bandwidth.epsilon", "must be > 0");
      cfg.drive = DriveParams(eps, cfg.drive.delta(), cfg.drive.varphi());
    }
    if (b.contains("delta")) {
      cfg.delta_range = parse_range(b.at("delta"), "bandwidth.delta", gg);
    }
  }
  if (root.contains("deform")) {
    const json& d = root.at("deform");
    require_object(d, "deform");
    check_keys(d, "deform", {"epsilon"});
    if (d.contains("epsilon")) {
      cfg.epsilon_range = parse_range(d.at("epsilon"), "deform.epsilon", gg);
      if (cfg.epsilon_range.min < 0.0) fail("deform.epsilon.min", "must be >= 0");
    }
  }
  if (root.contains("forced")) {
    const json& f = root.at("forced");
    require_object(f, "forced");
    check_keys(f, "forced", {"epsilons"});
    if (f.contains("epsilons")) {
      const json& list = f.at("epsilons");
      if (!list.is_array() || list.empty()) {
        fail("forced.epsilons", "expected a nonempty array");
      }
      cfg.forced_epsilons.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        const double e = parse_quantity(
            list.at(i), "forced.epsilons[" + std::to_string(i) + "]",
            Dimension::kFrequency, gg);
        if (e < 0.0) fail("forced.epsilons", "must be >= 0");
        cfg.forced_epsilons.push_back(e);
      }
    }
  }
  if (root.contains("eightlevel")) {
    const json& e = root.at("eightlevel");
    require_object(e, "eightlevel");
    check_keys(e, "eightlevel",
               {"gamma", "delta_p", "two_photon", "horizon", "ladder",
                "scheme"});
    if (e.contains("gamma")) {
      cfg.el_gamma = parse_quantity(e.at("gamma"), "eightlevel.gamma",
                                    Dimension::kFrequency, gg);
      if (!(cfg.el_gamma > 0.0)) fail("eightlevel.gamma", "must be > 0");
    }
    if (e.contains("delta_p")) {
      cfg.el_delta_p = parse_quantity(e.at("delta_p"), "eightlevel.delta_p",
                                      Dimension::kFrequency, gg);
      if (cfg.el_delta_p < 0.0) fail("eightlevel.delta_p", "must be >= 0");
    }
    if (e.contains("two_photon")) {
      cfg.el_two_photon = parse_quantity(
          e.at("two_photon"), "eightlevel.two_photon", Dimension::kFrequency,
          gg);
    }
    if (e.contains("horizon")) {
      cfg.el_horizon = parse_quantity(e.at("horizon"), "eightlevel.horizon",
                                      Dimension::kTime, gg);
      if (!(cfg.el_horizon > 0.0)) fail("eightlevel.horizon", "must be > 0");
    }
    if (e.contains("ladder")) {
      if (!e.at("ladder").is_boolean()) {
        fail("eightlevel.ladder", "expected a boolean");
      }
      cfg.el_ladder = e.at("ladder").get<bool>();
    }
    if (e.contains("scheme")) {
      cfg.scheme = parse_scheme(e.at("scheme"), "eightlevel.scheme");
    }
  }
  if (root.contains("labframe")) {
    const json& l = root.at("labframe");
    require_object(l, "labframe");
    check_keys(l, "labframe",
               {"omega_q", "sample_dt", "duration", "drive_start", "offsets",
                "window", "spectrum_band", "csv_stride"});
    if (l.contains("omega_q")) {
      cfg.omega_q = parse_quantity(l.at("omega_q"), "labframe.omega_q",
                                   Dimension::kFrequency, gg);
      if (!(cfg.omega_q > 0.0)) fail("labframe.omega_q", "must be > 0");
    }
    if (l.contains("sample_dt")) {
      cfg.sample_dt = parse_quantity(l.at("sample_dt"), "labframe.sample_dt",
                                     Dimension::kTime, gg);
      if (!(cfg.sample_dt > 0.0)) fail("labframe.sample_dt", "must be > 0");
    }
    if (l.contains("duration")) {
      cfg.lab_duration = parse_quantity(l.at("duration"), "labframe.duration",
                                        Dimension::kTime, gg);
      if (!(cfg.lab_duration > 0.0)) fail("labframe.duration", "must be > 0");
    }
    if (l.contains("drive_start")) {
      cfg.drive_start = parse_quantity(l.at("drive_start"),
                                       "labframe.drive_start",
                                       Dimension::kTime, gg);
      if (cfg.drive_start < 0.0) fail("labframe.drive_start", "must be >= 0");
    }
    if (l.contains("offsets")) {
      const json& list = l.at("offsets");
      if (!list.is_array() || list.empty()) {
        fail("labframe.offsets", "expected a nonempty array");
      }
      cfg.drive_offsets.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        cfg.drive_offsets.push_back(parse_quantity(
            list.at(i), "labframe.offsets[" + std::to_string(i) + "]",
            Dimension::kFrequency, gg));
      }
    }
    if (l.contains("window")) {
      const json& w = l.at("window");
      if (!w.is_array() || w.size() != 2) {
        fail("labframe.window", "expected [t0, t1]");
      }
      cfg.window_t0 = parse_quantity(w.at(0), "labframe.window[0]",
                                     Dimension::kTime, gg);
      cfg.window_t1 = parse_quantity(w.at(1), "labframe.window[1]",
                                     Dimension::kTime, gg);
      if (!(cfg.window_t0 < cfg.window_t1)) {
        fail("labframe.window", "needs t0 < t1");
      }
    }
    if (l.contains("spectrum_band")) {
      cfg.spectrum_band = parse_quantity(l.at("spectrum_band"),
                                         "labframe.spectrum_band",
                                         Dimension::kFrequency, gg);
      if (!(cfg.spectrum_band > 0.0)) {
        fail("labframe.spectrum_band", "must be > 0");
      }
    }
    if (l.contains("csv_stride")) {
      cfg.csv_stride = int_at(l.at("csv_stride"), "labframe.csv_stride", 1);
    }
  }
  if (root.contains("measure")) {
    const json& m = root.at("measure");
    require_object(m, "measure");
    check_keys(m, "measure", {"shots", "spam_error", "seed"});
    if (m.contains("shots")) {
      if (!m.at("shots").is_number_integer() ||
          m.at("shots").get<long long>() < 0) {
        fail("measure.shots", "expected an integer >= 0");
      }
      cfg.measure.shots = m.at("shots").get<std::uint64_t>();
    }
    if (m.contains("spam_error")) {
      cfg.measure.spam_error = number_at(m.at("spam_error"),
                                         "measure.spam_error");
      if (cfg.measure.spam_error < 0.0 || cfg.measure.spam_error >= 0.5) {
        fail("measure.spam_error", "must be in [0, 0.5)");
      }
    }
    if (m.contains("seed")) {
      if (!m.at("seed").is_number_integer()) {
        fail("measure.seed", "expected an integer");
      }
      cfg.measure.seed = m.at("seed").get<std::uint64_t>();
    }
  }
  if (root.contains("ratefit")) {
    const json& r = root.at("ratefit");
    require_object(r, "ratefit");
    check_keys(r, "ratefit", {"points"});
    if (r.contains("points")) {
      cfg.fit_points = int_at(r.at("points"), "ratefit.points", 4);
    }
  }
  if (root.contains("tomography")) {
    const json& t = root.at("tomography");
    require_object(t, "tomography");
    check_keys(t, "tomography", {"pulse_set", "delta", "omega_mw"});
    if (t.contains("pulse_set")) {
      if (!t.at("pulse_set").is_string()) {
        fail("tomography.pulse_set", "expected a string");
      }
      cfg.pulse_set = t.at("pulse_set").get<std::string>();
      if (cfg.pulse_set != "resonant" && cfg.pulse_set != "detuned") {
        fail("tomography.pulse_set", "expected 'resonant' or 'detuned'");
      }
    }
    if (t.contains("delta")) {
      cfg.tomo_delta = parse_quantity(t.at("delta"), "tomography.delta",
                                      Dimension::kFrequency, gg);
    }
    if (t.contains("omega_mw")) {
      cfg.timings.omega_mw = parse_quantity(
          t.at("omega_mw"), "tomography.omega_mw", Dimension::kFrequency, gg);
      if (!(cfg.timings.omega_mw > 0.0)) {
        fail("tomography.omega_mw", "must be > 0");
      }
    }
  }
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_integer()) fail("seed", "expected an integer");
    cfg.seed = root.at("seed").get<std::uint64_t>();
    cfg.measure.seed = cfg.seed;
  }
  if (root.contains("workers")) {
    cfg.workers = int_at(root.at("workers"), "workers", 0);
  }
  if (root.contains("out")) {
    if (!root.at("out").is_string()) fail("out", "expected a string");
    cfg.out = root.at("out").get<std::string>();
  }
  // measure.seed set explicitly wins over the top-level seed.
  if (root.contains("measure") && root.at("measure").contains("seed")) {
    cfg.measure.seed = root.at("measure").at("seed").get<std::uint64_t>();
  }
  cfg.kind = kind;
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::optional<ExperimentKind> expected) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string(), expected);
}

std::string config_echo_json(const ExperimentConfig& cfg) {
  json j;
  const auto freq = [](double w) {
    return json{{"value", to_khz(w)}, {"unit", "2pi_kHz"}};
  };
  const auto time_us = [](double t) {
    return json{{"value", to_us(t)}, {"unit", "us"}};
  };
  j["experiment"] = to_string(cfg.kind);
  j["rates"] = {{"gamma_g", freq(cfg.rates.gamma_g())},
                {"gamma_d", freq(cfg.rates.gamma_d())},
                {"gamma_z", freq(cfg.rates.gamma_z())}};
  j["drive"] = {{"epsilon", freq(cfg.drive.epsilon())},
                {"delta", freq(cfg.drive.delta())},
                {"varphi", json{{"value", cfg.drive.varphi()},
                                {"unit", "rad"}}}};
  j["initial"] = {cfg.initial.x, cfg.initial.y, cfg.initial.z};
  j["seed"] = cfg.seed;
  switch (cfg.kind) {
    case ExperimentKind::kRelax:
    case ExperimentKind::kForced:
      j["duration"] = time_us(cfg.duration);
      break;
    case ExperimentKind::kSync:
      j["stages"] = {{"stage1", time_us(cfg.stage1)},
                     {"stage2", time_us(cfg.stage2)}};
      j["grid"] = {{"n_theta", cfg.n_theta}, {"n_phi", cfg.n_phi}};
      j["profile_points"] = cfg.profile_points;
      break;
    case ExperimentKind::kQGrid:
      j["grid"] = {{"n_theta", cfg.n_theta}, {"n_phi", cfg.n_phi}};
      break;
    case ExperimentKind::kSProfile:
      j["profile_points"] = cfg.profile_points;
      break;
    case ExperimentKind::kTongue:
      j["tongue"] = {
          {"delta", {{"min", freq(cfg.delta_range.min)},
                     {"max", freq(cfg.delta_range.max)},
                     {"count", cfg.delta_range.count}}},
          {"epsilon", {{"min", freq(cfg.epsilon_range.min)},
                       {"max", freq(cfg.epsilon_range.max)},
                       {"count", cfg.epsilon_range.count}}},
          {"numeric_check", cfg.numeric_check}};
      break;
    case ExperimentKind::kBandwidth:
      j["bandwidth"] = {{"delta", {{"min", freq(cfg.delta_range.min)},
                                   {"max", freq(cfg.delta_range.max)},
                                   {"count", cfg.delta_range.count}}}};
      break;
    case ExperimentKind::kDeform:
      j["deform"] = {{"epsilon", {{"min", freq(cfg.epsilon_range.min)},
                                  {"max", freq(cfg.epsilon_range.max)},
                                  {"count", cfg.epsilon_range.count}}}};
      break;
    case ExperimentKind::kEightLevel: {
      json e = {{"gamma", freq(cfg.el_gamma)},
                {"delta_p", freq(cfg.el_delta_p)},
                {"two_photon", freq(cfg.el_two_photon)},
                {"horizon", time_us(cfg.el_horizon)},
                {"ladder", cfg.el_ladder}};
      if (cfg.scheme) e["scheme"] = "explicit";
      j["eightlevel"] = e;
      break;
    }
    case ExperimentKind::kLabFrame: {
      json offs = json::array();
      for (double o : cfg.drive_offsets) offs.push_back(freq(o));
      j["labframe"] = {{"omega_q", freq(cfg.omega_q)},
                       {"sample_dt", time_us(cfg.sample_dt)},
                       {"duration", time_us(cfg.lab_duration)},
                       {"drive_start", time_us(cfg.drive_start)},
                       {"offsets", offs},
                       {"window", {time_us(cfg.window_t0),
                                   time_us(cfg.window_t1)}},
                       {"spectrum_band", freq(cfg.spectrum_band)},
                       {"csv_stride", cfg.csv_stride}};
      break;
    }
    case ExperimentKind::kRateFit:
      j["ratefit"] = {{"points", cfg.fit_points}};
      j["measure"] = {{"shots", cfg.measure.shots},
                      {"spam_error", cfg.measure.spam_error},
                      {"seed", cfg.measure.seed}};
      break;
    case ExperimentKind::kTomography:
      j["tomography"] = {{"pulse_set", cfg.pulse_set},
                         {"delta", freq(cfg.tomo_delta)},
                         {"omega_mw", freq(cfg.timings.omega_mw)}};
      j["measure"] = {{"shots", cfg.measure.shots},
                      {"spam_error", cfg.measure.spam_error},
                      {"seed", cfg.measure.seed}};
      break;
  }
  if (cfg.kind == ExperimentKind::kForced) {
    json eps = json::array();
    for (double e : cfg.forced_epsilons) eps.push_back(freq(e));
    j["forced"] = {{"epsilons", eps}};
  }
  return j.dump(2);
}

}  // namespace spinlock
