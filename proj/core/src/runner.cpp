#include "spinlock/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "spinlock/effective.hpp"
#include "spinlock/errors.hpp"
#include "spinlock/estimation.hpp"
#include "spinlock/io.hpp"
#include "spinlock/labframe.hpp"
#include "spinlock/phase_space.hpp"
#include "spinlock/presets.hpp"
#include "spinlock/sync.hpp"

#ifndef SPINLOCK_VERSION
#define SPINLOCK_VERSION "0.0.0"
#endif

namespace spinlock {
namespace {

using nlohmann::json;

json bloch_json(const BlochVector& m) { return json::array({m.x, m.y, m.z}); }

json freq_khz(double w) {
  return json{{"value", to_khz(w)}, {"unit", "2pi_kHz"}};
}

std::filesystem::path stem_of(const ExperimentConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  return std::filesystem::path(to_string(cfg.kind));
}

// Integrates a two-level model and returns Bloch samples only; stride keeps
// roughly `target_samples` rows.
Trajectory run_bloch(const OpenSystemModel& model, const BlochVector& initial,
                     std::pair<double, double> span, double dt_hint,
                     int target_samples = 2000) {
  const double dt = dt_hint > 0.0 ? dt_hint : suggest_dt(model);
  const auto steps =
      static_cast<long long>(std::ceil((span.second - span.first) / dt));
  IntegrateOptions options;
  options.sample_stride =
      static_cast<int>(std::max(1LL, steps / target_samples));
  options.store_states = false;
  options.prefer_bloch_path = true;
  return integrate(model, rho_from_bloch(initial), span, dt, options);
}

std::vector<std::vector<double>> bloch_rows(const Trajectory& traj,
                                            std::size_t skip = 0) {
  std::vector<std::vector<double>> rows;
  rows.reserve(traj.times.size() - skip);
  for (std::size_t i = skip; i < traj.times.size(); ++i) {
    rows.push_back({traj.times[i], traj.bloch[i].x, traj.bloch[i].y,
                    traj.bloch[i].z});
  }
  return rows;
}

// Q grid and S profile of one state, written as "<stem>_q<tag>.csv" and
// "<stem>_s<tag>.csv".
json write_snapshot(const ExperimentConfig& cfg,
                    const std::filesystem::path& stem, const char* tag,
                    double t, const DensityMatrix& rho, RunArtifacts& out) {
  const PhaseSpaceGrid grid = q_grid(rho, cfg.n_theta, cfg.n_phi);
  const SProfile profile = fit_s_profile(s_profile(rho, cfg.profile_points));
  auto q_path = stem;
  q_path += std::string("_q") + tag + ".csv";
  auto s_path = stem;
  s_path += std::string("_s") + tag + ".csv";
  write_q_grid_csv(q_path, grid);
  write_s_profile_csv(s_path, profile);
  out.files.push_back(q_path);
  out.files.push_back(s_path);
  json r = {{"t_us", to_us(t)},
            {"q_normalization", grid_normalization(grid)},
            {"s_contrast", profile.fitted_contrast}};
  if (profile.phase_defined) r["s_phase"] = profile.fitted_phase;
  return r;
}

json run_relax(const ExperimentConfig& cfg, const std::filesystem::path& stem,
               RunArtifacts& out) {
  const OpenSystemModel model = build_rotating_model(cfg.rates, DriveParams(0.0));
  const Trajectory traj =
      run_bloch(model, cfg.initial, {0.0, cfg.duration}, cfg.dt_hint);
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv, "t,mx,my,mz", bloch_rows(traj));
  out.files.push_back(csv);

  const BlochVector lc = limit_cycle(cfg.rates);
  const BlochVector end = traj.bloch.back();
  return {{"final", bloch_json(end)},
          {"limit_cycle", bloch_json(lc)},
          {"final_distance", (end - lc).norm()}};
}

json run_sync_timeline(const ExperimentConfig& cfg,
                       const std::filesystem::path& stem, RunArtifacts& out) {
  const OpenSystemModel free_model =
      build_rotating_model(cfg.rates, DriveParams(0.0));
  const OpenSystemModel driven_model =
      build_rotating_model(cfg.rates, cfg.drive);

  const Trajectory stage1 =
      run_bloch(free_model, cfg.initial, {0.0, cfg.stage1}, cfg.dt_hint, 1000);
  const BlochVector mid = stage1.bloch.back();
  const Trajectory stage2 = run_bloch(
      driven_model, mid, {cfg.stage1, cfg.stage1 + cfg.stage2}, cfg.dt_hint,
      1000);

  auto rows = bloch_rows(stage1);
  const auto tail = bloch_rows(stage2, 1);
  rows.insert(rows.end(), tail.begin(), tail.end());
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv, "t,mx,my,mz", rows);
  out.files.push_back(csv);

  const BlochVector end = stage2.bloch.back();
  const SyncAnalytics analytics = sync_analytics(cfg.rates, cfg.drive);
  const BlochVector lc = limit_cycle(cfg.rates);

  json snapshots = json::array();
  snapshots.push_back(write_snapshot(cfg, stem, "0", 0.0,
                                     rho_from_bloch(cfg.initial), out));
  snapshots.push_back(
      write_snapshot(cfg, stem, "1", cfg.stage1, rho_from_bloch(mid), out));
  snapshots.push_back(write_snapshot(cfg, stem, "2", cfg.stage1 + cfg.stage2,
                                     rho_from_bloch(end), out));

  return {{"stage1_end", bloch_json(mid)},
          {"stage1_end_distance", (mid - lc).norm()},
          {"limit_cycle", bloch_json(lc)},
          {"final", bloch_json(end)},
          {"steady", bloch_json(analytics.steady)},
          {"final_distance", (end - analytics.steady).norm()},
          {"analytic_sync_phase", analytics.sync_phase},
          {"analytic_contrast", analytics.contrast},
          {"snapshots", snapshots}};
}

json run_qgrid(const ExperimentConfig& cfg, const std::filesystem::path& stem,
               RunArtifacts& out) {
  const DensityMatrix rho = rho_from_bloch(cfg.initial);
  const PhaseSpaceGrid grid = q_grid(rho, cfg.n_theta, cfg.n_phi);
  auto csv = stem;
  csv += ".csv";
  write_q_grid_csv(csv, grid);
  out.files.push_back(csv);
  const auto [lo, hi] =
      std::minmax_element(grid.values.begin(), grid.values.end());
  return {{"state", bloch_json(cfg.initial)},
          {"normalization", grid_normalization(grid)},
          {"min", *lo},
          {"max", *hi}};
}

json run_sprofile(const ExperimentConfig& cfg,
                  const std::filesystem::path& stem, RunArtifacts& out) {
  const DensityMatrix rho = rho_from_bloch(cfg.initial);
  const SProfile profile = fit_s_profile(s_profile(rho, cfg.profile_points));
  auto csv = stem;
  csv += ".csv";
  write_s_profile_csv(csv, profile);
  out.files.push_back(csv);
  const SyncAnalytics analytics = sync_analytics(cfg.rates, cfg.drive);
  json r = {{"state", bloch_json(cfg.initial)},
            {"contrast", profile.fitted_contrast},
            {"analytic_contrast", analytics.contrast},
            {"analytic_sync_phase", analytics.sync_phase}};
  if (profile.phase_defined) r["phase"] = profile.fitted_phase;
  return r;
}

json run_tongue(const ExperimentConfig& cfg, const std::filesystem::path& stem,
                RunArtifacts& out) {
  const auto deltas = cfg.delta_range.values();
  const auto epsilons = cfg.epsilon_range.values();
  const std::size_t n = deltas.size() * epsilons.size();
  std::vector<double> max_s(n);
  std::vector<double> numeric(cfg.numeric_check ? n : 0);

  parallel_for(n, resolve_workers(cfg.workers), [&](std::size_t i) {
    const double delta = deltas[i / epsilons.size()];
    const double eps = epsilons[i % epsilons.size()];
    const DriveParams drive(eps, delta, cfg.drive.varphi());
    max_s[i] = 0.5 * contrast(cfg.rates, drive);
    if (cfg.numeric_check) {
      const DensityMatrix rho =
          steady_state(build_rotating_model(cfg.rates, drive));
      const SProfile profile = fit_s_profile(s_profile(rho, 181));
      numeric[i] = 0.5 * profile.fitted_contrast;
    }
  });

  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row{deltas[i / epsilons.size()],
                            epsilons[i % epsilons.size()], max_s[i]};
    if (cfg.numeric_check) {
      row.push_back(numeric[i]);
      worst = std::max(worst, std::abs(numeric[i] - max_s[i]));
    }
    rows.push_back(std::move(row));
  }
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv,
                   cfg.numeric_check ? "delta,epsilon,max_s,max_s_numeric"
                                     : "delta,epsilon,max_s",
                   rows);
  out.files.push_back(csv);

  json r = {{"points", n},
            {"apex_max_s",
             0.5 * contrast(cfg.rates, DriveParams(epsilons.back(), 0.0,
                                                   cfg.drive.varphi()))}};
  if (cfg.numeric_check) r["max_numeric_deviation"] = worst;
  return r;
}

json run_bandwidth(const ExperimentConfig& cfg,
                   const std::filesystem::path& stem, RunArtifacts& out) {
  const auto deltas = cfg.delta_range.values();
  std::vector<std::vector<double>> rows;
  rows.reserve(deltas.size());
  for (double delta : deltas) {
    rows.push_back(
        {delta, 0.5 * contrast(cfg.rates,
                               DriveParams(cfg.drive.epsilon(), delta,
                                           cfg.drive.varphi()))});
  }
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv, "delta,max_s", rows);
  out.files.push_back(csv);

  const double width = bandwidth_3db(cfg.rates, cfg.drive.epsilon());
  return {{"epsilon", freq_khz(cfg.drive.epsilon())},
          {"width_3db", freq_khz(width)},
          {"width_3db_gamma_g", width / cfg.rates.gamma_g()},
          {"half_max_detuning_gamma_g", 0.5 * width / cfg.rates.gamma_g()},
          {"peak_max_s",
           0.5 * contrast(cfg.rates, DriveParams(cfg.drive.epsilon(), 0.0,
                                                 cfg.drive.varphi()))}};
}

json run_deform(const ExperimentConfig& cfg,
                const std::filesystem::path& stem, RunArtifacts& out) {
  const auto epsilons = cfg.epsilon_range.values();
  std::vector<std::vector<double>> rows(epsilons.size());
  parallel_for(epsilons.size(), resolve_workers(cfg.workers),
               [&](std::size_t i) {
                 const double eps = epsilons[i];
                 const DriveParams drive(eps, cfg.drive.delta(),
                                         cfg.drive.varphi());
                 rows[i] = {eps, deformation(cfg.rates, eps, cfg.drive.delta()),
                            0.5 * contrast(cfg.rates, drive)};
               });
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv, "epsilon,p_deform,max_s", rows);
  out.files.push_back(csv);

  const double eps_c = critical_epsilon(cfg.rates, cfg.drive.delta());
  const BlochVector lc = limit_cycle(cfg.rates);
  return {{"epsilon_c", freq_khz(eps_c)},
          {"epsilon_c_gamma_g", eps_c / cfg.rates.gamma_g()},
          {"max_s_at_epsilon_c",
           0.5 * contrast(cfg.rates, DriveParams(eps_c, cfg.drive.delta(),
                                                 cfg.drive.varphi()))},
          {"saturation", rows.back()[1]},
          {"limit_cycle_mz_abs", std::abs(lc.z)}};
}

json run_forced(const ExperimentConfig& cfg, const std::filesystem::path& stem,
                RunArtifacts& out) {
  std::vector<std::vector<std::vector<double>>> blocks(
      cfg.forced_epsilons.size());
  std::vector<json> fits(cfg.forced_epsilons.size());

  parallel_for(
      cfg.forced_epsilons.size(), resolve_workers(cfg.workers),
      [&](std::size_t i) {
        const double eps = cfg.forced_epsilons[i];
        const DriveParams drive(eps, cfg.drive.delta(), cfg.drive.varphi());
        const OpenSystemModel model = build_rotating_model(cfg.rates, drive);
        const Trajectory traj =
            run_bloch(model, cfg.initial, {0.0, cfg.duration}, cfg.dt_hint);
        blocks[i].reserve(traj.times.size());
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
          blocks[i].push_back({eps, traj.times[k], traj.bloch[k].x,
                               traj.bloch[k].y, traj.bloch[k].z});
        }

        const BlochVector steady = steady_bloch(cfg.rates, drive);
        json f = {{"epsilon", freq_khz(eps)},
                  {"epsilon_gamma_g", eps / cfg.rates.gamma_g()},
                  {"steady_mz", steady.z},
                  {"final_mz", traj.bloch.back().z},
                  {"final_distance", (traj.bloch.back() - steady).norm()}};
        // Oscillation frequency only means something when the fitted tone
        // is underdamped; otherwise the trace is a plain relaxation and the
        // frequency is reported absent.
        try {
          std::vector<double> mz(traj.times.size());
          for (std::size_t k = 0; k < mz.size(); ++k) mz[k] = traj.bloch[k].z;
          const FitResult fit = fit_damped_cosine(traj.times, mz);
          const double gamma_fit = fit.params[1];
          const double omega_fit = std::abs(fit.params[2]);
          f["fit_decay_rate"] = freq_khz(gamma_fit);
          if (omega_fit >= 0.5 * gamma_fit) {
            f["fit_frequency"] = freq_khz(omega_fit);
            f["fit_frequency_gamma_g"] = omega_fit / cfg.rates.gamma_g();
          }
        } catch (const NumericError&) {
          // overdamped / featureless trace
        }
        fits[i] = std::move(f);
      });

  std::vector<std::vector<double>> rows;
  for (auto& block : blocks) {
    rows.insert(rows.end(), block.begin(), block.end());
  }
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv, "epsilon,t,mx,my,mz", rows);
  out.files.push_back(csv);

  return {{"traces", json(fits)}};
}

json run_eightlevel(const ExperimentConfig& cfg,
                    const std::filesystem::path& stem, RunArtifacts& out) {
  const YbLevelScheme scheme =
      cfg.scheme ? *cfg.scheme
                 : yb_calibrated_scheme(cfg.rates.gamma_g(),
                                        cfg.rates.gamma_d(), cfg.el_gamma,
                                        cfg.el_delta_p, cfg.el_two_photon);
  const ReductionReport report = validate_reduction(scheme, cfg.el_horizon);

  std::vector<std::vector<double>> rows;
  rows.reserve(report.times.size());
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    rows.push_back({report.times[i], report.deviation[i]});
  }
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv, "t,bloch_deviation", rows);
  out.files.push_back(csv);

  json r = {{"effective_gamma_g", freq_khz(report.effective_rates.gamma_g())},
            {"effective_gamma_d", freq_khz(report.effective_rates.gamma_d())},
            {"effective_gamma_z", freq_khz(report.effective_rates.gamma_z())},
            {"max_bloch_deviation", report.max_bloch_deviation},
            {"max_mz_deviation", report.max_mz_deviation},
            {"min_target_population", report.min_target_population},
            {"warnings", report.warnings}};

  if (cfg.el_ladder && !cfg.scheme) {
    // Coupling-strength ladder at fixed detunings: target rates scale as
    // s^2, so the Rabi rates scale as s and the reduction error should
    // follow (Omega/gamma)^2.
    const double scales[] = {0.5, 1.0, 2.0};
    json ladder = json::array();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double s : scales) {
      const YbLevelScheme step = yb_calibrated_scheme(
          s * s * cfg.rates.gamma_g(), s * s * cfg.rates.gamma_d(),
          cfg.el_gamma, cfg.el_delta_p, cfg.el_two_photon);
      const ReductionReport rep =
          validate_reduction(step, 0.5 * cfg.el_horizon);
      ladder.push_back({{"scale", s},
                        {"rabi_g", freq_khz(step.rabi_g)},
                        {"max_bloch_deviation", rep.max_bloch_deviation}});
      const double lx = std::log(s);
      const double ly = std::log(rep.max_bloch_deviation);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double n = static_cast<double>(std::size(scales));
    const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    r["ladder"] = ladder;
    r["ladder_slope"] = slope;
  }
  return r;
}

json run_labframe(const ExperimentConfig& cfg,
                  const std::filesystem::path& stem, RunArtifacts& out) {
  const std::size_t n = cfg.drive_offsets.size();
  std::vector<json> per_drive(n);
  std::vector<std::vector<std::vector<double>>> series_rows(n);
  std::vector<std::vector<std::vector<double>>> spectrum_rows(n);

  parallel_for(n, resolve_workers(cfg.workers), [&](std::size_t i) {
    LabFrameConfig lab;
    lab.omega_q = cfg.omega_q;
    lab.omega = cfg.omega_q + cfg.drive_offsets[i];
    lab.epsilon = cfg.drive.epsilon();
    lab.varphi = cfg.drive.varphi();
    lab.rates = cfg.rates;
    lab.sample_dt = cfg.sample_dt;
    lab.duration = cfg.lab_duration;
    lab.drive_start = cfg.drive_start;
    const LabSeries series = simulate_lab(lab);

    for (std::size_t k = 0; k < series.size();
         k += static_cast<std::size_t>(cfg.csv_stride)) {
      series_rows[i].push_back(
          {series.t[k], series.mx[k], series.my[k], series.mz[k]});
    }

    const double t1 = std::min(cfg.window_t1, cfg.lab_duration);
    const auto [begin, end] = window_indices(series, cfg.window_t0, t1);
    std::vector<double> windowed(series.mx.begin() +
                                     static_cast<std::ptrdiff_t>(begin),
                                 series.mx.begin() +
                                     static_cast<std::ptrdiff_t>(end));
    const Spectrum spec = power_spectrum(windowed, cfg.sample_dt);

    const double band = cfg.spectrum_band;
    for (std::size_t k = 0; k < spec.freq_hz.size(); ++k) {
      if (std::abs(from_hz(spec.freq_hz[k]) - cfg.omega_q) <= band) {
        spectrum_rows[i].push_back({spec.freq_hz[k], spec.magnitude[k]});
      }
    }

    const PhasorEstimate phasor =
        extract_phasor(series.t, series.mx, begin, end, lab.omega);
    const BlochVector steady = steady_bloch(
        cfg.rates, DriveParams(cfg.drive.epsilon(), cfg.drive_offsets[i],
                               cfg.drive.varphi()));
    const double predicted =
        std::sqrt(steady.x * steady.x + steady.y * steady.y);
    const double bin_hz = 1.0 / (static_cast<double>(end - begin) *
                                 cfg.sample_dt);
    per_drive[i] = {
        {"omega", freq_khz(lab.omega)},
        {"offset", freq_khz(cfg.drive_offsets[i])},
        {"peak_freq", freq_khz(from_hz(spec.peak_freq_hz))},
        {"peak_offset_bins",
         (spec.peak_freq_hz - to_hz(lab.omega)) / bin_hz},
        {"peak_magnitude", spec.peak_magnitude},
        {"demod_amplitude", phasor.amplitude},
        {"demod_phase", phasor.phase},
        {"predicted_amplitude", predicted}};
  });

  json drives = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    auto series_csv = stem;
    series_csv += "_series" + std::to_string(i) + ".csv";
    write_csv_atomic(series_csv, "t,mx,my,mz", series_rows[i]);
    out.files.push_back(series_csv);

    auto spectrum_csv = stem;
    spectrum_csv += "_spectrum" + std::to_string(i) + ".csv";
    write_csv_atomic(spectrum_csv, "freq_hz,magnitude", spectrum_rows[i]);
    out.files.push_back(spectrum_csv);
    drives.push_back(per_drive[i]);
  }
  return {{"omega_q", freq_khz(cfg.omega_q)}, {"drives", drives}};
}

json fit_json(const FitResult& fit) {
  return {{"params", fit.params},
          {"param_errors", fit.param_errors},
          {"residual_rms", fit.residual_rms},
          {"iterations", fit.iterations}};
}

json run_ratefit(const ExperimentConfig& cfg,
                 const std::filesystem::path& stem, RunArtifacts& out) {
  const RateFitReport report =
      rate_fit_protocol(cfg.rates, cfg.measure, cfg.fit_points);

  const std::pair<const char*, const DecaySamples*> data[] = {
      {"gain", &report.gain_data},
      {"damping", &report.damping_data},
      {"combined", &report.combined_data},
      {"coherence", &report.coherence_data}};
  for (const auto& [name, samples] : data) {
    std::vector<std::vector<double>> rows;
    rows.reserve(samples->t.size());
    for (std::size_t i = 0; i < samples->t.size(); ++i) {
      rows.push_back({samples->t[i], samples->p[i]});
    }
    auto csv = stem;
    csv += std::string("_") + name + ".csv";
    write_csv_atomic(csv, "t,p", rows);
    out.files.push_back(csv);
  }

  const double truth_sum = cfg.rates.gamma_g() + cfg.rates.gamma_d();
  const double truth_coh = 2.0 * cfg.rates.gamma_z() + 0.5 * truth_sum;
  return {{"gamma_g", freq_khz(report.gamma_g)},
          {"gamma_g_error", freq_khz(report.gamma_g_error)},
          {"gamma_d", freq_khz(report.gamma_d)},
          {"gamma_d_error", freq_khz(report.gamma_d_error)},
          {"gamma_sum", freq_khz(report.gamma_sum)},
          {"gamma_z", freq_khz(report.gamma_z)},
          {"gamma_z_error", freq_khz(report.gamma_z_error)},
          {"truth",
           {{"gamma_g", freq_khz(cfg.rates.gamma_g())},
            {"gamma_d", freq_khz(cfg.rates.gamma_d())},
            {"gamma_z", freq_khz(cfg.rates.gamma_z())},
            {"gamma_sum", freq_khz(truth_sum)},
            {"coherence_rate", freq_khz(truth_coh)}}},
          {"relative_error",
           {{"gamma_g",
             std::abs(report.gamma_g - cfg.rates.gamma_g()) /
                 cfg.rates.gamma_g()},
            {"gamma_d",
             std::abs(report.gamma_d - cfg.rates.gamma_d()) /
                 cfg.rates.gamma_d()},
            {"gamma_z",
             std::abs(report.gamma_z - cfg.rates.gamma_z()) /
                 cfg.rates.gamma_z()},
            {"gamma_sum", std::abs(report.gamma_sum - truth_sum) / truth_sum},
            {"coherence",
             std::abs(report.coherence.params[1] - truth_coh) / truth_coh}}},
          {"fits",
           {{"gain", fit_json(report.gain)},
            {"damping", fit_json(report.damping)},
            {"combined", fit_json(report.combined)},
            {"coherence", fit_json(report.coherence)}}}};
}

json run_tomography(const ExperimentConfig& cfg,
                    const std::filesystem::path& stem, RunArtifacts& out) {
  const DensityMatrix rho = rho_from_bloch(cfg.initial);
  BlochVector estimate;
  if (cfg.pulse_set == "detuned") {
    estimate = tomography_detuned(rho, cfg.tomo_delta, cfg.measure,
                                  cfg.timings);
  } else {
    estimate = tomography_resonant(rho, cfg.measure, cfg.timings);
  }
  auto csv = stem;
  csv += ".csv";
  write_csv_atomic(csv, "truth_x,truth_y,truth_z,est_x,est_y,est_z",
                   {{cfg.initial.x, cfg.initial.y, cfg.initial.z, estimate.x,
                     estimate.y, estimate.z}});
  out.files.push_back(csv);
  return {{"pulse_set", cfg.pulse_set},
          {"truth", bloch_json(cfg.initial)},
          {"estimate", bloch_json(estimate)},
          {"error", (estimate - cfg.initial).norm()},
          {"shots", cfg.measure.shots}};
}

}  // namespace

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("SPINLOCK_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t w =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + w - 1) / w;
  std::vector<std::thread> threads;
  std::mutex error_mutex;
  std::exception_ptr first_error;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& thread : threads) thread.join();
  if (first_error) std::rethrow_exception(first_error);
}

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path stem = stem_of(cfg);
  if (stem.has_parent_path()) {
    std::filesystem::create_directories(stem.parent_path());
  }

  RunArtifacts out;
  json results;
  switch (cfg.kind) {
    case ExperimentKind::kRelax:
      results = run_relax(cfg, stem, out);
      break;
    case ExperimentKind::kSync:
      results = run_sync_timeline(cfg, stem, out);
      break;
    case ExperimentKind::kQGrid:
      results = run_qgrid(cfg, stem, out);
      break;
    case ExperimentKind::kSProfile:
      results = run_sprofile(cfg, stem, out);
      break;
    case ExperimentKind::kTongue:
      results = run_tongue(cfg, stem, out);
      break;
    case ExperimentKind::kBandwidth:
      results = run_bandwidth(cfg, stem, out);
      break;
    case ExperimentKind::kDeform:
      results = run_deform(cfg, stem, out);
      break;
    case ExperimentKind::kForced:
      results = run_forced(cfg, stem, out);
      break;
    case ExperimentKind::kEightLevel:
      results = run_eightlevel(cfg, stem, out);
      break;
    case ExperimentKind::kLabFrame:
      results = run_labframe(cfg, stem, out);
      break;
    case ExperimentKind::kRateFit:
      results = run_ratefit(cfg, stem, out);
      break;
    case ExperimentKind::kTomography:
      results = run_tomography(cfg, stem, out);
      break;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  json report = {{"version", SPINLOCK_VERSION},
                 {"experiment", to_string(cfg.kind)},
                 {"config", json::parse(config_echo_json(cfg))},
                 {"results", results},
                 {"wall_time_s", wall}};
  out.report_json = report.dump(2);

  auto report_path = stem;
  report_path += ".json";
  write_text_atomic(report_path, out.report_json + "\n");
  out.files.insert(out.files.begin() + (out.files.empty() ? 0 : 1),
                   report_path);
  return out;
}

}  // namespace spinlock
