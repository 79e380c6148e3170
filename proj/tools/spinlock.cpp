#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spinlock/config.hpp"
#include "spinlock/errors.hpp"
#include "spinlock/presets.hpp"
#include "spinlock/runner.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string preset;
  std::string out;
  int workers = -1;
  long long seed = -1;
  bool echo = false;
};

int run(spinlock::ExperimentKind kind, const CliOptions& opt) {
  using namespace spinlock;

  std::optional<ExperimentConfig> cfg;
  if (!opt.preset.empty()) {
    const char* text = preset_json(opt.preset);
    if (text == nullptr) {
      std::string names;
      for (const auto& n : preset_names()) {
        names += names.empty() ? n : ", " + n;
      }
      throw ConfigError("unknown preset '" + opt.preset + "' (available: " +
                        names + ")");
    }
    cfg = parse_config_text(text, "preset:" + opt.preset, kind);
  }
  if (!opt.config_path.empty()) {
    // An explicit config wins over the preset wholesale; presets are
    // complete files, not patch bases.
    cfg = parse_config(opt.config_path, kind);
  }
  if (!cfg) cfg = default_config(kind);

  if (!opt.out.empty()) cfg->out = opt.out;
  if (opt.workers >= 0) cfg->workers = opt.workers;
  if (opt.seed >= 0) {
    cfg->seed = static_cast<std::uint64_t>(opt.seed);
    cfg->measure.seed = cfg->seed;
  }

  if (opt.echo) {
    std::printf("%s\n", config_echo_json(*cfg).c_str());
    return 0;
  }

  const RunArtifacts artifacts = run_experiment(*cfg);
  for (const auto& f : artifacts.files) {
    std::printf("wrote %s\n", f.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipative-qubit synchronization simulator"};
  app.require_subcommand(1);

  static constexpr const char* kKinds[] = {
      "relax",      "sync",     "qgrid",    "sprofile",
      "tongue",     "bandwidth", "deform",  "forced",
      "eightlevel", "labframe",  "ratefit", "tomography"};
  static constexpr const char* kBlurbs[] = {
      "undriven relaxation toward the limit cycle",
      "two-stage timeline: free relaxation, then the drive",
      "Husimi Q distribution of a state",
      "phase distribution S and its first harmonic",
      "Max[S] over a detuning x strength grid",
      "Max[S] versus detuning at fixed strength",
      "synchronized-state deformation versus strength",
      "step response to a suddenly applied drive",
      "eight-level model versus the effective qubit",
      "lab-frame evolution and entrainment spectra",
      "decay-rate extraction from simulated readout",
      "Bloch-vector tomography from analysis pulses"};

  CliOptions opt;
  for (std::size_t i = 0; i < std::size(kKinds); ++i) {
    CLI::App* sub = app.add_subcommand(kKinds[i], kBlurbs[i]);
    // No ExistingFile check: parse_config reports unreadable paths as a
    // ConfigError so they exit with the config-error code, not CLI11's.
    sub->add_option("--config", opt.config_path, "JSON configuration file");
    sub->add_option("--preset", opt.preset, "built-in configuration name");
    sub->add_option("--out", opt.out, "output stem (files get .csv/.json)");
    sub->add_option("--workers", opt.workers, "worker threads (0 = auto)");
    sub->add_option("--seed", opt.seed, "measurement RNG seed");
    sub->add_flag("--echo", opt.echo,
                  "print the resolved configuration and exit");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run(spinlock::experiment_kind_from(name), opt);
  } catch (const spinlock::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const spinlock::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
