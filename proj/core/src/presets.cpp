#include "spinlock/presets.hpp"

#include <utility>

namespace spinlock {
namespace {

// Rates appear explicitly in every preset so the file doubles as a record
// of the operating point, even where they match the built-in defaults.
constexpr const char* kRates = R"(
  "rates": {
    "gamma_g": {"value": 1.27, "unit": "2pi_kHz"},
    "gamma_d": {"value": 7.33, "unit": "2pi_kHz"},
    "gamma_z": {"value": 4.42, "unit": "2pi_kHz"}
  })";

const std::pair<const char*, std::string> kPresets[] = {
    {"fig2", std::string(R"({
  "experiment": "sync",)") + kRates + R"(,
  "drive": {
    "epsilon": {"value": 2.37, "unit": "2pi_kHz"},
    "delta": {"value": 0.0, "unit": "2pi_kHz"},
    "varphi": {"value": 0.5, "unit": "pi"}
  },
  "initial": "excited",
  "stages": {"stage1": {"value": 200, "unit": "us"},
             "stage2": {"value": 200, "unit": "us"}},
  "grid": {"n_theta": 121, "n_phi": 241},
  "profile_points": 721,
  "out": "fig2"
})"},
    {"fig3c", std::string(R"({
  "experiment": "bandwidth",)") + kRates + R"(,
  "bandwidth": {
    "epsilon": {"value": 1.87, "unit": "gamma_g"},
    "delta": {"min": {"value": -25, "unit": "gamma_g"},
              "max": {"value": 25, "unit": "gamma_g"},
              "count": 201}
  },
  "out": "fig3c"
})"},
    {"fig3d", std::string(R"({
  "experiment": "tongue",)") + kRates + R"(,
  "tongue": {
    "delta": {"min": {"value": -25, "unit": "gamma_g"},
              "max": {"value": 25, "unit": "gamma_g"},
              "count": 101},
    "epsilon": {"min": {"value": 0.1, "unit": "gamma_g"},
                "max": {"value": 6.0, "unit": "gamma_g"},
                "count": 60}
  },
  "out": "fig3d"
})"},
    {"fig4a", std::string(R"({
  "experiment": "deform",)") + kRates + R"(,
  "deform": {
    "epsilon": {"min": {"value": 0.5, "unit": "gamma_g"},
                "max": {"value": 50, "unit": "gamma_g"},
                "count": 100}
  },
  "out": "fig4a"
})"},
    {"fig4b", std::string(R"({
  "experiment": "deform",)") + kRates + R"(,
  "deform": {
    "epsilon": {"min": {"value": 0.25, "unit": "gamma_g"},
                "max": {"value": 25, "unit": "gamma_g"},
                "count": 100}
  },
  "out": "fig4b"
})"},
    {"fig4c", std::string(R"({
  "experiment": "forced",)") + kRates + R"(,
  "forced": {
    "epsilons": [{"value": 1.87, "unit": "gamma_g"},
                 {"value": 3.75, "unit": "gamma_g"},
                 {"value": 28.7, "unit": "gamma_g"}]
  },
  "initial": "limit_cycle",
  "duration": {"value": 400, "unit": "us"},
  "out": "fig4c"
})"},
    {"figS2", std::string(R"({
  "experiment": "ratefit",)") + kRates + R"(,
  "measure": {"shots": 500, "spam_error": 0.007},
  "ratefit": {"points": 30},
  "seed": 1,
  "out": "figS2"
})"},
    {"figS5", std::string(R"({
  "experiment": "labframe",)") + kRates + R"(,
  "drive": {
    "epsilon": {"value": 2.37, "unit": "2pi_kHz"},
    "varphi": {"value": 0.5, "unit": "pi"}
  },
  "initial": "plus",
  "labframe": {
    "omega_q": {"value": 10, "unit": "2pi_MHz"},
    "sample_dt": {"value": 2, "unit": "ns"},
    "duration": {"value": 2000, "unit": "us"},
    "drive_start": {"value": 200, "unit": "us"},
    "offsets": [{"value": 0, "unit": "gamma_g"},
                {"value": -5, "unit": "gamma_g"},
                {"value": 10, "unit": "gamma_g"}]
  },
  "out": "figS5"
})"},
    {"figS6", std::string(R"({
  "experiment": "labframe",)") + kRates + R"(,
  "drive": {
    "epsilon": {"value": 2.37, "unit": "2pi_kHz"},
    "varphi": {"value": 0.5, "unit": "pi"}
  },
  "initial": "plus",
  "labframe": {
    "omega_q": {"value": 10, "unit": "2pi_MHz"},
    "sample_dt": {"value": 2, "unit": "ns"},
    "duration": {"value": 2000, "unit": "us"},
    "drive_start": {"value": 200, "unit": "us"},
    "offsets": [{"value": 0, "unit": "gamma_g"},
                {"value": -5, "unit": "gamma_g"},
                {"value": 10, "unit": "gamma_g"}],
    "window": [{"value": 300, "unit": "us"}, {"value": 2000, "unit": "us"}],
    "spectrum_band": {"value": 50, "unit": "gamma_g"}
  },
  "out": "figS6"
})"},
};

}  // namespace

const char* preset_json(const std::string& name) {
  for (const auto& [key, text] : kPresets) {
    if (name == key) return text.c_str();
  }
  return nullptr;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [key, text] : kPresets) names.emplace_back(key);
  return names;
}

}  // namespace spinlock
