#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "entbell/experiment.hpp"
#include "entbell/optics.hpp"
#include "entbell/stats.hpp"

// Run configuration. All angles in the file and at the CLI boundary are
// degrees; they are converted to radians at the library boundary. A persisted
// configuration re-run with the same seed yields byte-identical outputs.

namespace entbell {

struct NoiseConfig {
  std::string mode = "uniform";  // "uniform" | "per_basis"
  double visibility = 1.0;
  double visibility_hv = 1.0;
  double visibility_pm = 1.0;

  NoiseModel to_model() const {
    if (mode == "uniform") return NoiseModel::uniform_white(visibility);
    if (mode == "per_basis") return NoiseModel::per_basis(visibility_hv, visibility_pm);
    throw std::invalid_argument("noise mode must be 'uniform' or 'per_basis'");
  }
};

struct RunConfig {
  // preparation (frozen calibration; rediscoverable with the calibrate command)
  std::array<double, 4> qwp_angles_deg{45.0, 45.0, 45.0, 45.0};
  double calibration_phase_deg = 0.0;
  std::string trigger = "H";

  // analyzer convention resolved by the projector/circuit equivalence test
  std::array<double, 2> analyzer_polarizers_deg{45.0, 45.0};

  // noise
  NoiseConfig fringe_noise{"per_basis", 1.0, 0.78, 0.83};
  NoiseConfig chsh_noise{"uniform", 0.87, 1.0, 1.0};

  // counting statistics
  double fringe_mean_total = 4000.0;  // expected counts per scan angle
  double chsh_mean_total = 420.0;     // expected four-fold total per correlation
  double duration_s = 1800.0;

  // angles (degrees)
  double alice_step_deg = 30.0;
  std::vector<double> fringe_theta2_deg{0.0, 22.5};
  std::array<double, 4> chsh_settings_deg{0.0, 45.0, 22.5, 67.5};

  int replicas = 100;
  std::uint64_t seed = 20060512;

  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "summary"};

  PrepSettings prep_settings() const {
    if (trigger != "H" && trigger != "V")
      throw std::invalid_argument("trigger must be 'H' or 'V'");
    PrepSettings s;
    for (std::size_t i = 0; i < 4; ++i) s.qwp_angles[i] = deg_to_rad(qwp_angles_deg[i]);
    s.calibration_phase = deg_to_rad(calibration_phase_deg);
    s.trigger = trigger[0];
    return s;
  }

  AnalyzerConvention analyzer() const {
    return AnalyzerConvention{deg_to_rad(analyzer_polarizers_deg[0]),
                              deg_to_rad(analyzer_polarizers_deg[1])};
  }

  std::vector<double> alice_angles_deg() const {
    if (alice_step_deg <= 0.0) throw std::invalid_argument("alice_step_deg must be positive");
    std::vector<double> out;
    for (double a = 0.0; a < 360.0 - 1e-9; a += alice_step_deg) out.push_back(a);
    return out;
  }

  bool wants_format(const std::string& f) const {
    for (const auto& g : formats)
      if (g == f) return true;
    return false;
  }
};

inline void to_json(nlohmann::json& j, const NoiseConfig& n) {
  j = nlohmann::json{{"mode", n.mode},
                     {"visibility", n.visibility},
                     {"visibility_hv", n.visibility_hv},
                     {"visibility_pm", n.visibility_pm}};
}

inline void from_json(const nlohmann::json& j, NoiseConfig& n) {
  n.mode = j.value("mode", n.mode);
  n.visibility = j.value("visibility", n.visibility);
  n.visibility_hv = j.value("visibility_hv", n.visibility_hv);
  n.visibility_pm = j.value("visibility_pm", n.visibility_pm);
}

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{
      {"preparation",
       {{"qwp_angles_deg", c.qwp_angles_deg},
        {"calibration_phase_deg", c.calibration_phase_deg},
        {"trigger", c.trigger}}},
      {"analyzer", {{"polarizer_angles_deg", c.analyzer_polarizers_deg}}},
      {"noise", {{"fringe", c.fringe_noise}, {"chsh", c.chsh_noise}}},
      {"counts",
       {{"fringe_mean_total", c.fringe_mean_total},
        {"chsh_mean_total", c.chsh_mean_total},
        {"duration_s", c.duration_s}}},
      {"angles",
       {{"alice_step_deg", c.alice_step_deg},
        {"fringe_theta2_deg", c.fringe_theta2_deg},
        {"chsh_settings_deg", c.chsh_settings_deg}}},
      {"replicas", c.replicas},
      {"seed", c.seed},
      {"output", {{"dir", c.out_dir}, {"formats", c.formats}}}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  if (j.contains("preparation")) {
    const auto& p = j.at("preparation");
    if (p.contains("qwp_angles_deg")) p.at("qwp_angles_deg").get_to(c.qwp_angles_deg);
    c.calibration_phase_deg = p.value("calibration_phase_deg", c.calibration_phase_deg);
    c.trigger = p.value("trigger", c.trigger);
  }
  if (j.contains("analyzer") && j.at("analyzer").contains("polarizer_angles_deg"))
    j.at("analyzer").at("polarizer_angles_deg").get_to(c.analyzer_polarizers_deg);
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    if (n.contains("fringe")) n.at("fringe").get_to(c.fringe_noise);
    if (n.contains("chsh")) n.at("chsh").get_to(c.chsh_noise);
  }
  if (j.contains("counts")) {
    const auto& n = j.at("counts");
    c.fringe_mean_total = n.value("fringe_mean_total", c.fringe_mean_total);
    c.chsh_mean_total = n.value("chsh_mean_total", c.chsh_mean_total);
    c.duration_s = n.value("duration_s", c.duration_s);
  }
  if (j.contains("angles")) {
    const auto& a = j.at("angles");
    c.alice_step_deg = a.value("alice_step_deg", c.alice_step_deg);
    if (a.contains("fringe_theta2_deg")) a.at("fringe_theta2_deg").get_to(c.fringe_theta2_deg);
    if (a.contains("chsh_settings_deg")) a.at("chsh_settings_deg").get_to(c.chsh_settings_deg);
  }
  c.replicas = j.value("replicas", c.replicas);
  c.seed = j.value("seed", c.seed);
  if (j.contains("output")) {
    const auto& o = j.at("output");
    c.out_dir = o.value("dir", c.out_dir);
    if (o.contains("formats")) o.at("formats").get_to(c.formats);
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  in >> j;
  return j.get<RunConfig>();
}

inline void save_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << nlohmann::json(config).dump(2) << '\n';
}

}  // namespace entbell
