#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entbell/harness.hpp"

// Command-line front end: calibrate, fringe, chsh, verify.
// Angles are degrees at this boundary and radians inside the library.

namespace {

namespace fs = std::filesystem;
using namespace entbell;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool exact = false;
  std::string out_dir;
  std::vector<std::string> formats;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (JSON)");
  cmd->add_option("--seed", args.seed, "override the configured base seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_flag("--exact", args.exact, "analytic probabilities, no sampling");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--format", args.formats, "output formats (csv, summary)")
      ->check(CLI::IsMember({"csv", "summary"}));
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig config = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
  if (args.seed_set) config.seed = args.seed;
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (!args.formats.empty()) config.formats = args.formats;
  return config;
}

fs::path ensure_out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string scan_file_stem(double theta2_deg) {
  std::string s = "fringe_theta2_" + format_double(theta2_deg);
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

int cmd_calibrate(const CommonArgs& args) {
  const RunConfig config = resolve_config(args);
  const CalibrationReport report = run_calibration(config);
  const Summary summary = calibration_summary(report);
  for (const auto& [k, v] : summary) std::cout << k << '=' << v << '\n';
  if (config.wants_format("summary")) {
    const fs::path dir = ensure_out_dir(config);
    write_summary(dir / "calibration.txt", summary);
  }
  return report.ok() ? 0 : 1;
}

int cmd_fringe(const CommonArgs& args) {
  const RunConfig config = resolve_config(args);
  const auto scans = run_fringe(config, args.exact);
  const fs::path dir = ensure_out_dir(config);
  if (config.wants_format("csv"))
    for (const auto& scan : scans)
      write_csv(dir / (scan_file_stem(scan.theta2_deg) + ".csv"), fringe_table(scan));
  const Summary summary = fringe_summary(scans, config, args.exact);
  if (config.wants_format("summary")) write_summary(dir / "fringe_summary.txt", summary);
  for (const auto& scan : scans)
    std::cout << "theta2=" << scan.theta2_deg << " deg: visibility " << scan.visibility_mean
              << " +- " << scan.visibility_std << " (" << (args.exact ? "exact" : "sampled")
              << ")\n";
  return 0;
}

int cmd_chsh(const CommonArgs& args) {
  const RunConfig config = resolve_config(args);
  const ChshRun run = run_chsh(config, args.exact, config.seed);
  const fs::path dir = ensure_out_dir(config);
  if (config.wants_format("csv")) write_csv(dir / "chsh_counts.csv", chsh_table(run));
  const Summary summary = chsh_summary(run, config);
  if (config.wants_format("summary")) write_summary(dir / "chsh_summary.txt", summary);
  std::cout << "S = " << run.result.s_value << " +- " << run.result.s_sigma
            << "  (" << run.result.sigmas_of_violation << " sigma above the classical bound, "
            << (run.result.violates_lhv_bound() ? "violation" : "no violation") << ")\n";
  return 0;
}

int cmd_verify(const CommonArgs& args) {
  const RunConfig config = resolve_config(args);
  const auto checks = run_verify();
  bool all_ok = true;
  Summary lines;
  for (const auto& c : checks) {
    all_ok = all_ok && c.pass;
    std::cout << (c.pass ? "[ OK ] " : "[FAIL] ") << c.name << "  " << c.detail << '\n';
    lines.emplace_back(c.name, std::string(c.pass ? "ok " : "fail ") + c.detail);
  }
  std::cout << (all_ok ? "all checks passed" : "some checks FAILED") << '\n';
  if (!args.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(config);
    write_summary(dir / "verify.txt", lines);
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-photon Bell test simulator: polarization qubit vs entangled-state analyzer"};
  app.require_subcommand(1);

  CommonArgs calibrate_args, fringe_args, chsh_args, verify_args;
  auto* calibrate = app.add_subcommand("calibrate", "discover and check the preparation settings");
  attach_common(calibrate, calibrate_args);
  auto* fringe = app.add_subcommand("fringe", "coincidence fringes versus Alice's angle");
  attach_common(fringe, fringe_args);
  auto* chsh = app.add_subcommand("chsh", "simulate the four-correlation CHSH experiment");
  attach_common(chsh, chsh_args);
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  attach_common(verify, verify_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (calibrate->parsed()) return cmd_calibrate(calibrate_args);
    if (fringe->parsed()) return cmd_fringe(fringe_args);
    if (chsh->parsed()) return cmd_chsh(chsh_args);
    if (verify->parsed()) return cmd_verify(verify_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
