// End-to-end checks of the command-line tool: exit codes, determinism of the
// emitted files, exact-mode values, and parse-back through the library's own
// readers. Takes the CLI path as argv[1].

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "entbell/config.hpp"
#include "entbell/io.hpp"

namespace fs = std::filesystem;
using namespace entbell;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? " ok " : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string summary_value(const Summary& s, const std::string& key) {
  for (const auto& [k, v] : s)
    if (k == key) return v;
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_checks <path-to-cli>\n";
    return 1;
  }
  const std::string cli = argv[1];
  const fs::path tmp = fs::temp_directory_path() / "entbell_cli_checks";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  // verify subcommand runs the invariant suite
  {
    const fs::path log = tmp / "verify.log";
    const int status = std::system((cli + " verify > " + log.string() + " 2>&1").c_str());
    check(WEXITSTATUS(status) == 0, "verify exits 0");
    const std::string text = slurp(log);
    check(text.find("critical_visibility=0.707107") != std::string::npos,
          "verify reports the critical visibility");
    check(text.find("lhv_max=2.0") != std::string::npos, "verify reports the classical bound");
  }

  // calibrate succeeds with the defaults
  check(run(cli + " calibrate --out " + (tmp / "cal").string()) == 0, "calibrate exits 0");

  // the configuration committed to the repository stays in sync with the code
  if (argc > 2) {
    check(run(cli + " calibrate --config " + std::string(argv[2]) + " --out " +
              (tmp / "cal_repo").string()) == 0,
          "repository config/default.json passes calibration");
  }

  // calibrate fails against a corrupted frozen configuration
  {
    RunConfig bad;
    bad.qwp_angles_deg = {0.0, 0.0, 0.0, 0.0};
    save_config(tmp / "bad.json", bad);
    check(run(cli + " calibrate --config " + (tmp / "bad.json").string() + " --out " +
              (tmp / "cal_bad").string()) != 0,
          "calibrate exits nonzero for a corrupted configuration");
  }

  // identical (config, seed) produce byte-identical outputs
  {
    RunConfig config;
    config.seed = 777;
    save_config(tmp / "run.json", config);
    const std::string base =
        cli + " --config " + (tmp / "run.json").string();  // placeholder; per-subcommand below
    (void)base;
    for (const char* sub : {"chsh", "fringe", "calibrate"}) {
      const std::string d1 = (tmp / (std::string(sub) + "_1")).string();
      const std::string d2 = (tmp / (std::string(sub) + "_2")).string();
      check(run(cli + " " + sub + " --config " + (tmp / "run.json").string() + " --out " + d1) == 0,
            std::string(sub) + " run 1 exits 0");
      check(run(cli + " " + sub + " --config " + (tmp / "run.json").string() + " --out " + d2) == 0,
            std::string(sub) + " run 2 exits 0");
      bool identical = true;
      for (const auto& entry : fs::directory_iterator(d1)) {
        const fs::path other = fs::path(d2) / entry.path().filename();
        identical = identical && fs::exists(other) && slurp(entry.path()) == slurp(other);
      }
      check(identical && !fs::is_empty(d1), std::string(sub) + " outputs are byte-identical");
    }
  }

  // a different seed changes the sampled outputs
  {
    const std::string d3 = (tmp / "chsh_3").string();
    check(run(cli + " chsh --config " + (tmp / "run.json").string() + " --seed 778 --out " + d3) == 0,
          "chsh with overridden seed exits 0");
    check(slurp(tmp / "chsh_1" / "chsh_counts.csv") != slurp(fs::path(d3) / "chsh_counts.csv"),
          "seed override changes the counts");
  }

  // exact mode, v=1: S = 2*sqrt(2); exact fringe fits to visibility 1
  {
    RunConfig config;
    config.chsh_noise = NoiseConfig{"uniform", 1.0, 1.0, 1.0};
    config.fringe_noise = NoiseConfig{"uniform", 1.0, 1.0, 1.0};
    save_config(tmp / "ideal.json", config);
    const std::string dir = (tmp / "exact").string();
    check(run(cli + " chsh --exact --config " + (tmp / "ideal.json").string() + " --out " + dir) == 0,
          "exact chsh exits 0");
    const Summary s = read_summary(fs::path(dir) / "chsh_summary.txt");
    const double s_value = std::stod(summary_value(s, "s_value"));
    check(std::abs(s_value - 2.8284271247461903) < 1e-9, "exact ideal S equals 2*sqrt(2)");
    check(summary_value(s, "violates_chsh_bound") == "true", "violation flag set");
    check(!summary_value(s, "reference_significance_recomputed").empty(),
          "summary reports the recomputed reference significance");

    check(run(cli + " fringe --exact --config " + (tmp / "ideal.json").string() + " --out " + dir) ==
              0,
          "exact fringe exits 0");
    const Summary f = read_summary(fs::path(dir) / "fringe_summary.txt");
    check(std::abs(std::stod(summary_value(f, "scan_0.visibility_fit")) - 1.0) < 1e-6,
          "exact noiseless fringe visibility is 1");
  }

  // sub-threshold visibility reports no violation
  {
    RunConfig config;
    config.chsh_noise = NoiseConfig{"uniform", 0.5, 1.0, 1.0};
    save_config(tmp / "half.json", config);
    const std::string dir = (tmp / "half").string();
    check(run(cli + " chsh --exact --config " + (tmp / "half.json").string() + " --out " + dir) == 0,
          "v=0.5 chsh exits 0");
    const Summary s = read_summary(fs::path(dir) / "chsh_summary.txt");
    check(std::abs(std::stod(summary_value(s, "s_value")) - 1.4142135623730951) < 1e-9,
          "v=0.5 gives S=sqrt(2)");
    check(summary_value(s, "violates_chsh_bound") == "false", "violation flag cleared below bound");
  }

  // emitted tables parse back through the library reader
  {
    const Table counts = read_csv(tmp / "chsh_1" / "chsh_counts.csv");
    check(counts.columns.size() == 6 && counts.rows.size() == 16, "chsh table has 16 settings rows");
    const Table fringe = read_csv(tmp / "fringe_1" / "fringe_theta2_0.csv");
    check(fringe.columns == std::vector<std::string>{"angle_deg", "counts", "fit_curve"} &&
              fringe.rows.size() == 12,
          "fringe table has the documented columns");
  }

  std::printf("%s\n", g_failures == 0 ? "cli checks passed" : "cli checks FAILED");
  return g_failures;
}
