// hocm: simulate scenarios, sweep xi, detect thresholds and run verification.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "hocm/emit.hpp"
#include "hocm/scan.hpp"
#include "hocm/scenario.hpp"
#include "hocm/verify.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

hocm::ScenarioConfig pick(const std::string& config, const std::string& builtin) {
  if (!config.empty() && !builtin.empty()) throw hocm::ConfigError("give either --config or --builtin, not both");
  if (!config.empty()) return hocm::load_config(config);
  if (!builtin.empty()) return hocm::builtin_scenario(builtin);
  throw hocm::ConfigError("one of --config or --builtin is required");
}

void progress(bool quiet, const std::string& msg) {
  if (!quiet) std::fprintf(stderr, "[hocm] %s\n", msg.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order covariance matrices and partial-transpose criteria for multimode nonlinear states"};
  app.require_subcommand(1);

  std::string config, builtin, out_dir = ".", format = "csv";
  int threads = 0;
  bool quiet = false, fast = false, no_refine = false, json_report = false;

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", format, "csv, json or svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}))
        ->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (0: config or hardware)");
    sub->add_flag("--no-refine", no_refine, "Report grid brackets without bisection");
    sub->add_flag("-q,--quiet", quiet, "No progress on stderr");
  };

  auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
  simulate->add_option("--config", config, "Scenario JSON file")->required();
  add_run_options(simulate);

  auto* scan = app.add_subcommand("scan", "Run a built-in scenario (or a config file)");
  scan->add_option("--builtin", builtin, "Built-in scenario name");
  scan->add_option("--config", config, "Scenario JSON file");
  add_run_options(scan);

  auto* verify = app.add_subcommand("verify", "Oracle, convergence, invariant and convention checks");
  verify->add_option("--builtin", builtin, "Built-in scenario name");
  verify->add_option("--config", config, "Scenario JSON file");
  verify->add_flag("--fast", fast, "Thin xi grid, skip the cutoff-doubling check");
  verify->add_option("--threads", threads, "Worker threads");
  verify->add_flag("--json", json_report, "Print the report as JSON");
  verify->add_flag("-q,--quiet", quiet, "No progress on stderr");

  auto* list = app.add_subcommand("list-builtins", "List built-in scenarios");
  auto* show = app.add_subcommand("show-config", "Print a built-in scenario as JSON");
  show->add_option("name", builtin, "Built-in scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& n : hocm::builtin_names()) std::cout << n << '\n';
      return 0;
    }
    if (show->parsed()) {
      std::cout << hocm::config_to_json(hocm::builtin_scenario(builtin)).dump(2) << '\n';
      return 0;
    }
    if (verify->parsed()) {
      const auto cfg = pick(config, builtin);
      hocm::VerifyOptions opt;
      opt.fast = fast;
      opt.threads = threads;
      opt.progress = [&](const std::string& m) { progress(quiet, m); };
      const auto report = hocm::verify(cfg, opt);
      if (json_report) {
        std::cout << hocm::report_to_json(report).dump(2) << '\n';
      } else {
        for (const auto& c : report.checks)
          std::cout << (c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL") << ' ' << c.name << ": "
                    << c.detail << '\n';
        std::cout << (report.passed() ? "verification passed" : "verification FAILED") << '\n';
      }
      return report.passed() ? 0 : kExitVerify;
    }
    const auto cfg = simulate->parsed() ? hocm::load_config(config) : pick(config, builtin);
    hocm::ScanOptions opt;
    opt.threads = threads;
    opt.refine = !no_refine;
    opt.progress = [&](const std::string& m) { progress(quiet, m); };
    const auto result = hocm::run_scan(cfg, opt);
    for (const auto& path : hocm::emit(result, out_dir, hocm::parse_format(format)))
      progress(quiet, "wrote " + path);
    for (const auto& c : result.crossings)
      progress(quiet, c.vector + " " + c.bipartition + " crosses at xi = " + hocm::format_number(c.xi) +
                          " (" + c.direction + ")");
    return 0;
  } catch (const hocm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
