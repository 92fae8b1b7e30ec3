// qlimit-cli: run, validate and list bundled experiment configurations.
// Links only against the C interface of libqlimit.
//
// Exit codes: 0 all non-vacuous verdicts pass, 2 some verdict failed,
// 1 usage or configuration error.
// QLIMIT_WORKERS overrides the default worker count (logical cores).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qlimit/qlimit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerdict = 2;

const char* verdict_name(int v) {
  switch (v) {
    case 0: return "pass";
    case 1: return "fail";
    case 2: return "vacuous";
  }
  return "?";
}

int config_failure(const std::string& what) {
  std::cerr << "qlimit-cli: " << what << ": " << ql_last_error() << "\n";
  return kExitUsage;
}

ql_config* load(const std::string& path) {
  ql_config* cfg = nullptr;
  if (ql_config_from_file(path.c_str(), &cfg) != QL_OK) return nullptr;
  return cfg;
}

int cmd_validate(const std::string& path) {
  ql_config* cfg = load(path);
  if (!cfg) return config_failure("invalid config " + path);
  ql_status s = ql_config_validate(cfg);
  ql_config_destroy(cfg);
  if (s != QL_OK) return config_failure("invalid config " + path);
  std::cout << path << ": ok\n";
  return kExitOk;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed_opt,
            const std::string& out_dir, std::optional<unsigned> workers_opt) {
  ql_config* cfg = load(path);
  if (!cfg) return config_failure("invalid config " + path);

  std::uint64_t seed = 0;
  if (seed_opt) {
    seed = *seed_opt;
  } else if (!ql_config_seed(cfg, &seed)) {
    ql_config_destroy(cfg);
    std::cerr << "qlimit-cli: no --seed given and the config has no \"seed\" field\n";
    return kExitUsage;
  }
  unsigned workers = workers_opt ? *workers_opt : ql_default_workers();

  auto start = std::chrono::steady_clock::now();
  ql_report* report = nullptr;
  ql_status s = ql_run(cfg, seed, workers, &report);
  ql_config_destroy(cfg);
  if (s != QL_OK) {
    if (s == QL_ERR_CONFIG || s == QL_ERR_INVALID_ARGUMENT || s == QL_ERR_IO)
      return config_failure("cannot run " + path);
    std::cerr << "qlimit-cli: run failed: " << ql_last_error() << "\n";
    return kExitUsage;
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (ql_report_write(report, out_dir.c_str()) != QL_OK) {
    std::cerr << "qlimit-cli: " << ql_last_error() << "\n";
    ql_report_destroy(report);
    return kExitUsage;
  }

  // Runtime facts live here so report.json stays independent of them.
  nlohmann::json manifest = {
      {"config", std::filesystem::absolute(path).string()},
      {"seed", seed},
      {"output_directory", std::filesystem::absolute(out_dir).string()},
      {"workers", workers},
      {"format_version", ql_format_version()},
      {"library_version", ql_version()},
      {"wall_seconds", seconds},
  };
  std::ofstream(std::filesystem::path(out_dir) / "manifest.json") << manifest.dump(2) << "\n";

  std::size_t probes = ql_report_probe_count(report);
  for (std::size_t i = 0; i < probes; ++i)
    std::cout << "probe " << i << ": " << verdict_name(ql_report_probe_verdict(report, i)) << "\n";
  bool passed = ql_report_passed(report) != 0;
  ql_report_destroy(report);
  std::cout << (passed ? "PASS" : "FAIL") << " (" << seconds << " s, " << workers
            << " workers)\n";
  return passed ? kExitOk : kExitVerdict;
}

int cmd_list_presets(const std::string& dump_dir, bool full) {
  std::size_t n = ql_preset_count();
  if (full) {
    nlohmann::json all = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) all.push_back(nlohmann::json::parse(ql_preset_json(i)));
    std::cout << all.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < n; ++i)
      std::cout << ql_preset_name(i) << "\t" << ql_preset_description(i) << "\n";
  }
  if (!dump_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dump_dir, ec);
    if (ec) {
      std::cerr << "qlimit-cli: cannot create " << dump_dir << ": " << ec.message() << "\n";
      return kExitUsage;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::ofstream f(std::filesystem::path(dump_dir) / (std::string(ql_preset_name(i)) + ".json"));
      f << ql_preset_json(i) << "\n";
      if (!f) {
        std::cerr << "qlimit-cli: cannot write preset " << ql_preset_name(i) << "\n";
        return kExitUsage;
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo checks of limit theorems for random shift and impulse channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ql_version()));

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  auto* run = app.add_subcommand("run", "run an experiment and write report.json plus CSVs");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "master seed (defaults to the config's \"seed\")");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--workers", workers, "worker threads (default: $QLIMIT_WORKERS or logical cores)")
      ->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", validate_path, "experiment config (JSON)")->required();

  std::string dump_dir;
  bool full = false;
  auto* list = app.add_subcommand("list-presets", "print the bundled preset configs");
  list->add_option("--dump", dump_dir, "also write each preset to <dir>/<name>.json");
  list->add_flag("--json", full, "print the full config documents as a JSON array");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) return cmd_run(config_path, seed, out_dir, workers);
  if (*validate) return cmd_validate(validate_path);
  if (*list) return cmd_list_presets(dump_dir, full);
  return kExitUsage;
}
