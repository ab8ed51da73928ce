// simcmd: run and validate RRAM simulation experiments.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rram/harness/config.hpp"
#include "rram/harness/experiments.hpp"
#include "rram/harness/io.hpp"

namespace {

namespace fs = std::filesystem;
using rram::harness::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

constexpr const char* kOutEnv = "SIMCMD_OUT";

struct LoadError {
  int code;
};

rram::harness::ParsedConfig load(const std::string& path) {
  std::string text;
  try {
    text = rram::harness::read_file(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    throw LoadError{kExitIo};
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::cerr << path << ": invalid JSON: " << e.what() << "\n";
    throw LoadError{kExitInvalid};
  }
  return rram::harness::parse_config(j);
}

void report(const std::string& path,
            const rram::harness::ParsedConfig& parsed) {
  for (const auto& v : parsed.violations)
    std::cerr << path << ": " << v << "\n";
}

fs::path output_dir(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return "out";
}

int cmd_validate(const std::string& path) {
  const auto parsed = load(path);
  if (!parsed.ok()) {
    report(path, parsed);
    return kExitInvalid;
  }
  std::cout << path << ": ok (" << parsed.config.kind_name << ")\n";
  return kExitOk;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            const std::string& out_flag, unsigned workers) {
  auto parsed = load(path);
  auto& cfg = parsed.config;
  if (seed) {
    cfg.seed = seed;
    std::erase_if(parsed.violations, [](const std::string& v) {
      return v.rfind("seed:", 0) == 0;
    });
  }
  if (!parsed.ok()) {
    report(path, parsed);
    return kExitInvalid;
  }
  const fs::path dir = output_dir(out_flag, cfg.output);
  std::optional<rram::harness::ExperimentResult> result;
  try {
    result.emplace(rram::harness::run(cfg, workers));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  try {
    const auto paths = rram::harness::write_result(*result, dir);
    std::cout << paths.csv.string() << "\n" << paths.summary.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_presets() {
  for (const auto& [name, body] : rram::harness::presets())
    std::cout << name << "\n" << body.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RRAM crossbar simulator"};
  app.require_subcommand(1);

  std::string run_config;
  std::uint64_t seed_value = 0;
  std::string out_dir;
  unsigned workers = 1;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", run_config, "Experiment config (JSON)")
      ->required();
  auto* seed_opt =
      run->add_option("--seed", seed_value, "Override the config seed");
  run->add_option("--out", out_dir,
                  std::string("Output directory (default: config 'output', "
                              "then $") + kOutEnv + ", then ./out)");
  run->add_option("--workers", workers, "Worker threads")
      ->check(CLI::Range(1u, 1024u));

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Check a config without running");
  validate->add_option("config", validate_config, "Experiment config (JSON)")
      ->required();

  auto* presets = app.add_subcommand("presets", "List parameter presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::optional<std::uint64_t> seed;
      if (*seed_opt) seed = seed_value;
      return cmd_run(run_config, seed, out_dir, workers);
    }
    if (*validate) return cmd_validate(validate_config);
    if (*presets) return cmd_presets();
  } catch (const LoadError& e) {
    return e.code;
  }
  return kExitOk;
}
