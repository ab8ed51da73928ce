#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "rram/harness/io.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
};

Result sh(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return {-1, ""};
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("simcmd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    rram::harness::write_file_atomic(p, text);
    return p.string();
  }

  fs::path dir_;
  const std::string bin_ = SIMCMD_PATH;
};

constexpr const char* kSmall =
    R"({"kind": "bec_iterations", "seed": 5, "cells": 200})";

TEST_F(Cli, RunWritesCsvAndSummary) {
  const auto cfg = write("c.json", kSmall);
  const auto r = sh(bin_ + " run " + cfg + " --out " + (dir_ / "o").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "o" / "bec_iterations.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "o" / "bec_iterations.summary.json"));
}

TEST_F(Cli, WorkersDoNotChangeBytes) {
  const auto cfg = write("c.json", kSmall);
  ASSERT_EQ(sh(bin_ + " run " + cfg + " --workers 1 --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(sh(bin_ + " run " + cfg + " --workers 4 --out " + (dir_ / "b").string()).code, 0);
  EXPECT_EQ(rram::harness::read_file(dir_ / "a" / "bec_iterations.csv"),
            rram::harness::read_file(dir_ / "b" / "bec_iterations.csv"));
}

TEST_F(Cli, EnvironmentSetsDefaultOutput) {
  const auto cfg = write("c.json", kSmall);
  const auto r = sh("SIMCMD_OUT=" + (dir_ / "env").string() + " " + bin_ + " run " + cfg);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "env" / "bec_iterations.csv"));
}

TEST_F(Cli, SeedFlagSuppliesMissingSeed) {
  const auto cfg = write("c.json", R"({"kind": "bec_iterations", "cells": 100})");
  EXPECT_EQ(sh(bin_ + " run " + cfg + " --out " + dir_.string()).code, 2);
  EXPECT_EQ(sh(bin_ + " run " + cfg + " --seed 3 --out " + dir_.string()).code, 0);
}

TEST_F(Cli, ValidateNamesTheField) {
  const auto bad = write("bad.json", R"({"kind": "adder", "seed": 1, "trials": 0})");
  const auto r = sh(bin_ + " validate " + bad);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("trials"), std::string::npos) << r.out;
  const auto good = write("good.json", kSmall);
  EXPECT_EQ(sh(bin_ + " validate " + good).code, 0);
}

TEST_F(Cli, MalformedJsonAndMissingFile) {
  const auto broken = write("broken.json", "{ not json");
  EXPECT_EQ(sh(bin_ + " validate " + broken).code, 2);
  EXPECT_EQ(sh(bin_ + " run " + (dir_ / "absent.json").string()).code, 3);
}

TEST_F(Cli, UnwritableOutputIsAnIoError) {
  const auto cfg = write("c.json", kSmall);
  write("file", "x");
  const auto r = sh(bin_ + " run " + cfg + " --out " + (dir_ / "file" / "sub").string());
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST_F(Cli, PresetsListsAllThree) {
  const auto r = sh(bin_ + " presets");
  EXPECT_EQ(r.code, 0);
  for (const char* name : {"defaults.calibrated", "defaults.noiseless", "defaults.stress"})
    EXPECT_NE(r.out.find(name), std::string::npos);
}

}  // namespace
