#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const int st = std::system((std::string(FRAGGEN_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path tmp(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fraggen-cli-" + std::to_string(getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("bogus"), 1);
  EXPECT_EQ(run("train"), 1);
  EXPECT_EQ(run("ingest --out x"), 1);
}

TEST(Cli, HelpOnEverySubcommand) {
  EXPECT_EQ(run("--help"), 0);
  for (const char* sub : {"ingest", "train", "generate", "fuzz", "stats", "replay"}) {
    EXPECT_EQ(run(std::string(sub) + " --help"), 0) << sub;
  }
}

TEST(Cli, RuntimeFailureExitsTwo) {
  EXPECT_EQ(run("train --store " + tmp("missing").string()), 2);
}

TEST(Cli, IngestTrainGenerateFuzz) {
  const auto store = tmp("store");
  ASSERT_EQ(run("ingest --fixtures " + fraggen::testing::fixture_dir("toy").string() + " --out " +
                store.string() + " --min-freq 1"),
            0);
  EXPECT_TRUE(fs::exists(store / "vocab.jsonl"));
  EXPECT_TRUE(fs::exists(store / "sequences.jsonl"));
  EXPECT_EQ(std::distance(fs::directory_iterator(store / "seeds"), fs::directory_iterator{}), 20);

  ASSERT_EQ(run("train --store " + store.string() + " --epochs 2 --seed 7"), 0);
  ASSERT_TRUE(fs::exists(store / "model.ckpt"));

  const auto gen = tmp("gen");
  ASSERT_EQ(run("generate --store " + store.string() + " --checkpoint " +
                (store / "model.ckpt").string() + " --count 5 --out " + gen.string()),
            0);

  const auto camp = tmp("camp");
  const auto cfg = tmp("camp.json");
  std::ofstream(cfg) << nlohmann::json{
      {"engine", {{"binary", FRAGGEN_STUB_ENGINE}, {"args", {"segv", "{test}"}}}},
      {"store", store.string()},
      {"suggester", "markov"},
      {"budget", {{"tests", 10}}},
      {"out", camp.string()}}.dump();
  ASSERT_EQ(run("fuzz --config " + cfg.string()), 0);
  auto stats = nlohmann::json::parse(fraggen::testing::read_file(camp / "stats.json"));
  EXPECT_GT(stats["unique_crashes"].get<int>(), 0);
  EXPECT_EQ(run("stats --campaign " + camp.string()), 0);
  const auto crash = fs::directory_iterator(camp / "crashes")->path();
  EXPECT_EQ(run("replay --crash " + crash.string() + " --config " + cfg.string()), 0);
}

}  // namespace
