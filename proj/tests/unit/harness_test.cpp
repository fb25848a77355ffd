#include <gtest/gtest.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "fraggen/errors.hpp"
#include "fraggen/harness/campaign.hpp"
#include "fraggen/harness/engine.hpp"
#include "support/fixtures.hpp"

namespace fraggen::harness {
namespace {

namespace fs = std::filesystem;

EngineConfig stub(const std::string& mode, double timeout = 5.0) {
  EngineConfig c;
  c.binary = FRAGGEN_STUB_ENGINE;
  c.args = {mode, "{test}"};
  c.timeout_seconds = timeout;
  return c;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fraggen-harness-" + std::to_string(getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Classification run(const EngineConfig& c, const std::string& src = ";") {
  return classify(execute(c, src, scratch("run")), c);
}

TEST(Execute, ExitStatusAndSignals) {
  auto ok = execute(stub("ok"), ";", scratch("x"));
  ASSERT_TRUE(ok.exit_code);
  EXPECT_EQ(*ok.exit_code, 0);
  EXPECT_FALSE(ok.signal);
  EXPECT_FALSE(ok.timed_out);

  auto segv = execute(stub("segv"), ";", scratch("x"));
  ASSERT_TRUE(segv.signal);
  EXPECT_EQ(*segv.signal, SIGSEGV);
  EXPECT_FALSE(segv.exit_code);
  EXPECT_NE(segv.stderr_text.find("fatal in a"), std::string::npos);
}

TEST(Execute, WritesTheSourceToTheScratchFile) {
  const auto dir = scratch("src");
  execute(stub("ok"), "var v0 = 1;", dir);
  EXPECT_EQ(testing::read_file(dir / "test.js"), "var v0 = 1;");
}

TEST(Execute, TimeoutKillsWithinBound) {
  const auto t0 = std::chrono::steady_clock::now();
  auto o = execute(stub("sleep", 0.5), ";", scratch("x"));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_TRUE(o.timed_out);
  EXPECT_FALSE(o.exit_code);
  EXPECT_FALSE(o.signal);
  EXPECT_LT(wall, 1.5);
  EXPECT_GE(wall, 0.5);
}

TEST(Execute, StderrIsCapped) {
  EngineConfig c;
  c.binary = "/bin/sh";
  c.args = {"-c", "head -c 200000 /dev/zero | tr '\\0' x >&2; exit 1"};
  auto o = execute(c, ";", scratch("x"));
  EXPECT_EQ(o.stderr_text.size(), kStderrCap);
  ASSERT_TRUE(o.exit_code);
  EXPECT_EQ(*o.exit_code, 1);
}

TEST(Execute, MissingBinaryIsUnavailable) {
  EngineConfig c;
  c.binary = "/nonexistent/engine";
  EXPECT_THROW(execute(c, ";", scratch("x")), EngineUnavailable);
  EXPECT_THROW(c.validate(), EngineUnavailable);
}

TEST(Classify, AllFiveClasses) {
  EXPECT_EQ(run(stub("ok")).kind, OutcomeClass::Pass);
  EXPECT_EQ(run(stub("error")), (Classification{OutcomeClass::RuntimeError, "TypeError"}));
  EXPECT_EQ(run(stub("exit")).kind, OutcomeClass::Other);
  EXPECT_EQ(run(stub("segv")), (Classification{OutcomeClass::Crash, "SIGSEGV"}));
  EXPECT_EQ(run(stub("ill")), (Classification{OutcomeClass::Crash, "SIGILL"}));
  EXPECT_EQ(run(stub("abort")), (Classification{OutcomeClass::Other, "SIGABRT"}));
  EXPECT_EQ(run(stub("sleep", 0.3)).kind, OutcomeClass::Timeout);
}

TEST(Classify, PatternsAreOverridable) {
  auto c = stub("error");
  c.error_patterns = {"RangeError"};
  EXPECT_EQ(run(c).kind, OutcomeClass::Other);
  ExecutionOutcome o;
  o.exit_code = 1;
  o.stderr_text = "Uncaught TypeError: wrapped RangeError";
  EXPECT_EQ(classify(o, stub("ok")).detail, "TypeError");
}

TEST(DedupKey, StderrHash) {
  const auto dir = scratch("k");
  auto c = stub("segv");
  auto a = execute(c, ";", dir);
  auto b = execute(c, ";", dir);
  auto other = execute(stub("segv-b"), ";", dir);
  const auto ka = dedup_key(a, c, dir / "test.js");
  EXPECT_EQ(ka, dedup_key(b, c, dir / "test.js"));
  EXPECT_NE(ka, dedup_key(other, c, dir / "test.js"));
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64("stderr:stub engine: fatal in a")));
  EXPECT_EQ(ka, std::string("SIGSEGV-") + hex);
}

TEST(DedupKey, ExtractorFrameAndFallback) {
  const auto dir = scratch("k");
  auto c = stub("content");
  c.extractor = {"{binary}", "frame", "{test}"};
  // stderr carries the pid, so only the extractor makes repeat runs agree.
  auto a = execute(c, "// crash:x\n;", dir);
  const auto ka = dedup_key(a, c, dir / "test.js");
  auto b = execute(c, "// crash:x\n;", dir);
  EXPECT_EQ(ka, dedup_key(b, c, dir / "test.js"));
  auto d = execute(c, "// crash:y\n;", dir);
  EXPECT_NE(ka, dedup_key(d, c, dir / "test.js"));

  auto broken = c;
  broken.extractor = {"/nonexistent/extractor"};
  EXPECT_NE(dedup_key(a, broken, dir / "test.js"), dedup_key(b, broken, dir / "test.js"));
}

TEST(CrashStore, InsertIfAbsentUnderContention) {
  const auto dir = scratch("store");
  CrashStore store(dir);
  std::atomic<int> fresh{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        CrashRecord r;
        r.key = i % 2 ? "SIGSEGV-1" : "SIGILL-2";
        r.signal = "SIGSEGV";
        r.source = "t" + std::to_string(t);
        if (store.insert_if_absent(r, "err")) ++fresh;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(fresh.load(), 2);
  EXPECT_EQ(store.unique(), 2u);
  std::uint64_t hits = 0;
  for (const auto& r : store.records()) hits += r.hits;
  EXPECT_EQ(hits, 100u);

  auto loaded = CrashStore::load(dir / "SIGSEGV-1");
  EXPECT_EQ(loaded.hits, 48u);
  EXPECT_TRUE(fs::exists(dir / "SIGSEGV-1" / "stderr.txt"));
  CrashStore reopened(dir);
  EXPECT_EQ(reopened.unique(), 2u);
}

TEST(PassRate, Fractions) {
  const auto dir = scratch("pr");
  auto c = stub("content");
  EXPECT_DOUBLE_EQ(pass_rate(c, {";", ";"}, dir), 1.0);
  EXPECT_DOUBLE_EQ(pass_rate(c, {"// error\nv9.q.q;", ";", "// error", ";"}, dir), 0.5);
  EXPECT_THROW(pass_rate(c, {}, dir), ConfigError);
}

TEST(EngineConfig, JsonRoundTrip) {
  auto c = stub("ok", 2.5);
  c.env = {{"A", "1"}};
  auto back = EngineConfig::from_json(c.to_json());
  EXPECT_EQ(back.binary, c.binary);
  EXPECT_EQ(back.args, c.args);
  EXPECT_EQ(back.timeout_seconds, 2.5);
  EXPECT_EQ(back.env, c.env);
  EXPECT_THROW(EngineConfig::from_json({{"args", {"x"}}}), ConfigError);
}

struct CampaignFixture : ::testing::Test {
  static void SetUpTestSuite() {
    std::vector<fragmenter::FragmentSequence> seqs;
    auto asts = testing::load_fixtures("corpus", 60);
    for (const auto& a : asts) seqs.push_back(fragmenter::fragmentize(a));
    vocab = new fragmenter::Vocabulary(fragmenter::build_vocabulary(seqs, {.min_freq = 1}).vocab);
    seeds = new std::vector<generator::Seed>;
    for (auto& a : asts) seeds->push_back(generator::make_seed(std::move(a), *vocab));
    suggester = new suggest::RandomSuggester(vocab->size());
  }
  static void TearDownTestSuite() {
    delete suggester;
    delete seeds;
    delete vocab;
  }

  TestFactory factory(bool resolve, std::uint64_t seed = 11) const {
    generator::GenerationParams p;
    p.f_max = 30;
    p.k_top = 8;
    return TestFactory(*seeds, *suggester, *vocab, p, resolve,
                       normalizer::BuiltinRegistry::for_engine("node"),
                       resolver::UsageHints::defaults(), seed);
  }

  static inline fragmenter::Vocabulary* vocab = nullptr;
  static inline std::vector<generator::Seed>* seeds = nullptr;
  static inline suggest::RandomSuggester* suggester = nullptr;
};

TEST_F(CampaignFixture, CrashStubDedupsToOneRecord) {
  CampaignOptions o;
  o.engine = stub("segv");
  o.budget.tests = 100;
  o.out_dir = scratch("camp");
  auto f = factory(true);
  auto stats = run_campaign(f, o);
  EXPECT_EQ(stats.executed + stats.generation_failures, 100u);
  EXPECT_EQ(stats.crash, stats.executed);
  EXPECT_EQ(stats.unique_crashes, 1u);
  EXPECT_EQ(CrashStore(o.out_dir / "crashes").records().at(0).hits, stats.crash);

  auto saved = CampaignStats::from_json(
      nlohmann::json::parse(testing::read_file(o.out_dir / "stats.json")));
  EXPECT_EQ(saved.unique_crashes, 1u);
  EXPECT_EQ(saved.executed, stats.executed);
  std::ifstream ev(o.out_dir / "events.jsonl");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(ev, line)) ++lines;
  EXPECT_EQ(lines, 100u);
}

TEST_F(CampaignFixture, StreamIndependentOfWorkerCount) {
  auto f = factory(true);
  CampaignOptions o;
  o.engine = stub("ok");
  o.budget.tests = 24;
  o.keep_tests = true;
  const auto w1 = scratch("w1");
  const auto w3 = scratch("w3");
  o.out_dir = w1;
  run_campaign(f, o);
  o.out_dir = w3;
  o.workers = 3;
  run_campaign(f, o);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(w1 / "tests")) {
    EXPECT_EQ(testing::read_file(e.path()),
              testing::read_file(w3 / "tests" / e.path().filename()));
    ++compared;
  }
  EXPECT_GT(compared, 20u);
  for (std::uint64_t i = 0; i < 5; ++i) {
    auto a = f.make(i);
    auto b = f.make(i);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_EQ(a->source, b->source);
  }
}

TEST_F(CampaignFixture, UnavailableEngineAbortsWithStats) {
  auto f = factory(false);
  CampaignOptions o;
  o.engine.binary = "/nonexistent";
  o.budget.tests = 5;
  o.out_dir = scratch("gone");
  EXPECT_THROW(run_campaign(f, o), EngineUnavailable);

  // Executable at start, then gone: partial stats still land on disk.
  const auto bin = o.out_dir / "engine.sh";
  {
    std::ofstream s(bin);
    s << "#!/bin/sh\nrm -f \"$0\"\nexit 0\n";
  }
  fs::permissions(bin, fs::perms::owner_all);
  o.engine.binary = bin.string();
  o.engine.args = {"{test}"};
  o.budget.tests = 10;
  EXPECT_THROW(run_campaign(f, o), EngineUnavailable);
  auto saved = nlohmann::json::parse(testing::read_file(o.out_dir / "stats.json"));
  EXPECT_TRUE(saved["aborted"].get<bool>());
  EXPECT_GE(saved["executed"].get<int>(), 1);
}

TEST_F(CampaignFixture, SecondsBudgetAndStopHook) {
  auto f = factory(false);
  CampaignOptions o;
  o.engine = stub("ok");
  o.budget.seconds = 0.3;
  o.out_dir = scratch("sec");
  auto s = run_campaign(f, o);
  EXPECT_GT(s.generated + s.generation_failures, 0u);
  EXPECT_LT(s.elapsed_seconds, 2.0);

  o.budget = {};
  o.budget.tests = 1000;
  int polls = 0;
  o.should_stop = [&] { return ++polls > 3; };
  s = run_campaign(f, o);
  EXPECT_EQ(s.generated + s.generation_failures, 3u);
}

}  // namespace
}  // namespace fraggen::harness
