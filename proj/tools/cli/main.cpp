#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fraggen/errors.hpp"
#include "fraggen/fragmenter/store.hpp"
#include "fraggen/nnlm/checkpoint.hpp"
#include "fraggen/resolver/resolver.hpp"
#include "fraggen/suggest/suggester.hpp"
#include "pipeline.hpp"

namespace fs = std::filesystem;
using namespace fraggen;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

std::unique_ptr<adapter::Client> open_adapter(const std::string& flag) {
  std::string cmd = flag;
  if (cmd.empty()) {
    if (const char* env = std::getenv("FRAGGEN_ADAPTER")) cmd = env;
  }
  if (cmd.empty()) return nullptr;
  return std::make_unique<adapter::Client>(adapter::Client::split_command(cmd));
}

struct IngestArgs {
  std::string fixtures, sources, out, adapter;
  pipeline::IngestOptions opt;
};

int cmd_ingest(const IngestArgs& a) {
  const fs::path in = !a.fixtures.empty() ? fs::path(a.fixtures) : fs::path(a.sources);
  auto client = a.sources.empty() ? nullptr : open_adapter(a.adapter);
  if (!a.sources.empty() && !client) {
    std::cerr << "warning: no adapter configured (FRAGGEN_ADAPTER); .js files will be skipped\n";
  }
  auto report = pipeline::ingest(pipeline::list_inputs(in), a.out, a.opt, client.get());
  std::cout << report.to_json().dump() << "\n";
  return 0;
}

struct TrainArgs {
  std::string store, out, config, markov_out;
  std::optional<std::size_t> epochs, batch_size;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr;
};

int cmd_train(const TrainArgs& a) {
  nnlm::Hyperparams hp;
  if (!a.config.empty()) hp = read_json(a.config).get<nnlm::Hyperparams>();
  if (a.epochs) hp.epochs = *a.epochs;
  if (a.batch_size) hp.batch_size = *a.batch_size;
  if (a.seed) hp.seed = *a.seed;
  if (a.lr) hp.learning_rate = *a.lr;
  const auto vocab = fragmenter::read_vocabulary(a.store);
  auto model = pipeline::train_store(
      a.store, hp, [](std::size_t epoch, const nnlm::EpochStats& s, const nnlm::Metrics& m) {
        std::printf("epoch %zu l1=%.6f l2=%.6f ppl=%.4f acc=%.4f lr=%.5f\n", epoch, s.mean_l1,
                    s.mean_l2, m.perplexity(), m.accuracy, s.learning_rate);
        std::fflush(stdout);
      });
  const fs::path out = a.out.empty() ? fs::path(a.store) / "model.ckpt" : fs::path(a.out);
  nnlm::save_checkpoint(model, vocab.hash(), out, {{"epochs", hp.epochs}});
  if (!a.markov_out.empty()) {
    suggest::MarkovSuggester::train(fragmenter::read_sequences(a.store), vocab.size())
        .save(a.markov_out);
  }
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

struct GenerateArgs {
  std::string store, out, builtins = "ecmascript";
  pipeline::SuggesterSpec suggester;
  std::size_t count = 10;
  std::uint64_t seed = 1;
  generator::GenerationParams gen;
  bool no_resolve = false;
};

int cmd_generate(const GenerateArgs& a) {
  const auto vocab = fragmenter::read_vocabulary(a.store);
  const auto seeds = pipeline::load_seeds(a.store, vocab);
  auto sugg = pipeline::make_suggester(a.suggester, a.store, vocab);
  harness::TestFactory factory(seeds, *sugg, vocab, a.gen, !a.no_resolve,
                               normalizer::BuiltinRegistry::for_engine(a.builtins),
                               resolver::UsageHints::defaults(), a.seed);
  fs::create_directories(a.out);
  std::size_t written = 0;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < a.count; ++i) {
    auto t = factory.make(i);
    if (!t) {
      ++failed;
      continue;
    }
    char name[32];
    std::snprintf(name, sizeof name, "test_%06zu.js", i);
    std::ofstream(fs::path(a.out) / name, std::ios::binary) << t->source << "\n";
    ++written;
  }
  std::cout << "generated " << written << " tests (" << failed << " failed) in " << a.out << "\n";
  return 0;
}

int cmd_fuzz(const std::string& config) {
  const auto cfg = pipeline::CampaignConfig::from_json(read_json(config),
                                                       fs::absolute(config).parent_path());
  const auto vocab = fragmenter::read_vocabulary(cfg.store);
  const auto seeds = pipeline::load_seeds(cfg.store, vocab);
  auto sugg = pipeline::make_suggester(cfg.suggester, cfg.store, vocab);
  harness::TestFactory factory(seeds, *sugg, vocab, cfg.gen, cfg.resolve,
                               normalizer::BuiltinRegistry::for_engine(cfg.builtins),
                               resolver::UsageHints::defaults(), cfg.rng_seed);
  harness::CampaignOptions opt;
  opt.engine = cfg.engine;
  opt.budget = cfg.budget;
  opt.workers = cfg.workers;
  opt.out_dir = cfg.out;
  opt.keep_tests = cfg.keep_tests;
  opt.should_stop = [] { return g_interrupted.load(); };
  std::signal(SIGINT, on_sigint);
  std::signal(SIGTERM, on_sigint);
  auto stats = harness::run_campaign(factory, opt);
  std::cout << stats.to_json().dump(2) << "\n";
  return 0;
}

int cmd_stats(const std::string& dir) {
  const auto stats = harness::CampaignStats::from_json(read_json(fs::path(dir) / "stats.json"));
  std::printf("executed %llu  pass %llu (%.2f%%)  runtime errors %llu  crashes %llu  timeouts %llu  "
              "other %llu\n",
              static_cast<unsigned long long>(stats.executed),
              static_cast<unsigned long long>(stats.pass), 100.0 * stats.pass_rate(),
              static_cast<unsigned long long>(stats.runtime_error),
              static_cast<unsigned long long>(stats.crash),
              static_cast<unsigned long long>(stats.timeout),
              static_cast<unsigned long long>(stats.other));
  std::printf("generation failures %llu  elapsed %.1fs  unique crashes %llu%s\n",
              static_cast<unsigned long long>(stats.generation_failures), stats.elapsed_seconds,
              static_cast<unsigned long long>(stats.unique_crashes),
              stats.aborted ? ("  ABORTED: " + stats.abort_reason).c_str() : "");
  for (const auto& [name, n] : stats.errors_by_name) {
    std::printf("  %-16s %llu\n", name.c_str(), static_cast<unsigned long long>(n));
  }
  const auto crashes = fs::path(dir) / "crashes";
  if (fs::is_directory(crashes)) {
    for (const auto& r : harness::CrashStore(crashes).records()) {
      std::printf("  crash %s hits=%llu first=%s\n", r.key.c_str(),
                  static_cast<unsigned long long>(r.hits), r.first_seen.c_str());
    }
  }
  return 0;
}

int cmd_replay(const std::string& crash, const std::string& engine, const std::string& config) {
  harness::EngineConfig cfg;
  if (!engine.empty()) {
    cfg = harness::EngineConfig::from_json(read_json(engine));
  } else {
    cfg = pipeline::CampaignConfig::from_json(read_json(config), fs::absolute(config).parent_path())
              .engine;
  }
  cfg.validate();
  const auto record = harness::CrashStore::load(crash);
  const auto scratch = fs::temp_directory_path() / ("fraggen-replay-" + std::to_string(getpid()));
  auto outcome = harness::execute(cfg, record.source, scratch);
  auto cls = harness::classify(outcome, cfg);
  nlohmann::json out{{"class", harness::to_string(cls.kind)}, {"detail", cls.detail},
                     {"wall", outcome.wall_seconds}};
  if (cls.kind == harness::OutcomeClass::Crash) {
    const auto key = harness::dedup_key(outcome, cfg, scratch / "test.js");
    out["key"] = key;
    out["same_key"] = key == record.key;
  }
  fs::remove_all(scratch);
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fragment-LSTM ECMAScript fuzzer"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ci = app.add_subcommand("ingest", "fixture ASTs or sources -> normalized seeds + fragment store");
  auto* fx = ci->add_option("--fixtures", ingest.fixtures, "directory of ESTree JSON files");
  auto* sr = ci->add_option("--sources", ingest.sources, "directory of .js files (needs the adapter)");
  fx->excludes(sr);
  ci->add_option("--out", ingest.out, "store directory")->required();
  ci->add_option("--adapter", ingest.adapter, "adapter command (default: $FRAGGEN_ADAPTER)");
  ci->add_option("--max-bytes", ingest.opt.max_bytes, "skip larger files")->capture_default_str();
  ci->add_option("--min-freq", ingest.opt.min_freq, "rarer fragments become OoV")->capture_default_str();
  ci->add_option("--max-fragments", ingest.opt.max_fragments, "skip longer files")->capture_default_str();
  ci->add_option("--builtins", ingest.opt.engine, "builtins registry")->capture_default_str();
  ci->add_option("--limit", ingest.opt.limit, "keep at most this many files (0 = all)");

  TrainArgs train;
  auto* ct = app.add_subcommand("train", "fragment store -> checkpoint");
  ct->add_option("--store", train.store, "store directory")->required();
  ct->add_option("--out", train.out, "checkpoint path (default <store>/model.ckpt)");
  ct->add_option("--config", train.config, "hyperparameter JSON");
  ct->add_option("--epochs", train.epochs, "override epochs");
  ct->add_option("--batch-size", train.batch_size, "override batch size");
  ct->add_option("--seed", train.seed, "override seed");
  ct->add_option("--learning-rate", train.lr, "override learning rate");
  ct->add_option("--markov-out", train.markov_out, "also write a Markov baseline table");

  GenerateArgs gen;
  auto* cg = app.add_subcommand("generate", "checkpoint + seeds -> test files");
  cg->add_option("--store", gen.store, "store directory")->required();
  cg->add_option("--out", gen.out, "output directory")->required();
  cg->add_option("--checkpoint", gen.suggester.checkpoint, "LSTM checkpoint");
  cg->add_option("--suggester", gen.suggester.kind, "lstm | markov | random")->capture_default_str();
  cg->add_option("--markov", gen.suggester.markov, "Markov table (default: trained from the store)");
  cg->add_option("--count", gen.count, "tests to generate")->capture_default_str();
  cg->add_option("--seed", gen.seed, "rng seed")->capture_default_str();
  cg->add_option("--k-top", gen.gen.k_top, "suggestions per pick")->capture_default_str();
  cg->add_option("--f-max", gen.gen.f_max, "fragment budget per test")->capture_default_str();
  cg->add_flag("--no-resolve", gen.no_resolve, "skip reference resolution");
  cg->add_option("--builtins", gen.builtins, "builtins registry")->capture_default_str();

  std::string fuzz_config;
  auto* cf = app.add_subcommand("fuzz", "run a campaign");
  cf->add_option("--config", fuzz_config, "campaign JSON")->required();

  std::string stats_dir;
  auto* cs = app.add_subcommand("stats", "summarize a campaign");
  cs->add_option("--campaign", stats_dir, "campaign output directory")->required();

  std::string crash_dir, engine_json, replay_config;
  auto* cr = app.add_subcommand("replay", "re-execute a crash record");
  cr->add_option("--crash", crash_dir, "crashes/<key> directory")->required();
  auto* eo = cr->add_option("--engine", engine_json, "engine JSON");
  auto* co = cr->add_option("--config", replay_config, "campaign JSON (engine section)");
  eo->excludes(co);

  try {
    app.parse(argc, argv);
    if (ci->parsed() && ingest.fixtures.empty() && ingest.sources.empty()) {
      throw CLI::RequiredError("--fixtures or --sources");
    }
    if (cg->parsed() && gen.suggester.kind == "lstm" && gen.suggester.checkpoint.empty()) {
      throw CLI::RequiredError("--checkpoint");
    }
    if (cr->parsed() && engine_json.empty() && replay_config.empty()) {
      throw CLI::RequiredError("--engine or --config");
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (ci->parsed()) return cmd_ingest(ingest);
    if (ct->parsed()) return cmd_train(train);
    if (cg->parsed()) return cmd_generate(gen);
    if (cf->parsed()) return cmd_fuzz(fuzz_config);
    if (cs->parsed()) return cmd_stats(stats_dir);
    if (cr->parsed()) return cmd_replay(crash_dir, engine_json, replay_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
