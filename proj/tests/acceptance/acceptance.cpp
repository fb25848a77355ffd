// One PASS/FAIL/SKIP line per acceptance criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraggen/errors.hpp"
#include "fraggen/estree/json_codec.hpp"
#include "fraggen/estree/traversal.hpp"
#include "fraggen/fragmenter/fragment.hpp"
#include "fraggen/fragmenter/store.hpp"
#include "fraggen/generator/generator.hpp"
#include "fraggen/harness/campaign.hpp"
#include "fraggen/nnlm/loss.hpp"
#include "fraggen/nnlm/train.hpp"
#include "fraggen/resolver/resolver.hpp"
#include "fraggen/suggest/suggester.hpp"
#include "pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/tiny_model.hpp"

namespace fs = std::filesystem;
using namespace fraggen;

namespace {

struct Outcome {
  enum { Pass, Fail, Skip } status = Fail;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {Outcome::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.status == Outcome::Pass && secs > limit_s) {
    o.status = Outcome::Fail;
    o.detail += " (over time limit)";
  }
  const char* tag = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Skip ? "SKIP" : "FAIL";
  if (o.status == Outcome::Fail) ++failures;
  std::printf("[%s] %2d %-28s %7.1fs / %.0fs  %s\n", tag, n, title.c_str(), secs, limit_s,
              o.detail.c_str());
  std::fflush(stdout);
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

fs::path work_dir() {
  const fs::path p = FRAGGEN_ACCEPTANCE_WORK;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Nodes with at least one key besides "type" whose value is not null,
// counted straight off the fixture JSON.
std::size_t oracle_fragment_count(const nlohmann::json& j) {
  std::size_t n = 0;
  if (j.is_array()) {
    for (const auto& e : j) n += oracle_fragment_count(e);
  } else if (j.is_object()) {
    if (j.contains("type") && j["type"].is_string()) {
      bool has_slot = false;
      for (const auto& [k, v] : j.items()) {
        if (k != "type" && !v.is_null()) has_slot = true;
      }
      if (has_slot) ++n;
    }
    for (const auto& [k, v] : j.items()) n += oracle_fragment_count(v);
  }
  return n;
}

estree::AstNode* first_stub(estree::AstNode& ast) {
  for (auto* n : estree::preorder_mut(ast)) {
    if (n->is_stub()) return n;
  }
  return nullptr;
}

std::string slurp(const fs::path& p) { return testing::read_file(p); }

std::string engine_path() {
  if (const char* e = std::getenv("FRAGGEN_ENGINE")) return e;
  return access("/usr/bin/node", X_OK) == 0 ? "/usr/bin/node" : "";
}

}  // namespace

int main() {
  const fs::path work = work_dir();
  const fs::path data = FRAGGEN_DATA_DIR;

  // Criterion 1
  report(1, "fragment round trip", 60, [] {
    std::size_t total = 0, exact = 0;
    for (const auto& sub : {"corpus", "toy"}) {
      for (const auto& p : testing::fixture_files(sub)) {
        const auto ast = estree::decode_ast(slurp(p));
        ++total;
        if (fragmenter::reassemble(fragmenter::fragmentize(ast).fragments) == ast) ++exact;
      }
    }
    return verdict(total >= 1000 && exact == total,
                   std::to_string(exact) + "/" + std::to_string(total) + " exact");
  });

  // Criterion 2
  report(2, "fragment count oracle", 10, [] {
    auto files = testing::fixture_files("corpus");
    std::mt19937_64 rng(20261019);
    std::shuffle(files.begin(), files.end(), rng);
    files.resize(100);
    std::size_t agree = 0, fragments = 0;
    for (const auto& p : files) {
      const auto text = slurp(p);
      const auto n = fragmenter::fragmentize(estree::decode_ast(text)).fragments.size();
      fragments += n;
      if (n == oracle_fragment_count(nlohmann::json::parse(text))) ++agree;
    }
    return verdict(agree == 100, std::to_string(agree) + "/100 agree, " +
                                     std::to_string(fragments) + " fragments");
  });

  // Criterion 3
  report(3, "gradient check", 60, [] {
    double worst = 0.0;
    std::string where;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto c = testing::make_tiny_case(1000 + seed);
      auto r = nnlm::check_gradients(c.model, c.sample, c.types);
      if (r.max_rel_error >= worst) {
        worst = r.max_rel_error;
        where = r.worst_tensor;
      }
    }
    return verdict(worst < 1e-4, fmt("max rel error %.3g", worst) + " in " + where);
  });

  // Shared stores: toy (every fragment kept) and corpus.
  const auto toy_store = work / "toy_store";
  const auto corpus_store = work / "corpus_store";
  pipeline::ingest(pipeline::list_inputs(testing::fixture_dir("toy")), toy_store,
                   {.min_freq = 1}, nullptr);
  pipeline::ingest(pipeline::list_inputs(testing::fixture_dir("corpus")), corpus_store,
                   {.engine = "node"}, nullptr);
  const auto toy_vocab = fragmenter::read_vocabulary(toy_store);
  const auto corpus_vocab = fragmenter::read_vocabulary(corpus_store);

  // Criterion 4
  report(4, "loss bounds", 10, [&] {
    std::mt19937_64 rng(4);
    std::size_t violations = 0;
    double worst_uniform = 0.0;
    const fragmenter::Vocabulary* vocabs[] = {&toy_vocab, &corpus_vocab};
    for (int i = 0; i < 10000; ++i) {
      const auto& vocab = *vocabs[i % 2];
      const auto v = static_cast<Eigen::Index>(vocab.size());
      const double sigma = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
      std::normal_distribution<double> z(0.0, sigma);
      nnlm::Vec<double> logits(v);
      for (Eigen::Index k = 0; k < v; ++k) logits[k] = z(rng);
      nnlm::Vec<double> p = (logits.array() - logits.maxCoeff()).exp().matrix();
      p /= p.sum();
      const auto y = std::uniform_int_distribution<fragmenter::FragmentId>(
          1, static_cast<fragmenter::FragmentId>(v - 1))(rng);
      const auto l = nnlm::loss(p, y, vocab);
      if (!(l.l1 >= 0.0) || !(l.l2 >= 0.0) || !(l.l2 <= 1.0)) ++violations;
    }
    for (const auto* vocab : vocabs) {
      const auto v = static_cast<Eigen::Index>(vocab->size());
      const nnlm::Vec<double> u = nnlm::Vec<double>::Constant(v, 1.0 / static_cast<double>(v));
      for (fragmenter::FragmentId y = 1; y < vocab->size(); ++y) {
        const auto l = nnlm::loss(u, y, *vocab);
        worst_uniform = std::max({worst_uniform, std::abs(l.l1 - std::log(static_cast<double>(v))),
                                  std::abs(l.l2)});
      }
    }
    return verdict(violations == 0 && worst_uniform <= 1e-6,
                   std::to_string(violations) + " bound violations, uniform max dev " +
                       fmt("%.2g", worst_uniform));
  });

  // Criterion 5
  auto toy_hp = nlohmann::json::parse(slurp(data / "configs" / "toy_train.json")).get<nnlm::Hyperparams>();
  std::shared_ptr<const nnlm::Model> toy_model;
  report(5, "overfit toy corpus", 600, [&] {
    double first = 0.0, last = 0.0;
    nnlm::Metrics final_metrics;
    auto model = pipeline::train_store(
        toy_store, toy_hp, [&](std::size_t epoch, const nnlm::EpochStats& s, const nnlm::Metrics& m) {
          if (epoch == 1) first = s.mean_l1 + s.mean_l2;
          last = s.mean_l1 + s.mean_l2;
          final_metrics = m;
        });
    toy_model = std::make_shared<const nnlm::Model>(std::move(model));
    const bool ok = toy_hp.epochs == 200 && final_metrics.accuracy >= 0.95 &&
                    final_metrics.perplexity() <= 1.5 && final_metrics.type_error() <= 0.05 &&
                    last < 0.25 * first;
    return verdict(ok, fmt("acc %.4f ppl %.4f type err %.4f", final_metrics.accuracy,
                           final_metrics.perplexity(), final_metrics.type_error()) +
                           fmt(" loss %.4f -> %.4f", first, last));
  });

  // Criterion 6
  report(6, "generation fidelity", 120, [&] {
    if (!toy_model) return Outcome{Outcome::Fail, "no overfit model"};
    const auto seeds = pipeline::load_seeds(toy_store, toy_vocab);
    suggest::LstmSuggester lstm(toy_model);
    generator::GenerationParams params;
    params.k_top = 1;
    suggest::Rng rng(6);
    std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
    std::size_t reproduced = 0, type_mismatches = 0, over_budget = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto& seed = seeds[pick(rng)];
      auto pruned = generator::remove_subtree(seed, rng);
      auto replay = pruned.ast;
      auto r = generator::regrow(pruned, lstm, toy_vocab, params, rng);
      if (!r) continue;
      const auto& appended = r.mutation->appended;
      if (appended.size() > params.f_max) ++over_budget;
      for (auto id : appended) {
        auto* stub = first_stub(replay);
        if (!stub || stub->kind() != toy_vocab.kind_of(id)) {
          ++type_mismatches;
          break;
        }
        *stub = toy_vocab.fragment(id);
      }
      if (r.mutation->ast == seed.ast) ++reproduced;
    }
    return verdict(reproduced >= 160 && type_mismatches == 0 && over_budget == 0,
                   std::to_string(reproduced) + "/200 reproduced, " +
                       std::to_string(type_mismatches) + " type mismatches, " +
                       std::to_string(over_budget) + " over f_max");
  });

  // Criterion 7
  report(7, "resolver soundness", 60, [&] {
    const auto seeds = pipeline::load_seeds(corpus_store, corpus_vocab);
    const auto markov = suggest::MarkovSuggester::train(fragmenter::read_sequences(corpus_store),
                                                        corpus_vocab.size());
    const auto builtins = normalizer::BuiltinRegistry::for_engine("node");
    const auto hints = resolver::UsageHints::defaults();
    generator::GenerationParams params;
    std::size_t tests = 0, undeclared = 0, not_idempotent = 0, replaced = 0;
    for (std::uint64_t i = 0; tests < 1000 && i < 5000; ++i) {
      auto rng = harness::index_rng(7, i);
      auto r = generator::mutate_ast(seeds, markov, corpus_vocab, params, rng);
      if (!r) continue;
      ++tests;
      auto ast = std::move(r.mutation->ast);
      replaced += resolver::resolve_references(ast, builtins, hints, rng).replacements.size();
      undeclared += resolver::rescan(ast, builtins).size();
      const auto before = ast;
      const auto again = resolver::resolve_references(ast, builtins, hints, rng);
      if (!again.replacements.empty() || !again.fresh.empty() || !(ast == before)) ++not_idempotent;
    }
    return verdict(tests == 1000 && undeclared == 0 && not_idempotent == 0,
                   std::to_string(tests) + " tests, " + std::to_string(replaced) +
                       " renames, " + std::to_string(undeclared) + " undeclared after, " +
                       std::to_string(not_idempotent) + " changed on rerun");
  });

  // Criterion 8
  report(8, "stub engines", 60, [&] {
    auto stub = [](const std::string& mode, double timeout = 5.0) {
      harness::EngineConfig c;
      c.binary = FRAGGEN_STUB_ENGINE;
      c.args = {mode, "{test}"};
      c.timeout_seconds = timeout;
      return c;
    };
    const auto scratch = work / "stub_scratch";
    const auto segv = harness::classify(harness::execute(stub("segv"), ";", scratch), stub("segv"));
    const auto abrt = harness::classify(harness::execute(stub("abort"), ";", scratch), stub("abort"));
    const auto t0 = std::chrono::steady_clock::now();
    const auto sleep_cfg = stub("sleep", 1.0);
    const auto hang = harness::classify(harness::execute(sleep_cfg, ";", scratch), sleep_cfg);
    const double hang_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto seeds = pipeline::load_seeds(toy_store, toy_vocab);
    suggest::RandomSuggester random(toy_vocab.size());
    harness::TestFactory factory(seeds, random, toy_vocab, {}, true,
                                 normalizer::BuiltinRegistry::for_engine("ecmascript"),
                                 resolver::UsageHints::defaults(), 8);
    harness::CampaignOptions opt;
    opt.engine = stub("segv");
    opt.budget.tests = 100;
    opt.out_dir = work / "stub_campaign";
    const auto stats = harness::run_campaign(factory, opt);
    const auto records = harness::CrashStore(opt.out_dir / "crashes").records();
    const bool ok = segv == harness::Classification{harness::OutcomeClass::Crash, "SIGSEGV"} &&
                    abrt.kind == harness::OutcomeClass::Other &&
                    hang.kind == harness::OutcomeClass::Timeout && hang_s <= 2.0 &&
                    stats.crash == 100 && records.size() == 1 && records[0].hits == 100;
    return verdict(ok, "segv=" + harness::to_string(segv.kind) + "(" + segv.detail + ") abort=" +
                           harness::to_string(abrt.kind) + " sleep=" + harness::to_string(hang.kind) +
                           fmt(" in %.2fs", hang_s) + ", " + std::to_string(stats.crash) +
                           " crashes -> " + std::to_string(records.size()) + " record(s)");
  });

  // Criterion 9
  report(9, "pass-rate directions (node)", 4 * 1800, [&] {
    const auto engine = engine_path();
    if (engine.empty()) return Outcome{Outcome::Skip, "no engine (set FRAGGEN_ENGINE)"};
    auto hp = nlohmann::json::parse(slurp(data / "configs" / "corpus_train.json")).get<nnlm::Hyperparams>();
    auto model = std::make_shared<const nnlm::Model>(pipeline::train_store(corpus_store, hp, {}));
    suggest::LstmSuggester lstm(model);
    const auto seeds = pipeline::load_seeds(corpus_store, corpus_vocab);
    harness::EngineConfig cfg;
    cfg.binary = engine;
    cfg.validate();
    struct Arm {
      std::size_t k_top;
      bool resolve;
      double rate = 0.0;
      double seconds = 0.0;
    };
    std::vector<Arm> arms{{1, true}, {64, true}, {64, false}};
    std::string detail;
    bool arms_ok = true;
    for (auto& arm : arms) {
      const auto t0 = std::chrono::steady_clock::now();
      generator::GenerationParams params;
      params.k_top = arm.k_top;
      harness::TestFactory factory(seeds, lstm, corpus_vocab, params, arm.resolve,
                                   normalizer::BuiltinRegistry::for_engine("node"),
                                   resolver::UsageHints::defaults(), 9);
      std::size_t executed = 0, pass = 0;
      for (std::uint64_t i = 0; executed < 500 && i < 5000; ++i) {
        auto t = factory.make(i);
        if (!t) continue;
        ++executed;
        auto o = harness::execute(cfg, t->source, work / "engine_scratch");
        if (harness::classify(o, cfg).kind == harness::OutcomeClass::Pass) ++pass;
      }
      arm.rate = executed ? static_cast<double>(pass) / static_cast<double>(executed) : 0.0;
      arm.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      arms_ok = arms_ok && executed >= 500 && arm.seconds < 1800;
      detail += "k" + std::to_string(arm.k_top) + (arm.resolve ? "/on " : "/off ") +
                fmt("%.1f%% ", 100 * arm.rate);
    }
    const double dk = arms[0].rate - arms[1].rate;
    const double dr = 100 * (arms[1].rate - arms[2].rate);
    return verdict(arms_ok && dk > 0 && dr >= 5.0,
                   detail + fmt("| k1-k64 %+.1f pts, resolver %+.1f pts", 100 * dk, dr));
  });

  // Criterion 10
  report(10, "determinism (cli)", 300, [&] {
    const std::string cli = FRAGGEN_CLI;
    auto sh = [](const std::string& cmd) { return std::system((cmd + " >/dev/null").c_str()); };
    const auto cfg = (data / "configs" / "toy_train.json").string();
    int rc = 0;
    for (const char* name : {"a", "b"}) {
      rc |= sh(cli + " train --store " + toy_store.string() + " --config " + cfg +
               " --epochs 200 --seed 7 --out " + (work / (std::string(name) + ".ckpt")).string());
      rc |= sh(cli + " generate --store " + toy_store.string() + " --checkpoint " +
               (work / "a.ckpt").string() + " --count 100 --seed 5 --out " +
               (work / (std::string("gen_") + name)).string());
    }
    const bool same_ckpt = slurp(work / "a.ckpt") == slurp(work / "b.ckpt");
    std::size_t files = 0, same = 0;
    for (const auto& e : fs::directory_iterator(work / "gen_a")) {
      ++files;
      const auto other = work / "gen_b" / e.path().filename();
      if (fs::exists(other) && slurp(e.path()) == slurp(other)) ++same;
    }
    std::size_t files_b = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(work / "gen_b")) ++files_b;
    return verdict(rc == 0 && same_ckpt && files > 0 && same == files && files == files_b,
                   std::string("checkpoints ") + (same_ckpt ? "identical" : "differ") + ", " +
                       std::to_string(same) + "/" + std::to_string(files) + " tests identical");
  });

  std::printf("%s\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED");
  return failures ? 1 : 0;
}
