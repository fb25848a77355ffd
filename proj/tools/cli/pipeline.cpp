#include "pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fraggen/errors.hpp"
#include "fraggen/estree/json_codec.hpp"
#include "fraggen/fragmenter/fragment.hpp"
#include "fraggen/fragmenter/store.hpp"
#include "fraggen/nnlm/checkpoint.hpp"
#include "fraggen/normalizer/normalizer.hpp"
#include "fraggen/printer/printer.hpp"
#include "fraggen/suggest/suggester.hpp"

namespace fraggen::pipeline {

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

}  // namespace

nlohmann::json IngestReport::to_json() const {
  return {{"files", files},         {"kept", kept},
          {"too_large", too_large}, {"unparseable", unparseable},
          {"unsupported", unsupported}, {"too_long", too_long},
          {"vocab_size", vocab_size}};
}

std::vector<fs::path> list_inputs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if ((ext == ".json" && e.path().filename() != "index.json") || ext == ".js") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

IngestReport ingest(const std::vector<fs::path>& inputs, const fs::path& out,
                    const IngestOptions& options, adapter::Client* adapter) {
  const auto builtins = normalizer::BuiltinRegistry::for_engine(options.engine);
  normalizer::ParseFn parse = [adapter](const std::string& s) -> std::optional<estree::AstNode> {
    if (!adapter) return std::nullopt;
    return adapter->parse(s).ast;
  };

  IngestReport report;
  std::vector<std::pair<std::string, estree::AstNode>> kept;
  std::vector<fragmenter::FragmentSequence> seqs;
  for (const auto& path : inputs) {
    if (options.limit && kept.size() >= options.limit) break;
    ++report.files;
    std::optional<estree::AstNode> ast;
    try {
      if (path.extension() == ".js") {
        if (fs::file_size(path) > options.max_bytes) {
          ++report.too_large;
          continue;
        }
        if (!adapter) {
          ++report.unparseable;
          continue;
        }
        auto r = adapter->parse(slurp(path));
        if (!r.ast) {
          ++(r.error.kind == "unsupported" ? report.unsupported : report.unparseable);
          continue;
        }
        ast = std::move(*r.ast);
      } else {
        ast = estree::decode_ast(slurp(path));
        // Fixtures have no source file; the filter applies to their printed text.
        if (printer::print_program(*ast).size() > options.max_bytes) {
          ++report.too_large;
          continue;
        }
      }
    } catch (const UnsupportedKind&) {
      ++report.unsupported;
      continue;
    } catch (const MalformedAst&) {
      ++report.unparseable;
      continue;
    }
    auto inlined = normalizer::inline_eval(*ast, parse);
    auto norm = normalizer::normalize(inlined, builtins);
    auto seq = fragmenter::fragmentize(norm.ast, path.stem().string());
    if (seq.fragments.size() > options.max_fragments) {
      ++report.too_long;
      continue;
    }
    seqs.push_back(std::move(seq));
    kept.emplace_back(path.stem().string(), std::move(norm.ast));
  }
  if (seqs.empty()) throw EmptyCorpus();
  auto built = fragmenter::build_vocabulary(
      seqs, {.min_freq = options.min_freq, .max_fragments = options.max_fragments});
  report.kept = kept.size();
  report.vocab_size = built.vocab.size();

  fs::create_directories(out / "seeds");
  fragmenter::write_store(out, built.vocab, built.sequences);
  for (const auto& [name, ast] : kept) spit(out / "seeds" / (name + ".json"), estree::encode_ast(ast));
  spit(out / "ingest.json", report.to_json().dump(2) + "\n");
  return report;
}

std::vector<estree::AstNode> load_seed_asts(const fs::path& store) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(store / "seeds")) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<estree::AstNode> out;
  for (const auto& f : files) out.push_back(estree::decode_ast(slurp(f)));
  return out;
}

std::vector<generator::Seed> load_seeds(const fs::path& store, const fragmenter::Vocabulary& vocab) {
  std::vector<generator::Seed> out;
  for (auto& ast : load_seed_asts(store)) out.push_back(generator::make_seed(std::move(ast), vocab));
  if (out.empty()) throw ConfigError("store has no seeds: " + store.string());
  return out;
}

nnlm::Model train_store(const fs::path& store, const nnlm::Hyperparams& hp,
                        const std::function<void(std::size_t, const nnlm::EpochStats&,
                                                 const nnlm::Metrics&)>& on_epoch) {
  hp.validate();
  const auto vocab = fragmenter::read_vocabulary(store);
  const auto data = fragmenter::read_sequences(store);
  const nnlm::TargetTypes types(vocab);
  auto model = nnlm::init_model<float>(hp, vocab.size());
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    auto stats = nnlm::train_epoch(model, data, types, epoch);
    if (on_epoch) on_epoch(epoch + 1, stats, nnlm::evaluate(model, data, types));
  }
  return model;
}

std::unique_ptr<suggest::Suggester> make_suggester(const SuggesterSpec& spec, const fs::path& store,
                                                   const fragmenter::Vocabulary& vocab) {
  if (spec.kind == "lstm") {
    if (spec.checkpoint.empty()) throw ConfigError("the lstm suggester needs a checkpoint");
    auto cp = nnlm::load_checkpoint(spec.checkpoint, vocab);
    return std::make_unique<suggest::LstmSuggester>(
        std::make_shared<const nnlm::Model>(std::move(cp.model)));
  }
  if (spec.kind == "markov") {
    if (!spec.markov.empty()) {
      auto m = suggest::MarkovSuggester::load(spec.markov);
      if (m.vocab_size() != vocab.size()) throw VocabMismatch("markov table vocabulary differs");
      return std::make_unique<suggest::MarkovSuggester>(std::move(m));
    }
    return std::make_unique<suggest::MarkovSuggester>(
        suggest::MarkovSuggester::train(fragmenter::read_sequences(store), vocab.size()));
  }
  if (spec.kind == "random") return std::make_unique<suggest::RandomSuggester>(vocab.size());
  throw ConfigError("unknown suggester: " + spec.kind);
}

CampaignConfig CampaignConfig::from_json(const nlohmann::json& j, const fs::path& base) {
  auto rel = [&base](const std::string& p) -> fs::path {
    if (p.empty()) return {};
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
  };
  CampaignConfig c;
  try {
    c.engine = harness::EngineConfig::from_json(j.at("engine"));
    if (!c.engine.binary.empty() && c.engine.binary.find('/') != std::string::npos) {
      c.engine.binary = rel(c.engine.binary).string();
    }
    c.store = rel(j.at("store").get<std::string>());
    c.suggester.kind = j.value("suggester", "lstm");
    c.suggester.checkpoint = rel(j.value("checkpoint", ""));
    c.suggester.markov = rel(j.value("markov", ""));
    if (j.contains("gen")) {
      c.gen.f_max = j["gen"].value("f_max", c.gen.f_max);
      c.gen.k_top = j["gen"].value("k_top", c.gen.k_top);
      c.gen.retry_bound = j["gen"].value("retry_bound", c.gen.retry_bound);
    }
    c.resolve = j.value("resolve", true);
    c.builtins = j.value("builtins", "ecmascript");
    c.workers = j.value("workers", std::size_t{1});
    if (j.contains("budget")) {
      const auto& b = j["budget"];
      if (b.contains("tests")) c.budget.tests = b["tests"].get<std::uint64_t>();
      if (b.contains("seconds")) c.budget.seconds = b["seconds"].get<double>();
    }
    c.rng_seed = j.value("rng_seed", std::uint64_t{1});
    c.out = rel(j.value("out", "campaign"));
    c.keep_tests = j.value("keep_tests", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad campaign config: ") + e.what());
  }
  c.gen.validate();
  return c;
}

}  // namespace fraggen::pipeline
