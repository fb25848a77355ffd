#include "fraggen/harness/campaign.hpp"

#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "fraggen/errors.hpp"
#include "fraggen/printer/printer.hpp"

namespace fraggen::harness {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw Error("cannot write " + p.string());
  }
  fs::rename(tmp, p);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

nlohmann::json CrashRecord::meta() const {
  return {{"key", key},           {"signal", signal}, {"provenance", provenance},
          {"first_seen", first_seen}, {"hits", hits}};
}

CrashStore::CrashStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  for (const auto& e : fs::directory_iterator(root_)) {
    if (e.is_directory() && fs::exists(e.path() / "meta.json")) {
      auto r = load(e.path());
      records_.emplace(r.key, std::move(r));
    }
  }
}

void CrashStore::write_meta(const CrashRecord& r) const {
  write_file(root_ / r.key / "meta.json", r.meta().dump(2) + "\n");
}

bool CrashStore::insert_if_absent(CrashRecord record, const std::string& stderr_text) {
  std::lock_guard lock(mu_);
  auto it = records_.find(record.key);
  if (it != records_.end()) {
    ++it->second.hits;
    write_meta(it->second);
    return false;
  }
  if (record.first_seen.empty()) record.first_seen = utc_now();
  record.hits = 1;
  const auto dir = root_ / record.key;
  fs::create_directories(dir);
  write_file(dir / "test.js", record.source);
  write_file(dir / "stderr.txt", stderr_text);
  write_meta(record);
  records_.emplace(record.key, std::move(record));
  return true;
}

std::size_t CrashStore::unique() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<CrashRecord> CrashStore::records() const {
  std::lock_guard lock(mu_);
  std::vector<CrashRecord> out;
  for (const auto& [k, r] : records_) out.push_back(r);
  return out;
}

CrashRecord CrashStore::load(const fs::path& dir) {
  CrashRecord r;
  try {
    const auto meta = nlohmann::json::parse(read_file(dir / "meta.json"));
    r.key = meta.at("key").get<std::string>();
    r.signal = meta.at("signal").get<std::string>();
    r.provenance = meta.value("provenance", nlohmann::json::object());
    r.first_seen = meta.value("first_seen", "");
    r.hits = meta.value("hits", std::uint64_t{1});
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad crash record in " + dir.string() + ": " + e.what());
  }
  r.source = read_file(dir / "test.js");
  return r;
}

double pass_rate(const EngineConfig& cfg, const std::vector<std::string>& tests,
                 const fs::path& scratch) {
  if (tests.empty()) throw ConfigError("pass_rate needs at least one test");
  std::size_t pass = 0;
  for (const auto& t : tests) {
    if (classify(execute(cfg, t, scratch), cfg).kind == OutcomeClass::Pass) ++pass;
  }
  return static_cast<double>(pass) / static_cast<double>(tests.size());
}

suggest::Rng index_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return suggest::Rng(seq);
}

TestFactory::TestFactory(const std::vector<generator::Seed>& seeds,
                         const suggest::Suggester& suggester, const fragmenter::Vocabulary& vocab,
                         generator::GenerationParams params, bool resolve,
                         normalizer::BuiltinRegistry builtins, resolver::UsageHints hints,
                         std::uint64_t rng_seed, std::size_t max_attempts)
    : seeds_(seeds),
      suggester_(suggester),
      vocab_(vocab),
      params_(params),
      resolve_(resolve),
      builtins_(std::move(builtins)),
      hints_(std::move(hints)),
      rng_seed_(rng_seed),
      max_attempts_(max_attempts) {
  params_.validate();
  if (seeds_.empty()) throw ConfigError("campaign needs at least one seed");
  if (max_attempts_ == 0) throw ConfigError("max_attempts must be positive");
}

std::optional<GeneratedTest> TestFactory::make(std::uint64_t index) const {
  auto rng = index_rng(rng_seed_, index);
  for (std::size_t attempt = 1; attempt <= max_attempts_; ++attempt) {
    auto result = generator::mutate_ast(seeds_, suggester_, vocab_, params_, rng);
    if (!result) continue;
    auto& m = *result.mutation;
    if (resolve_) resolver::resolve_references(m.ast, builtins_, hints_, rng);
    GeneratedTest t;
    t.source = printer::print_program(m.ast);
    t.seed_index = m.seed_index;
    t.appended = m.appended.size();
    t.attempts = attempt;
    return t;
  }
  return std::nullopt;
}

void CampaignStats::merge(const CampaignStats& o) {
  generated += o.generated;
  generation_failures += o.generation_failures;
  executed += o.executed;
  pass += o.pass;
  runtime_error += o.runtime_error;
  crash += o.crash;
  timeout += o.timeout;
  other += o.other;
  for (const auto& [k, v] : o.errors_by_name) errors_by_name[k] += v;
}

nlohmann::json CampaignStats::to_json() const {
  return {{"generated", generated},
          {"generation_failures", generation_failures},
          {"executed", executed},
          {"pass", pass},
          {"runtime_error", runtime_error},
          {"crash", crash},
          {"timeout", timeout},
          {"other", other},
          {"unique_crashes", unique_crashes},
          {"errors_by_name", errors_by_name},
          {"pass_rate", pass_rate()},
          {"elapsed_seconds", elapsed_seconds},
          {"throughput", throughput()},
          {"aborted", aborted},
          {"abort_reason", abort_reason}};
}

CampaignStats CampaignStats::from_json(const nlohmann::json& j) {
  CampaignStats s;
  s.generated = j.value("generated", std::uint64_t{0});
  s.generation_failures = j.value("generation_failures", std::uint64_t{0});
  s.executed = j.value("executed", std::uint64_t{0});
  s.pass = j.value("pass", std::uint64_t{0});
  s.runtime_error = j.value("runtime_error", std::uint64_t{0});
  s.crash = j.value("crash", std::uint64_t{0});
  s.timeout = j.value("timeout", std::uint64_t{0});
  s.other = j.value("other", std::uint64_t{0});
  s.unique_crashes = j.value("unique_crashes", std::uint64_t{0});
  if (j.contains("errors_by_name")) {
    s.errors_by_name = j["errors_by_name"].get<std::map<std::string, std::uint64_t>>();
  }
  s.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  s.aborted = j.value("aborted", false);
  s.abort_reason = j.value("abort_reason", "");
  return s;
}

CampaignStats run_campaign(const TestFactory& factory, const CampaignOptions& opt) {
  opt.engine.validate();
  if (opt.workers == 0) throw ConfigError("workers must be positive");
  if (!opt.budget.tests && !opt.budget.seconds) throw ConfigError("campaign needs a budget");
  fs::create_directories(opt.out_dir);
  CrashStore store(opt.out_dir / "crashes");
  if (opt.keep_tests) fs::create_directories(opt.out_dir / "tests");

  std::ofstream events(opt.out_dir / "events.jsonl", std::ios::trunc);
  std::mutex events_mu;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex abort_mu;
  std::string abort_reason;
  std::exception_ptr failure;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  std::vector<CampaignStats> per_worker(opt.workers);
  auto worker = [&](std::size_t w) {
    auto& st = per_worker[w];
    const auto scratch = opt.out_dir / "work" / std::to_string(w);
    while (!stop.load()) {
      if (opt.should_stop && opt.should_stop()) {
        stop = true;
        break;
      }
      if (opt.budget.seconds && elapsed() >= *opt.budget.seconds) break;
      const auto index = next.fetch_add(1);
      if (opt.budget.tests && index >= *opt.budget.tests) break;
      try {
        auto test = factory.make(index);
        nlohmann::json ev{{"index", index}};
        if (!test) {
          ++st.generation_failures;
          ev["class"] = "generation_failure";
        } else {
          ++st.generated;
          if (opt.keep_tests) {
            write_file(opt.out_dir / "tests" / (std::to_string(index) + ".js"), test->source);
          }
          auto outcome = execute(opt.engine, test->source, scratch);
          auto cls = classify(outcome, opt.engine);
          ++st.executed;
          ev["seed"] = test->seed_index;
          ev["class"] = to_string(cls.kind);
          if (!cls.detail.empty()) ev["detail"] = cls.detail;
          ev["wall"] = outcome.wall_seconds;
          switch (cls.kind) {
            case OutcomeClass::Pass: ++st.pass; break;
            case OutcomeClass::RuntimeError:
              ++st.runtime_error;
              ++st.errors_by_name[cls.detail];
              break;
            case OutcomeClass::Timeout: ++st.timeout; break;
            case OutcomeClass::Other: ++st.other; break;
            case OutcomeClass::Crash: {
              ++st.crash;
              CrashRecord r;
              r.key = dedup_key(outcome, opt.engine, scratch / "test.js");
              r.signal = cls.detail;
              r.source = test->source;
              r.provenance = {{"seed_index", test->seed_index}, {"test_index", index}};
              ev["key"] = r.key;
              ev["new"] = store.insert_if_absent(std::move(r), outcome.stderr_text);
              break;
            }
          }
        }
        std::lock_guard lock(events_mu);
        events << ev.dump() << '\n';
      } catch (...) {
        std::lock_guard lock(abort_mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };

  if (opt.workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < opt.workers; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }

  CampaignStats total;
  for (const auto& s : per_worker) total.merge(s);
  total.unique_crashes = store.unique();
  total.elapsed_seconds = elapsed();
  if (failure) {
    total.aborted = true;
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      total.abort_reason = e.what();
    }
  }
  events.flush();
  write_file(opt.out_dir / "stats.json", total.to_json().dump(2) + "\n");
  if (failure) std::rethrow_exception(failure);
  return total;
}

}  // namespace fraggen::harness
