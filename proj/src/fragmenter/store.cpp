#include "fraggen/fragmenter/store.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fraggen/errors.hpp"
#include "fraggen/estree/json_codec.hpp"

namespace fraggen::fragmenter {
namespace {

using nlohmann::json;

std::string base64(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string unbase64(const std::string& text) {
  if (text.size() % 4 != 0) throw ConfigError("vocab.jsonl: bad base64 key");
  std::string out(3 * (text.size() / 4), '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ConfigError("vocab.jsonl: bad base64 key");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  return in;
}

json parse_line(const std::string& line, const std::filesystem::path& file, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
  }
}

}  // namespace

void write_store(const std::filesystem::path& dir, const Vocabulary& vocab,
                 const std::vector<EncodedSequence>& sequences) {
  std::filesystem::create_directories(dir);
  const estree::CodecOptions stubs{.allow_stubs = true};

  auto v = open_out(dir / "vocab.jsonl");
  v << json{{"id", kBos}, {"reserved", "BOS"}, {"min_freq", vocab.min_freq()}}.dump() << '\n';
  for (std::size_t k = 0; k < estree::kNodeKindCount; ++k) {
    const auto kind = static_cast<estree::NodeKind>(k);
    v << json{{"id", oov_id(kind)}, {"reserved", "OoV"}, {"kind", estree::kind_name(kind)}}.dump()
      << '\n';
  }
  FragmentId id = kFirstEntryId;
  for (const auto& e : vocab.entries()) {
    v << json{{"id", id++},
              {"key", base64(e.key)},
              {"kind", estree::kind_name(e.fragment.kind())},
              {"frequency", e.frequency},
              {"fragment", estree::encode_ast_json(e.fragment, stubs)}}
             .dump()
      << '\n';
  }

  auto s = open_out(dir / "sequences.jsonl");
  for (const auto& seq : sequences) {
    s << json{{"provenance", seq.provenance}, {"ids", seq.ids}, {"parents", seq.parents}}.dump()
      << '\n';
  }
}

Vocabulary read_vocabulary(const std::filesystem::path& dir) {
  const auto file = dir / "vocab.jsonl";
  auto in = open_in(file);
  const estree::CodecOptions stubs{.allow_stubs = true};
  std::vector<Vocabulary::Entry> entries;
  std::uint32_t min_freq = 5;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = parse_line(line, file, lineno);
    const auto id = j.at("id").get<FragmentId>();
    if (j.contains("reserved")) {
      if (id == kBos && j.contains("min_freq")) min_freq = j["min_freq"].get<std::uint32_t>();
      continue;
    }
    if (id != kFirstEntryId + entries.size()) {
      throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": ids are not dense");
    }
    auto fragment = estree::decode_ast_json(j.at("fragment"), stubs);
    auto key = unbase64(j.at("key").get<std::string>());
    if (key != canonical_key(fragment)) {
      throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                        ": key does not match fragment");
    }
    entries.push_back({std::move(key), std::move(fragment), j.at("frequency").get<std::uint64_t>()});
  }
  return Vocabulary(std::move(entries), min_freq);
}

std::vector<EncodedSequence> read_sequences(const std::filesystem::path& dir) {
  const auto file = dir / "sequences.jsonl";
  auto in = open_in(file);
  std::vector<EncodedSequence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = parse_line(line, file, lineno);
    EncodedSequence seq;
    seq.provenance = j.value("provenance", "");
    seq.ids = j.at("ids").get<std::vector<FragmentId>>();
    seq.parents = j.at("parents").get<std::vector<std::int32_t>>();
    if (seq.ids.size() != seq.parents.size()) {
      throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                        ": ids and parents differ in length");
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace fraggen::fragmenter
