#include "fraggen/nnlm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

#include "fraggen/errors.hpp"

namespace fraggen::nnlm {

namespace {

constexpr std::size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  return v;
}

std::uint32_t crc_of(const std::string& bytes, std::size_t len) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(len)));
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace

void save_checkpoint(const Model& model, std::uint64_t vocab_hash,
                     const std::filesystem::path& path, const nlohmann::json& info) {
  nlohmann::json manifest = nlohmann::json::array();
  std::string payload;
  auto emit = [&](const std::string& prefix, const Params<float>& p) {
    auto ts = p.tensors();
    for (std::size_t i = 0; i < kTensorCount; ++i) {
      const auto& t = *ts[i];
      manifest.push_back({{"name", prefix + std::string(kTensorNames[i])},
                          {"rows", t.rows()},
                          {"cols", t.cols()},
                          {"offset", payload.size()}});
      for (Eigen::Index k = 0; k < t.size(); ++k) put_u32(payload, std::bit_cast<std::uint32_t>(t(k)));
    }
  };
  emit("", model.params());
  emit("velocity.", model.velocity());

  nlohmann::json header = {{"format", 1},
                           {"hyperparams", model.hyperparams()},
                           {"vocab_size", model.vocab_size()},
                           {"vocab_hash", hex64(vocab_hash)},
                           {"tensors", manifest},
                           {"info", info.is_null() ? nlohmann::json::object() : info}};
  const std::string head = header.dump();
  std::string bytes(kCheckpointMagic, kMagicLen);
  put_u32(bytes, static_cast<std::uint32_t>(head.size()));
  bytes += head;
  bytes += payload;
  put_u32(bytes, crc_of(bytes, bytes.size()));

  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kMagicLen + 8 || bytes.compare(0, kMagicLen, kCheckpointMagic) != 0) {
    throw ChecksumError("not a checkpoint: " + path.string());
  }
  const std::size_t body = bytes.size() - 4;
  if (get_u32(bytes, body) != crc_of(bytes, body)) {
    throw ChecksumError("checkpoint CRC mismatch: " + path.string());
  }
  const std::size_t head_len = get_u32(bytes, kMagicLen);
  const std::size_t head_at = kMagicLen + 4;
  if (head_at + head_len > body) throw ChecksumError("checkpoint header truncated");

  nlohmann::json header;
  Hyperparams hp;
  std::size_t vocab_size = 0;
  try {
    header = nlohmann::json::parse(bytes.substr(head_at, head_len));
    hp = header.at("hyperparams").get<Hyperparams>();
    vocab_size = header.at("vocab_size").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ChecksumError(std::string("bad checkpoint header: ") + e.what());
  }

  Checkpoint ck{Model(hp, vocab_size), 0, header.value("info", nlohmann::json::object())};
  ck.vocab_hash = std::stoull(header.at("vocab_hash").get<std::string>(), nullptr, 16);
  const std::size_t payload_at = head_at + head_len;
  const auto& manifest = header.at("tensors");
  if (manifest.size() != 2 * kTensorCount) throw ChecksumError("checkpoint manifest incomplete");
  auto params = ck.model.params().tensors();
  auto velocity = ck.model.velocity().tensors();
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    auto& t = i < kTensorCount ? *params[i] : *velocity[i - kTensorCount];
    const auto& entry = manifest[i];
    if (entry.at("rows").get<Eigen::Index>() != t.rows() ||
        entry.at("cols").get<Eigen::Index>() != t.cols()) {
      throw ChecksumError("checkpoint tensor shape mismatch: " +
                          entry.at("name").get<std::string>());
    }
    const std::size_t at = payload_at + entry.at("offset").get<std::size_t>();
    if (at + 4 * static_cast<std::size_t>(t.size()) > body) {
      throw ChecksumError("checkpoint payload truncated");
    }
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      t(k) = std::bit_cast<float>(get_u32(bytes, at + 4 * static_cast<std::size_t>(k)));
    }
  }
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const fragmenter::Vocabulary& vocab) {
  auto ck = load_checkpoint(path);
  if (ck.vocab_hash != vocab.hash() || ck.model.vocab_size() != vocab.size()) {
    throw VocabMismatch("checkpoint was trained on a different vocabulary");
  }
  return ck;
}

}  // namespace fraggen::nnlm
