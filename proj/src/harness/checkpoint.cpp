#include "uforge/harness/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "uforge/numcore/error.hpp"

namespace uforge::harness {

namespace {

constexpr char kMagic[4] = {'I', 'E', 'U', 'C'};
constexpr std::size_t kDigestLen = 32;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_text(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u64(out, s.size());
  out.insert(out.end(), s.begin(), s.end());
}

std::array<std::uint8_t, kDigestLen> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, kDigestLen> md{};
  unsigned len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1 || len != kDigestLen) {
    throw Error("SHA-256 computation failed");
  }
  return md;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xf]);
  }
  return s;
}

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  const std::uint8_t* take(std::size_t n) {
    if (size_ - pos_ < n) throw FormatError("checkpoint: truncated");
    const auto* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  std::uint64_t u64() {
    const auto* p = take(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return v;
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
    return v;
  }
  std::string text() {
    const std::uint64_t n = u64();
    const auto* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  bool done() const { return pos_ == size_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

nlohmann::json parse_json(const std::string& s, const char* what) {
  try {
    return nlohmann::json::parse(s);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad ") + what + " JSON: " + e.what());
  }
}

}  // namespace

std::string to_string(Role r) {
  switch (r) {
    case Role::original: return "original";
    case Role::retrain: return "retrain";
    case Role::forget_oracle: return "forget_oracle";
    case Role::unlearned: return "unlearned";
  }
  return "unknown";
}

Role role_from_string(const std::string& s) {
  if (s == "original") return Role::original;
  if (s == "retrain") return Role::retrain;
  if (s == "forget_oracle") return Role::forget_oracle;
  if (s == "unlearned") return Role::unlearned;
  throw InvalidArgument("unknown checkpoint role: " + s);
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  models::validate(ckpt.spec);
  if (ckpt.theta.dim() != ckpt.spec.param_count()) throw DimensionError("checkpoint theta does not match its spec");
  require_finite(ckpt.theta, "checkpoint theta");
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(ckpt.role));
  put_text(out, models::to_json(ckpt.spec).dump());
  put_text(out, ckpt.config.dump());
  put_u64(out, ckpt.root_seed);
  put_u64(out, ckpt.theta.dim());
  for (double x : ckpt.theta) put_u64(out, std::bit_cast<std::uint64_t>(x));
  const auto md = sha256(out);
  out.insert(out.end(), md.begin(), md.end());
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) + kDigestLen) throw FormatError("checkpoint: truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
  const std::size_t body = bytes.size() - kDigestLen;
  const auto md = sha256(std::span<const std::uint8_t>(bytes.data(), body));
  if (std::memcmp(md.data(), bytes.data() + body, kDigestLen) != 0) {
    throw HashMismatchError("checkpoint: content hash mismatch");
  }
  Reader r(bytes.data(), body);
  r.take(4);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported format version " + std::to_string(version));
  }
  const std::uint32_t role = r.u32();
  if (role > static_cast<std::uint32_t>(Role::unlearned)) throw FormatError("checkpoint: unknown role");
  Checkpoint ckpt;
  ckpt.role = static_cast<Role>(role);
  try {
    ckpt.spec = models::model_spec_from_json(parse_json(r.text(), "spec"));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint: invalid model spec: ") + e.what());
  }
  ckpt.config = parse_json(r.text(), "config");
  ckpt.root_seed = r.u64();
  const std::uint64_t d = r.u64();
  if (d != ckpt.spec.param_count()) throw FormatError("checkpoint: parameter count does not match spec");
  std::vector<double> theta(d);
  for (double& x : theta) x = std::bit_cast<double>(r.u64());
  if (!r.done()) throw FormatError("checkpoint: trailing bytes");
  ckpt.theta = ParamVector(std::move(theta));
  if (!ckpt.theta.all_finite()) throw FormatError("checkpoint: non-finite parameters");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  const auto md = sha256(bytes);
  return hex(md);
}

std::string sha256_hex(const std::string& text) {
  return sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string file_sha256_hex(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string checkpoint_id(const Checkpoint& ckpt) { return sha256_hex(encode_checkpoint(ckpt)).substr(0, 16); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingArtifactError("cannot open " + path.string());
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace uforge::harness
