#include "uforge/data/uds_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "uforge/numcore/error.hpp"

namespace uforge::data {

namespace {

constexpr char kMagic[4] = {'U', 'D', 'S', '1'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  const std::uint8_t* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw FormatError("uds: truncated file");
    const std::uint8_t* p = bytes_.data() + pos_;
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
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_uds(const SplitDataset& ds) {
  validate(ds);
  const Dataset& d = *ds.data;
  nlohmann::json h;
  h["schema_version"] = kUdsSchemaVersion;
  h["n"] = d.n;
  h["p"] = d.p;
  h["task"] = d.is_classification() ? "classification" : "regression";
  h["num_classes"] = d.num_classes;
  h["dtype"] = "f64le";
  h["label_dtype"] = d.is_classification() ? "i32le" : "f64le";
  h["provenance"] = ds.provenance;
  h["splits"] = {{"train", ds.train_idx},          {"test", ds.test_idx},
                 {"retain", ds.retain_idx},        {"forget", ds.forget_idx},
                 {"forgotten_classes", ds.forgotten_classes},
                 {"test_retain", ds.test_retain_idx}, {"test_forget", ds.test_forget_idx}};
  const std::string header = h.dump();

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u64(out, header.size());
  out.insert(out.end(), header.begin(), header.end());
  for (double x : d.features) put_u64(out, std::bit_cast<std::uint64_t>(x));
  if (d.is_classification()) {
    for (auto y : d.labels) put_u32(out, static_cast<std::uint32_t>(y));
  } else {
    for (double y : d.targets) put_u64(out, std::bit_cast<std::uint64_t>(y));
  }
  return out;
}

SplitDataset decode_uds(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw FormatError("uds: bad magic");
  const std::uint64_t hlen = r.u64();
  const auto* hp = r.take(hlen);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(hp, hp + hlen);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("uds: bad header: ") + e.what());
  }
  SplitDataset ds;
  try {
    if (h.at("schema_version").get<int>() != kUdsSchemaVersion) throw FormatError("uds: unsupported schema version");
    if (h.at("dtype").get<std::string>() != "f64le") throw FormatError("uds: unsupported dtype");
    auto d = std::make_shared<Dataset>();
    d->n = h.at("n").get<std::size_t>();
    d->p = h.at("p").get<std::size_t>();
    const std::string task = h.at("task").get<std::string>();
    if (task != "classification" && task != "regression") throw FormatError("uds: unknown task " + task);
    d->task = task == "classification" ? TaskKind::classification : TaskKind::regression;
    d->num_classes = h.at("num_classes").get<int>();
    d->features.resize(d->n * d->p);
    for (double& x : d->features) x = r.f64();
    if (d->is_classification()) {
      d->labels.resize(d->n);
      for (auto& y : d->labels) y = static_cast<std::int32_t>(r.u32());
    } else {
      d->targets.resize(d->n);
      for (double& y : d->targets) y = r.f64();
    }
    if (!r.done()) throw FormatError("uds: trailing bytes");
    const auto& s = h.at("splits");
    ds.train_idx = s.at("train").get<std::vector<std::size_t>>();
    ds.test_idx = s.at("test").get<std::vector<std::size_t>>();
    ds.retain_idx = s.at("retain").get<std::vector<std::size_t>>();
    ds.forget_idx = s.at("forget").get<std::vector<std::size_t>>();
    ds.forgotten_classes = s.at("forgotten_classes").get<std::vector<int>>();
    ds.test_retain_idx = s.at("test_retain").get<std::vector<std::size_t>>();
    ds.test_forget_idx = s.at("test_forget").get<std::vector<std::size_t>>();
    ds.provenance = h.at("provenance");
    ds.data = std::move(d);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("uds: bad header: ") + e.what());
  }
  try {
    validate(ds);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("uds: invalid splits: ") + e.what());
  }
  return ds;
}

void save_uds(const std::filesystem::path& path, const SplitDataset& ds) {
  const auto bytes = encode_uds(ds);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed: " + path.string());
}

SplitDataset load_uds(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingArtifactError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_uds(bytes);
}

}  // namespace uforge::data
