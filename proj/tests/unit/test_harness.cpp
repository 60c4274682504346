#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "helpers.hpp"
#include "uforge/harness/checkpoint.hpp"
#include "uforge/harness/compare.hpp"
#include "uforge/harness/oracles.hpp"
#include "uforge/harness/runs.hpp"
#include "uforge/harness/verify.hpp"
#include "uforge/numcore/error.hpp"

using namespace uforge;
using namespace uforge::harness;
namespace fs = std::filesystem;

namespace {

Checkpoint sample_checkpoint() {
  Checkpoint c;
  c.role = Role::retrain;
  c.spec = models::make_mlp_spec(3, {4}, 2, models::Activation::tanh, 0.01);
  c.config = {{"optimizer", "sgd"}, {"eta", 0.1}};
  c.root_seed = 1234;
  c.theta = testutil::random_theta(c.spec.param_count(), 3);
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

metrics::EvalReport report(const char* role, std::vector<double> values, const char* prov = "p") {
  metrics::EvalReport r;
  r.meta = {{"role", role}, {"provenance", prov}, {"checkpoint_id", role}};
  const char* names[] = {"retain_train_acc", "forget_train_acc", "test_acc", "mia"};
  for (std::size_t i = 0; i < values.size(); ++i) r.metrics.emplace_back(names[i], values[i]);
  return r;
}

}  // namespace

TEST_CASE("checkpoint round trip is byte-identical") {
  const Checkpoint c = sample_checkpoint();
  const auto bytes = encode_checkpoint(c);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "IEUC");
  const Checkpoint back = decode_checkpoint(bytes);
  CHECK(back.theta == c.theta);
  CHECK(back.role == c.role);
  CHECK(back.root_seed == c.root_seed);
  CHECK(encode_checkpoint(back) == bytes);

  TempDir dir("uforge_unit_ckpt");
  save_checkpoint(dir.path / "a.ieuc", c);
  save_checkpoint(dir.path / "b.ieuc", load_checkpoint(dir.path / "a.ieuc"));
  CHECK(file_sha256_hex(dir.path / "a.ieuc") == file_sha256_hex(dir.path / "b.ieuc"));
  CHECK(checkpoint_id(c).size() == 16);
}

TEST_CASE("checkpoint corruption is detected") {
  auto bytes = encode_checkpoint(sample_checkpoint());
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x01;
  CHECK_THROWS_AS(decode_checkpoint(flipped), HashMismatchError);
  auto magic = bytes;
  magic[0] = 'J';
  CHECK_THROWS_AS(decode_checkpoint(magic), FormatError);
  auto version = bytes;
  version[4] = 99;
  CHECK_THROWS_AS(decode_checkpoint(version), FormatError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/x.ieuc"), MissingArtifactError);
}

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex(std::string("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("compare table") {
  std::vector<CompareRow> rows(3);
  rows[0] = {"retrain", report("retrain", {0.9, 0.8, 0.85, 0.4}), 5.0, true};
  rows[1] = {"FT", report("unlearned", {0.92, 0.84, 0.85, 0.46}), 1.0, false};
  rows[2] = {"RL", report("unlearned", {0.88, 0.7, 0.83, 0.3}), 3.0, false};
  const CompareTable t = compare(rows);
  for (double g : t.gaps[0]) CHECK(g == 0.0);
  CHECK(t.avg_gaps[0].value() == 0.0);
  CHECK(t.avg_gaps[1].value() == doctest::Approx(0.03));
  CHECK(t.rcd_rank == std::vector<std::optional<int>>{1, 3, 2});
  const std::string csv = to_csv(t);
  CHECK(csv.rfind("label,retain_train_acc,forget_train_acc,test_acc,mia,avg_gap,rcd,rcd_rank\n", 0) == 0);
  CHECK(csv.find("retrain,0.9 (0),") != std::string::npos);
  CHECK(to_json(t).at("pairs").size() == 3);

  CHECK_THROWS_AS(compare({}), InvalidArgument);
  rows[2].eval = report("unlearned", {0.88, 0.7, 0.83, 0.3}, "other");
  CHECK_THROWS_AS(compare(rows), InvalidArgument);
}

TEST_CASE("run ids and manifests") {
  const nlohmann::json cfg = {{"a", 1}};
  CHECK(experiment_id("train", cfg, 1) == experiment_id("train", cfg, 1));
  CHECK(experiment_id("train", cfg, 1) != experiment_id("train", cfg, 2));
  CHECK(experiment_id("train", cfg, 1) != experiment_id("retrain", cfg, 1));

  TempDir dir("uforge_unit_runs");
  const fs::path run = prepare_run_dir(dir.path, "abc");
  CHECK(fs::is_directory(run / "checkpoints"));
  CHECK(fs::is_directory(run / "reports"));
  CHECK(fs::is_directory(run / "traces"));
  write_text(run / "reports" / "r.json", "{}\n");
  RunManifest m;
  m.experiment_id = "abc";
  m.outputs.push_back(artifact_ref(run / "reports" / "r.json"));
  write_manifest(run, m);
  CHECK(fs::exists(run / "manifest.json"));
  const RunManifest back = manifest_from_json(nlohmann::json::parse(std::string(
      [&] { auto b = read_file(run / "manifest.json"); return std::string(b.begin(), b.end()); }())));
  CHECK(back.outputs.size() == 1);
  verify_manifest(back);
  write_text(run / "reports" / "r.json", "{\"changed\":1}\n");
  CHECK_THROWS_AS(verify_manifest(back), HashMismatchError);
  fs::remove(run / "reports" / "r.json");
  CHECK_THROWS_AS(verify_manifest(back), MissingArtifactError);

  CHECK(!load_cached(dir.path, "k"));
  store_cached(dir.path, "k", {{"loss", 0.5}});
  CHECK(load_cached(dir.path, "k").value().at("loss") == 0.5);
}

TEST_CASE("runs root honours the environment") {
  const char* prev = std::getenv(kRunsDirEnv);
  const std::string saved = prev ? prev : "";
  setenv(kRunsDirEnv, "/tmp/somewhere", 1);
  CHECK(runs_root() == fs::path("/tmp/somewhere"));
  unsetenv(kRunsDirEnv);
  CHECK(runs_root() == fs::path("runs"));
  if (prev) setenv(kRunsDirEnv, saved.c_str(), 1);
}

TEST_CASE("constructed spectra respect the requested shape") {
  RngStream rng = derive_stream(3, 3);
  const auto s = constructed_spectrum(16, 5.0, 100.0, 1.001, rng);
  CHECK(s.size() == 16);
  CHECK(s.front() == 5.0);
  CHECK(s.back() == doctest::Approx(0.05));
  CHECK(s[0] / s[1] >= 1.001 - 1e-12);
  CHECK(std::is_sorted(s.rbegin(), s.rend()));
}

TEST_CASE("verify report helpers") {
  VerifyReport r;
  r.checks.push_back({"a", "claim", true, 0.5, {}});
  CHECK(r.all_passed());
  r.checks.push_back({"b", "claim", false, -0.1, {}});
  CHECK_FALSE(r.all_passed());
  CHECK(format_table(r).find("FAIL") != std::string::npos);
}
