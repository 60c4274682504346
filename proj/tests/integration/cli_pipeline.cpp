#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "uforge/harness/checkpoint.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run(const fs::path& work, const std::string& args) {
  const std::string cmd = "cd '" + work.string() + "' && UNLEARN_FORGE_RUNS_DIR='" + (work / "runs").string() +
                          "' '" UFORGE_CLI_PATH "' " + args + " > out.txt 2> err.txt";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(work / "out.txt");
  r.err = slurp(work / "err.txt");
  return r;
}

const char* kArtifacts[] = {"d.uds", "o.ieuc", "r.ieuc", "u.ieuc", "u_rcd.json", "r_rcd.json",
                            "u_eval.json", "r_eval.json", "table.csv"};

void pipeline(const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string steps[] = {
      "gen-data --n-per-class 40 --classes 3 --dim 3 --noise 1.5 --seed 7 --out d.uds",
      "train --data d.uds --hidden 8 --epochs 20 --batch 16 --seed 7 --out o.ieuc",
      "retrain --data d.uds --hidden 8 --epochs 20 --batch 16 --seed 7 --out r.ieuc",
      "unlearn --data d.uds --ckpt o.ieuc --method ieu --alpha 0.9999 --c 0 --eta 0.05 --epochs 3 --batch 16 "
      "--seed 7 --out u.ieuc",
      "rcd --data d.uds --ckpt u.ieuc --k 5 --phi error --step fixed:0.02 --oracle-epochs 50 --oracle-batch 16 --relearn-batch 16 --seed 7 --out u_rcd.json",
      "rcd --data d.uds --ckpt r.ieuc --k 5 --phi error --step fixed:0.02 --oracle-epochs 50 --oracle-batch 16 --relearn-batch 16 --seed 7 --out r_rcd.json",
      "eval --data d.uds --ckpt u.ieuc --against r.ieuc --label IEU-Noisy --out u_eval.json",
      "eval --data d.uds --ckpt r.ieuc --against r.ieuc --out r_eval.json",
      "compare u_eval.json r_eval.json u_rcd.json r_rcd.json --out table.csv",
  };
  for (const auto& s : steps) {
    const Result r = run(work, s);
    INFO(s << "\n" << r.err);
    REQUIRE(r.code == 0);
  }
}

}  // namespace

TEST_CASE("pipeline is byte-reproducible") {
  const fs::path a = fs::temp_directory_path() / "uforge_it_a";
  const fs::path b = fs::temp_directory_path() / "uforge_it_b";
  pipeline(a);
  pipeline(b);
  for (const char* name : kArtifacts) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
  const std::string table = slurp(a / "table.csv");
  CHECK(table.find("IEU-Noisy,") != std::string::npos);
  CHECK(table.find("retrain,") != std::string::npos);

  // The phi reference was cached by the first rcd call and reused by the second.
  const std::string second = slurp(a / "r_rcd.json");
  CHECK(second.find("\"phi_ref_source\": \"cache:") != std::string::npos);

  // Each run directory has the documented layout and a verifiable manifest.
  int manifests = 0;
  for (const auto& entry : fs::directory_iterator(a / "runs")) {
    if (!fs::exists(entry.path() / "manifest.json")) continue;
    ++manifests;
    CHECK(fs::is_directory(entry.path() / "checkpoints"));
    CHECK(fs::is_directory(entry.path() / "reports"));
    CHECK(fs::is_directory(entry.path() / "traces"));
  }
  CHECK(manifests == 8);
  fs::remove_all(b);
}

TEST_CASE("exit codes and diagnostics") {
  const fs::path w = fs::temp_directory_path() / "uforge_it_a";
  REQUIRE(fs::exists(w / "u.ieuc"));

  Result r = run(w, "train --data d.uds --seed 1 --bogus");
  CHECK(r.code == 1);
  CHECK(r.err.find("unknown arguments") != std::string::npos);

  r = run(w, "train --data d.uds");
  CHECK(r.code == 1);
  CHECK(r.err.find("--seed") != std::string::npos);

  r = run(w, "eval --data missing.uds --ckpt u.ieuc");
  CHECK(r.code == 1);
  CHECK(r.err.find("missing artifact") != std::string::npos);

  {
    auto bytes = uforge::harness::read_file(w / "u.ieuc");
    bytes[bytes.size() / 2] ^= 0x10;
    uforge::harness::write_file(w / "bad.ieuc", bytes);
  }
  r = run(w, "eval --data d.uds --ckpt bad.ieuc");
  CHECK(r.code == 2);
  CHECK(r.err.find("hash mismatch") != std::string::npos);

  r = run(w, "compare");
  CHECK(r.code == 1);
  CHECK(r.err.find("at least one report") != std::string::npos);

  r = run(w, "rcd --data d.uds --ckpt u.ieuc --step sometimes --seed 1");
  CHECK(r.code == 1);
  CHECK(r.err.find("--step") != std::string::npos);

  r = run(w, "--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("config file values yield to flags") {
  const fs::path w = fs::temp_directory_path() / "uforge_it_a";
  {
    std::ofstream cfg(w / "cfg.toml");
    cfg << "[train]\nepochs = 2\nhidden = [4]\n";
  }
  Result r = run(w, "--config cfg.toml train --data d.uds --seed 3 --out c1.ieuc");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("after 2 epochs") != std::string::npos);
  r = run(w, "--config cfg.toml train --data d.uds --seed 3 --epochs 3 --out c2.ieuc");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("after 3 epochs") != std::string::npos);
  fs::remove_all(w);
}
