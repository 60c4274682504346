#include "uforge/harness/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uforge/data/generators.hpp"
#include "uforge/data/uds_io.hpp"
#include "uforge/harness/checkpoint.hpp"
#include "uforge/harness/compare.hpp"
#include "uforge/harness/experiments.hpp"
#include "uforge/harness/runs.hpp"
#include "uforge/harness/verify.hpp"
#include "uforge/metrics/eval.hpp"
#include "uforge/metrics/rcd.hpp"
#include "uforge/numcore/error.hpp"
#include "uforge/numcore/format.hpp"
#include "uforge/training/train.hpp"
#include "uforge/unlearning/unlearn.hpp"

namespace uforge::harness {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct ModelOpts {
  std::string model = "mlp";
  std::vector<int> hidden{32, 32};
  std::string activation = "relu";
  double weight_decay = 0.0;
};

struct OptimOpts {
  std::string optimizer = "sgd";
  double eta = 0.05;
  std::size_t batch = 32;
  int epochs = 60;
  double tol = 1e-8;
};

struct GlobalOpts {
  std::string runs_dir;
};

void add_model_opts(CLI::App* app, ModelOpts& m) {
  app->add_option("--model", m.model, "logistic or mlp")->check(CLI::IsMember({"logistic", "mlp"}))->capture_default_str();
  app->add_option("--hidden", m.hidden, "hidden layer widths")->delimiter(',')->capture_default_str();
  app->add_option("--activation", m.activation, "relu or tanh")->check(CLI::IsMember({"relu", "tanh"}))->capture_default_str();
  app->add_option("--weight-decay", m.weight_decay, "L2 penalty")->capture_default_str();
}

void add_optim_opts(CLI::App* app, OptimOpts& o, const std::string& prefix = "") {
  app->add_option("--" + prefix + "optimizer", o.optimizer, "gd_fixed, gd_adaptive, sgd or adam")
      ->check(CLI::IsMember({"gd_fixed", "gd_adaptive", "sgd", "adam"}))
      ->capture_default_str();
  app->add_option("--" + prefix + "eta", o.eta, "step size")->capture_default_str();
  app->add_option("--" + prefix + "batch", o.batch, "minibatch size, 0 for full batch")->capture_default_str();
  app->add_option("--" + prefix + "epochs", o.epochs, "maximum epochs")->capture_default_str();
  app->add_option("--" + prefix + "tol", o.tol, "gradient-norm convergence tolerance")->capture_default_str();
}

models::ModelSpec build_spec(const ModelOpts& m, const data::SplitDataset& ds) {
  const auto& d = *ds.data;
  if (!d.is_classification()) throw InvalidArgument("only classification datasets are supported by train");
  const int p = static_cast<int>(d.p);
  if (m.model == "logistic") return models::make_logistic_spec(p, d.num_classes, m.weight_decay);
  return models::make_mlp_spec(p, m.hidden, d.num_classes, models::activation_from_string(m.activation),
                               m.weight_decay);
}

training::OptimizerConfig build_optim(const OptimOpts& o) {
  training::OptimizerConfig c;
  c.kind = training::optimizer_kind_from_string(o.optimizer);
  c.eta = o.eta;
  c.batch_size = o.batch;
  c.max_epochs = o.epochs;
  c.grad_norm_tol = o.tol;
  return c;
}

struct RunContext {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json config;
  fs::path dir;
  RunManifest manifest;
  Clock::time_point start = Clock::now();
};

RunContext open_run(const GlobalOpts& g, const std::string& command, const nlohmann::json& config,
                    std::uint64_t seed) {
  RunContext ctx;
  ctx.command = command;
  ctx.seed = seed;
  ctx.config = config;
  const fs::path root = g.runs_dir.empty() ? runs_root() : fs::path(g.runs_dir);
  const std::string id = experiment_id(command, config, seed);
  ctx.dir = prepare_run_dir(root, id);
  ctx.manifest.experiment_id = id;
  ctx.manifest.command = command;
  ctx.manifest.seed = seed;
  ctx.manifest.config = config;
  return ctx;
}

void close_run(RunContext& ctx, std::ostream& out) {
  ctx.manifest.wall_seconds = std::chrono::duration<double>(Clock::now() - ctx.start).count();
  write_manifest(ctx.dir, ctx.manifest);
  out << "run: " << ctx.dir.string() << '\n';
}

fs::path output_path(const std::string& out_opt, const fs::path& fallback) {
  return out_opt.empty() ? fallback : fs::path(out_opt);
}

nlohmann::json read_json(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("not a JSON report: " + path.string() + ": " + e.what());
  }
}

std::string default_label(const Checkpoint& ckpt) {
  if (ckpt.role == Role::unlearned && ckpt.config.contains("unlearn")) {
    return ckpt.config["unlearn"].value("method", std::string("unlearned"));
  }
  return to_string(ckpt.role);
}

struct UsageError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Machine-unlearning evaluation toolkit", "uforge"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration file; flags override its values");
  GlobalOpts g;
  app.add_option("--runs-dir", g.runs_dir, "root for run directories (default $UNLEARN_FORGE_RUNS_DIR or ./runs)");

  // gen-data
  data::BlobsConfig blobs;
  std::string split = "random";
  double fraction = 0.3;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* gen = app.add_subcommand("gen-data", "generate a Gaussian-blobs dataset with a forget split");
  gen->add_option("--n-per-class", blobs.n_per_class)->capture_default_str();
  gen->add_option("--classes", blobs.num_classes)->capture_default_str();
  gen->add_option("--dim", blobs.dim)->capture_default_str();
  gen->add_option("--separation", blobs.separation)->capture_default_str();
  gen->add_option("--noise", blobs.noise_sd)->capture_default_str();
  gen->add_option("--split", split, "none, random or classwise")
      ->check(CLI::IsMember({"none", "random", "classwise"}))
      ->capture_default_str();
  gen->add_option("--fraction", fraction, "forget fraction")->capture_default_str();
  gen->add_option("--seed", seed)->required();
  gen->add_option("--out", out_path, "dataset path (default <run>/data.uds)");

  // train / retrain
  ModelOpts model;
  OptimOpts optim;
  std::string data_path;
  std::string init_scope = "global_d";
  auto add_train = [&](const char* name, const char* help) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("--data", data_path, "dataset (.uds)")->required();
    add_model_opts(sc, model);
    add_optim_opts(sc, optim);
    sc->add_option("--init-scope", init_scope, "global_d or per_layer_fan_in")
        ->check(CLI::IsMember({"global_d", "per_layer_fan_in"}))
        ->capture_default_str();
    sc->add_option("--seed", seed)->required();
    sc->add_option("--out", out_path, "checkpoint path (default <run>/checkpoints/<role>.ieuc)");
    return sc;
  };
  auto* train_cmd = add_train("train", "train the original model on the full train partition");
  auto* retrain_cmd = add_train("retrain", "train the exact-unlearning reference on the retain set");

  // unlearn
  unlearning::UnlearnConfig ucfg;
  std::string method = "ieu";
  std::string ckpt_path;
  std::string noise_scope = "global_d";
  auto* unl = app.add_subcommand("unlearn", "apply an unlearning method to a checkpoint");
  unl->add_option("--data", data_path)->required();
  unl->add_option("--ckpt", ckpt_path, "checkpoint to unlearn")->required();
  unl->add_option("--method", method)->check(CLI::IsMember({"ft", "rl", "scrub", "salun", "ieu"}))->required();
  unl->add_option("--alpha", ucfg.alpha, "ieu: weight kept on the current parameters")->capture_default_str();
  unl->add_option("--c", ucfg.c, "ieu: forget-set ascent weight")->capture_default_str();
  unl->add_option("--eta", ucfg.eta)->capture_default_str();
  unl->add_option("--epochs", ucfg.epochs)->capture_default_str();
  unl->add_option("--batch", ucfg.batch_size, "0 for full batch")->capture_default_str();
  unl->add_option("--scrub-max-epochs", ucfg.scrub_max_epochs)->capture_default_str();
  unl->add_option("--salun-fraction", ucfg.salun_fraction)->capture_default_str();
  unl->add_option("--noise-scope", noise_scope)
      ->check(CLI::IsMember({"global_d", "per_layer_fan_in"}))
      ->capture_default_str();
  unl->add_option("--clip-ratio", ucfg.clip_ratio, "0 disables clipping")->capture_default_str();
  unl->add_option("--seed", seed)->required();
  unl->add_option("--out", out_path, "checkpoint path (default <run>/checkpoints/unlearned.ieuc)");

  // rcd
  int rcd_k = 30;
  std::string phi = "auto";
  std::string step = "fixed:0.02";
  std::string relearn_optimizer = "sgd";
  std::size_t relearn_batch = 32;
  std::optional<double> phi_ref_opt;
  OptimOpts oracle_optim;
  oracle_optim.epochs = 300;
  bool clamp = false;
  auto* rcd_cmd = app.add_subcommand("rcd", "relearning cost of a checkpoint on its forget set");
  rcd_cmd->add_option("--data", data_path)->required();
  rcd_cmd->add_option("--ckpt", ckpt_path)->required();
  rcd_cmd->add_option("--k", rcd_k, "relearning epochs")->capture_default_str();
  rcd_cmd->add_option("--phi", phi, "loss, error or auto")->check(CLI::IsMember({"auto", "loss", "error"}))->capture_default_str();
  rcd_cmd->add_option("--step", step, "fixed:<eta> or adaptive")->capture_default_str();
  rcd_cmd->add_option("--relearn-optimizer", relearn_optimizer, "gd, sgd or adam (ignored when --step adaptive)")
      ->check(CLI::IsMember({"gd", "sgd", "adam"}))
      ->capture_default_str();
  rcd_cmd->add_option("--relearn-batch", relearn_batch)->capture_default_str();
  rcd_cmd->add_option("--phi-ref", phi_ref_opt, "reference value; computed from a forget oracle when omitted");
  add_optim_opts(rcd_cmd, oracle_optim, "oracle-");
  rcd_cmd->add_flag("--clamp", clamp, "clamp each excess term at zero");
  rcd_cmd->add_option("--seed", seed)->required();
  rcd_cmd->add_option("--out", out_path, "report path (default <run>/reports/rcd.json)");

  // eval
  std::string against;
  std::string label;
  auto* eval_cmd = app.add_subcommand("eval", "accuracies and membership inference for a checkpoint");
  eval_cmd->add_option("--data", data_path)->required();
  eval_cmd->add_option("--ckpt", ckpt_path)->required();
  eval_cmd->add_option("--against", against, "retrain checkpoint for gaps");
  eval_cmd->add_option("--label", label, "row label (default: role or method)");
  eval_cmd->add_option("--out", out_path, "report path (default <run>/reports/eval.json)");

  // compare
  std::vector<std::string> reports;
  std::string format = "csv";
  auto* cmp = app.add_subcommand("compare", "table of eval and rcd reports with gaps to the retrain row");
  cmp->add_option("reports", reports, "eval and rcd report files");
  cmp->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmp->add_option("--out", out_path, "write the table here instead of stdout");

  // verify
  std::uint64_t verify_seed = kDefaultVerifySeed;
  std::string json_out;
  auto* ver = app.add_subcommand("verify", "analytic verification suite");
  ver->add_option("--seed", verify_seed)->capture_default_str();
  ver->add_option("--json", json_out, "also write the structured report here");

  // experiment
  std::string which;
  int n_seeds = 0;
  auto* exp = app.add_subcommand("experiment", "built-in studies: desk (method comparison) or trend (condition number)");
  exp->add_option("name", which)->check(CLI::IsMember({"desk", "trend"}))->required();
  exp->add_option("--seeds", n_seeds, "number of seeds (default: study default)");
  exp->add_option("--seed", seed, "base seed")->required();
  exp->add_option("--out", out_path, "report path (default <run>/reports/<name>.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const std::string what = e.what();
    if (dynamic_cast<const CLI::ExtrasError*>(&e) != nullptr) {
      err << "usage error: unknown arguments: " << what << '\n';
    } else {
      err << "usage error: " << e.get_name() << ": " << what << '\n';
    }
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      data::SplitDataset ds = data::gen_blobs(blobs, seed);
      if (split == "random") ds = data::split_random(ds, fraction, seed);
      if (split == "classwise") ds = data::split_classwise(ds, fraction, seed);
      nlohmann::json cfg = {{"generator", "blobs"},
                            {"n_per_class", blobs.n_per_class},
                            {"classes", blobs.num_classes},
                            {"dim", blobs.dim},
                            {"separation", blobs.separation},
                            {"noise", blobs.noise_sd},
                            {"split", split},
                            {"fraction", fraction}};
      RunContext ctx = open_run(g, "gen-data", cfg, seed);
      const fs::path path = output_path(out_path, ctx.dir / "data.uds");
      data::save_uds(path, ds);
      ctx.manifest.outputs.push_back(artifact_ref(path));
      out << "data: " << path.string() << '\n';
      close_run(ctx, out);
      return kExitOk;
    }

    if (train_cmd->parsed() || retrain_cmd->parsed()) {
      const bool is_retrain = retrain_cmd->parsed();
      const data::SplitDataset ds = data::load_uds(data_path);
      const models::ModelSpec spec = build_spec(model, ds);
      const training::OptimizerConfig oc = build_optim(optim);
      const models::InitScope scope = models::init_scope_from_string(init_scope);
      const auto fit = is_retrain ? training::retrain_oracle(ds, spec, oc, seed, scope)
                                  : training::train_original(ds, spec, oc, seed, scope);
      nlohmann::json cfg = {{"data_sha256", file_sha256_hex(data_path)},
                            {"spec", models::to_json(spec)},
                            {"optimizer", training::to_json(oc)},
                            {"init_scope", init_scope}};
      const std::string command = is_retrain ? "retrain" : "train";
      RunContext ctx = open_run(g, command, cfg, seed);
      ctx.manifest.inputs.push_back(artifact_ref(data_path));
      const fs::path path = output_path(out_path, ctx.dir / "checkpoints" / (to_string(fit.checkpoint.role) + ".ieuc"));
      save_checkpoint(path, fit.checkpoint);
      const fs::path trace_path = ctx.dir / "traces" / (command + ".csv");
      {
        std::ostringstream os;
        training::write_csv(os, fit.trace);
        write_text(trace_path, os.str());
      }
      ctx.manifest.outputs.push_back(artifact_ref(path));
      ctx.manifest.outputs.push_back(artifact_ref(trace_path));
      out << "checkpoint: " << path.string() << '\n';
      out << "stop: " << training::to_string(fit.trace.stop) << " after " << (fit.trace.records.size() - 1)
          << " epochs\n";
      close_run(ctx, out);
      return kExitOk;
    }

    if (unl->parsed()) {
      const data::SplitDataset ds = data::load_uds(data_path);
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      ucfg.method = unlearning::method_from_string(method);
      ucfg.seed = seed;
      ucfg.noise_scope = models::init_scope_from_string(noise_scope);
      const unlearning::UnlearnRun run = unlearning::run_method(ckpt, ds, ucfg);
      Checkpoint res = ckpt;
      res.role = Role::unlearned;
      res.root_seed = seed;
      res.config = {{"unlearn", unlearning::to_json(ucfg)},
                    {"input_id", run.input_id},
                    {"aborted", run.aborted},
                    {"abort_reason", run.abort_reason}};
      res.theta = run.theta;
      nlohmann::json cfg = {{"data_sha256", file_sha256_hex(data_path)},
                            {"input_id", checkpoint_id(ckpt)},
                            {"unlearn", unlearning::to_json(ucfg)}};
      RunContext ctx = open_run(g, "unlearn", cfg, seed);
      ctx.manifest.inputs.push_back(artifact_ref(data_path));
      ctx.manifest.inputs.push_back(artifact_ref(ckpt_path));
      const fs::path path = output_path(out_path, ctx.dir / "checkpoints" / "unlearned.ieuc");
      save_checkpoint(path, res);
      const fs::path trace_path = ctx.dir / "traces" / "unlearn.csv";
      const fs::path summary_path = ctx.dir / "reports" / "unlearn_summary.json";
      {
        std::ostringstream os;
        unlearning::write_csv(os, run);
        write_text(trace_path, os.str());
      }
      write_text(summary_path, unlearning::summary_json(run).dump(2) + "\n");
      for (const auto& p : {path, trace_path, summary_path}) ctx.manifest.outputs.push_back(artifact_ref(p));
      if (run.aborted) err << "warning: unlearning stopped early: " << run.abort_reason << '\n';
      out << "checkpoint: " << path.string() << '\n';
      close_run(ctx, out);
      return kExitOk;
    }

    if (rcd_cmd->parsed()) {
      const data::SplitDataset ds = data::load_uds(data_path);
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      if (ds.forget_idx.empty()) throw UsageError("dataset has an empty forget set");
      const models::Objective forget_obj = models::make_objective(ckpt.spec, ds.data, ds.forget_idx);
      const metrics::PhiKind kind = phi == "auto"    ? metrics::default_phi(forget_obj)
                                    : phi == "loss" ? metrics::PhiKind::loss
                                                    : metrics::PhiKind::one_minus_accuracy;
      training::OptimizerConfig relearn;
      relearn.grad_norm_tol = 0.0;
      if (step == "adaptive") {
        relearn.kind = training::OptimizerKind::gd_adaptive;
      } else if (step.rfind("fixed:", 0) == 0) {
        try {
          std::size_t used = 0;
          relearn.eta = std::stod(step.substr(6), &used);
          if (used != step.size() - 6) throw std::invalid_argument(step);
        } catch (const std::exception&) {
          throw UsageError("--step expects fixed:<eta> or adaptive, got " + step);
        }
        relearn.kind = relearn_optimizer == "gd"    ? training::OptimizerKind::gd_fixed
                       : relearn_optimizer == "sgd" ? training::OptimizerKind::sgd
                                                    : training::OptimizerKind::adam;
        if (relearn.kind != training::OptimizerKind::gd_fixed) relearn.batch_size = relearn_batch;
      } else {
        throw UsageError("--step expects fixed:<eta> or adaptive, got " + step);
      }

      const std::string data_sha = file_sha256_hex(data_path);
      const training::OptimizerConfig oracle_cfg = build_optim(oracle_optim);
      nlohmann::json cfg = {{"data_sha256", data_sha},
                            {"input_id", checkpoint_id(ckpt)},
                            {"K", rcd_k},
                            {"phi", metrics::to_string(kind)},
                            {"relearn", training::to_json(relearn)},
                            {"clamp", clamp}};
      double phi_ref = 0.0;
      std::string phi_ref_source;
      if (phi_ref_opt) {
        phi_ref = *phi_ref_opt;
        phi_ref_source = "given";
      } else {
        const fs::path root = g.runs_dir.empty() ? runs_root() : fs::path(g.runs_dir);
        const nlohmann::json key_json = {{"data_sha256", data_sha},
                                         {"spec", models::to_json(ckpt.spec)},
                                         {"oracle", training::to_json(oracle_cfg)},
                                         {"seed", seed}};
        const std::string key = sha256_hex(key_json.dump()).substr(0, 16);
        const std::string field = metrics::to_string(kind);
        auto cached = load_cached(root, key);
        if (cached && cached->contains(field)) {
          phi_ref = cached->at(field).get<double>();
          phi_ref_source = "cache:" + key;
        } else {
          const auto oracle = training::forget_oracle(ds, ckpt.spec, oracle_cfg, seed);
          nlohmann::json entry = {{"key", key_json}, {"loss", oracle.phi_loss}};
          if (oracle.phi_error) entry["one_minus_accuracy"] = *oracle.phi_error;
          if (!entry.contains(field)) throw UsageError("phi kind " + field + " is undefined for this task");
          store_cached(root, key, entry);
          phi_ref = entry.at(field).get<double>();
          phi_ref_source = "oracle:" + key;
        }
        cfg["oracle"] = training::to_json(oracle_cfg);
      }
      cfg["phi_ref"] = phi_ref;

      metrics::RcdOptions opts;
      opts.clamp_at_zero = clamp;
      const metrics::RcdReport rep =
          metrics::rcd(ckpt, forget_obj, phi_ref, rcd_k, relearn, kind, derive_stream(seed, 6), opts);
      RunContext ctx = open_run(g, "rcd", cfg, seed);
      ctx.manifest.inputs.push_back(artifact_ref(data_path));
      ctx.manifest.inputs.push_back(artifact_ref(ckpt_path));
      const fs::path path = output_path(out_path, ctx.dir / "reports" / "rcd.json");
      const nlohmann::json doc = {{"kind", "rcd"},
                                  {"meta",
                                   {{"checkpoint_id", checkpoint_id(ckpt)},
                                    {"role", to_string(ckpt.role)},
                                    {"phi_ref_source", phi_ref_source}}},
                                  {"rcd", metrics::to_json(rep)}};
      write_text(path, doc.dump(2) + "\n");
      const fs::path trace_path = ctx.dir / "traces" / "rcd.csv";
      {
        std::ostringstream os;
        metrics::write_csv(os, rep);
        write_text(trace_path, os.str());
      }
      ctx.manifest.outputs.push_back(artifact_ref(path));
      ctx.manifest.outputs.push_back(artifact_ref(trace_path));
      out << rep.label << ": " << format_double(rep.rcd_value) << '\n';
      out << "report: " << path.string() << '\n';
      close_run(ctx, out);
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      const data::SplitDataset ds = data::load_uds(data_path);
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      std::optional<metrics::EvalReport> ref;
      nlohmann::json cfg = {{"data_sha256", file_sha256_hex(data_path)}, {"input_id", checkpoint_id(ckpt)}};
      if (!against.empty()) {
        const Checkpoint rc = load_checkpoint(against);
        if (rc.role != Role::retrain) err << "warning: --against checkpoint has role " << to_string(rc.role) << '\n';
        ref = metrics::eval_report(rc, ds);
        cfg["against_id"] = checkpoint_id(rc);
      }
      metrics::EvalReport rep = metrics::eval_report(ckpt, ds, ref ? &*ref : nullptr);
      rep.meta["label"] = label.empty() ? default_label(ckpt) : label;
      cfg["label"] = rep.meta["label"];
      RunContext ctx = open_run(g, "eval", cfg, 0);
      ctx.manifest.inputs.push_back(artifact_ref(data_path));
      ctx.manifest.inputs.push_back(artifact_ref(ckpt_path));
      if (!against.empty()) ctx.manifest.inputs.push_back(artifact_ref(against));
      const fs::path path = output_path(out_path, ctx.dir / "reports" / "eval.json");
      nlohmann::json doc = metrics::to_json(rep);
      doc["kind"] = "eval";
      write_text(path, doc.dump(2) + "\n");
      ctx.manifest.outputs.push_back(artifact_ref(path));
      for (const auto& [name, value] : rep.metrics) out << name << ": " << format_double(value) << '\n';
      if (rep.avg_gap) out << "avg_gap: " << format_double(*rep.avg_gap) << '\n';
      out << "report: " << path.string() << '\n';
      close_run(ctx, out);
      return kExitOk;
    }

    if (cmp->parsed()) {
      if (reports.empty()) throw UsageError("compare needs at least one report");
      std::vector<CompareRow> rows;
      std::map<std::string, double> rcd_by_id;
      for (const auto& p : reports) {
        const nlohmann::json j = read_json(p);
        const std::string kind = j.value("kind", "");
        if (kind == "rcd") {
          rcd_by_id[j.at("meta").at("checkpoint_id").get<std::string>()] = j.at("rcd").at("rcd_value").get<double>();
        } else if (kind == "eval") {
          CompareRow row;
          row.eval = metrics::eval_report_from_json(j);
          row.label = row.eval.meta.value("label", row.eval.meta.value("role", std::string("?")));
          row.is_reference = row.eval.meta.value("role", "") == "retrain";
          rows.push_back(std::move(row));
        } else {
          throw FormatError("not an eval or rcd report: " + p);
        }
      }
      if (rows.empty()) throw UsageError("compare needs at least one eval report");
      for (auto& row : rows) {
        auto it = rcd_by_id.find(row.eval.meta.value("checkpoint_id", ""));
        if (it != rcd_by_id.end()) row.rcd = it->second;
      }
      const CompareTable table = compare(std::move(rows));
      const std::string text = format == "csv" ? to_csv(table) : to_json(table).dump(2) + "\n";
      if (out_path.empty()) {
        out << text;
      } else {
        write_text(out_path, text);
        out << "table: " << out_path << '\n';
      }
      return kExitOk;
    }

    if (ver->parsed()) {
      const VerifyReport rep = verify_suite(verify_seed);
      out << format_table(rep);
      if (!json_out.empty()) write_text(json_out, to_json(rep).dump(2) + "\n");
      if (!rep.all_passed()) {
        err << "verification failed:";
        for (const auto& c : rep.checks) {
          if (!c.passed) err << ' ' << c.name << " (margin " << format_double(c.margin) << ')';
        }
        err << '\n';
        return kExitVerification;
      }
      return kExitOk;
    }

    if (exp->parsed()) {
      nlohmann::json result;
      nlohmann::json cfg = {{"experiment", which}, {"seeds", n_seeds}};
      if (which == "desk") {
        DeskConfig dc = DeskConfig::standard();
        const int count = n_seeds > 0 ? n_seeds : static_cast<int>(dc.seeds.size());
        dc.seeds.clear();
        for (int s = 0; s < count; ++s) dc.seeds.push_back(seed + static_cast<std::uint64_t>(s));
        const DeskResult r = run_desk_experiment(dc);
        result = to_json(r);
        for (std::size_t i = 0; i < r.labels.size(); ++i) {
          out << r.labels[i] << ": rcd " << format_double(r.mean_rcd[i]) << ", avg_gap "
              << format_double(r.mean_avg_gap[i]) << '\n';
        }
      } else {
        TrendConfig tc;
        tc.base_seed = seed;
        if (n_seeds > 0) tc.seeds = n_seeds;
        const TrendResult r = run_trend_study(tc);
        result = to_json(r);
        out << "training: spearman " << format_double(r.training.mean_trace_spearman) << ", sign-test p "
            << format_double(r.training.sign_p_decreasing) << '\n';
        out << "irp: spearman " << format_double(r.irp.mean_trace_spearman) << ", sign-test p "
            << format_double(r.irp.sign_p_increasing) << '\n';
      }
      RunContext ctx = open_run(g, "experiment", cfg, seed);
      const fs::path path = output_path(out_path, ctx.dir / "reports" / (which + ".json"));
      write_text(path, result.dump(2) + "\n");
      ctx.manifest.outputs.push_back(artifact_ref(path));
      out << "report: " << path.string() << '\n';
      close_run(ctx, out);
      return kExitOk;
    }
  } catch (const MissingArtifactError& e) {
    err << "error: missing artifact: " << e.what() << '\n';
    return kExitUsage;
  } catch (const HashMismatchError& e) {
    err << "error: hash mismatch: " << e.what() << '\n';
    return kExitVerification;
  } catch (const FormatError& e) {
    err << "error: malformed artifact: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

}  // namespace uforge::harness
