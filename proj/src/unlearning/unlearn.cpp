#include "uforge/unlearning/unlearn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "uforge/numcore/error.hpp"
#include "uforge/numcore/format.hpp"
#include "uforge/training/optimizer.hpp"

namespace uforge::unlearning {

namespace {

constexpr std::uint64_t kUnlearnStream = 3;
constexpr std::uint64_t kNoiseTag = 0x6e6f6973;
constexpr std::uint64_t kForgetOrderTag = 0x666f7264;
constexpr std::uint64_t kRelabelTag = 0x72656c62;

using Batches = std::vector<std::vector<std::size_t>>;

/// Minibatches of one epoch, or an empty list when the epoch is a single
/// full-batch step.
Batches make_batches(std::size_t n, std::size_t batch_size, const RngStream& rng, int epoch) {
  Batches out;
  if (batch_size == 0 || batch_size >= n) return out;
  const auto order = training::epoch_order(n, rng, epoch);
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t stop = std::min(n, start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return out;
}

ParamVector batch_gradient(const models::Objective& obj, const Batches& batches, std::size_t j,
                           const ParamVector& theta) {
  if (batches.empty()) return obj.gradient(theta);
  return obj.subset(batches[j % batches.size()]).gradient(theta);
}

ParamVector draw_init(std::size_t d, RngStream& rng, const models::ModelSpec* spec, models::InitScope scope) {
  if (spec != nullptr && scope == models::InitScope::per_layer_fan_in) {
    if (spec->param_count() != d) throw DimensionError("noise spec does not match parameter dimension");
    return models::kaiming_init(*spec, scope, rng);
  }
  return kaiming_sample(d, rng);
}

models::ModelSpec without_weight_decay(models::ModelSpec spec) {
  spec.weight_decay = 0.0;
  return spec;
}

UnlearnEpoch evaluate(const Problem& p, const ParamVector& theta, int epoch) {
  UnlearnEpoch e;
  e.epoch = epoch;
  if (p.retain) {
    e.retain_loss = p.retain->value(theta);
    if (p.retain->is_classification()) e.retain_acc = p.retain->accuracy(theta);
  }
  e.forget_loss = p.forget.value(theta);
  if (p.forget.is_classification()) e.forget_acc = p.forget.accuracy(theta);
  return e;
}

using EpochFn = std::function<int(ParamVector&, int)>;
using Decorate = std::function<void(UnlearnEpoch&, const ParamVector&)>;

/// Shared epoch loop: evaluation after every epoch and the divergence guard.
/// A diverging epoch is discarded and the run is flagged as aborted.
UnlearnRun drive(const Problem& p, const ParamVector& theta0, const UnlearnConfig& cfg, const EpochFn& step_epoch,
                 const Decorate& decorate = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  require_same_dim(theta0, ParamVector(p.forget.dim()), "unlearning input");
  require_finite(theta0, "unlearning input");
  UnlearnRun run;
  run.config = cfg;
  run.theta = theta0;
  run.initial = evaluate(p, theta0, 0);
  if (decorate) decorate(run.initial, theta0);
  const double ref = run.initial.retain_loss.value_or(run.initial.forget_loss);
  const double limit = cfg.divergence_factor * std::max(std::abs(ref), 1e-12);
  for (int e = 0; e < cfg.epochs; ++e) {
    ParamVector next = run.theta;
    UnlearnEpoch rec;
    try {
      const int clipped = step_epoch(next, e);
      if (!next.all_finite()) throw NonFiniteError("parameters became non-finite");
      rec = evaluate(p, next, e + 1);
      rec.clipped_steps = clipped;
      if (decorate) decorate(rec, next);
    } catch (const NonFiniteError& err) {
      run.aborted = true;
      run.abort_reason = "epoch " + std::to_string(e + 1) + ": " + err.what();
      break;
    }
    const double watched = rec.retain_loss.value_or(rec.forget_loss);
    if (!std::isfinite(watched) || !std::isfinite(rec.forget_loss) || watched > limit) {
      run.aborted = true;
      run.abort_reason = "epoch " + std::to_string(e + 1) + ": loss " + format_double(watched) +
                         " exceeded the divergence guard";
      break;
    }
    run.theta = std::move(next);
    run.trace.push_back(rec);
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

void require_retain(const Problem& p, const char* method) {
  if (!p.retain) throw InvalidArgument(std::string(method) + " needs a non-empty retain set");
}

void require_classification(const Problem& p, const char* method) {
  if (!p.forget.is_classification()) throw InvalidArgument(std::string(method) + " needs a classification task");
}

void check_method(const UnlearnConfig& cfg, Method m) {
  validate(cfg);
  if (cfg.method != m) throw InvalidArgument("config method " + to_string(cfg.method) + " used for " + to_string(m));
}

std::vector<std::int32_t> true_labels(const models::Objective& obj) {
  const auto& v = obj.view();
  if (!v.label_override.empty()) return v.label_override;
  std::vector<std::int32_t> out;
  out.reserve(v.rows.size());
  for (std::size_t r : v.rows) out.push_back(v.data->labels[r]);
  return out;
}

/// Gradient descent on retain plus freshly relabeled forget examples, updating
/// only the coordinates in `mask` when one is given.
UnlearnRun relabel_descent(const Problem& p, const ParamVector& theta0, const UnlearnConfig& cfg,
                           const std::vector<char>* mask) {
  require_retain(p, to_string(cfg.method).c_str());
  require_classification(p, to_string(cfg.method).c_str());
  const RngStream base = derive_stream(cfg.seed, kUnlearnStream);
  const auto& rv = p.retain->view();
  const auto& fv = p.forget.view();
  const auto forget_labels = true_labels(p.forget);
  models::DataView uview;
  uview.data = rv.data;
  uview.rows = rv.rows;
  uview.rows.insert(uview.rows.end(), fv.rows.begin(), fv.rows.end());
  const auto retain_labels = true_labels(*p.retain);
  const int C = p.forget.spec().num_classes;

  auto step_epoch = [&](ParamVector& theta, int e) {
    RngStream lrng = base.child(kRelabelTag).child(static_cast<std::uint64_t>(e));
    models::DataView v = uview;
    v.label_override = retain_labels;
    const auto fresh = resample_labels(forget_labels, C, lrng);
    v.label_override.insert(v.label_override.end(), fresh.begin(), fresh.end());
    const models::Objective obj(p.retain->spec(), models::LossKind::cross_entropy, std::move(v));
    const Batches batches = make_batches(obj.size(), cfg.batch_size, base, e);
    const std::size_t steps = batches.empty() ? 1 : batches.size();
    for (std::size_t j = 0; j < steps; ++j) {
      const ParamVector g = batch_gradient(obj, batches, j, theta);
      require_finite(g, "relabeled gradient");
      for (std::size_t i = 0; i < theta.dim(); ++i) {
        if (mask == nullptr || (*mask)[i]) theta[i] += -cfg.eta * g[i];
      }
    }
    return 0;
  };
  return drive(p, theta0, cfg, step_epoch);
}

Problem problem_for(const harness::Checkpoint& ckpt, const data::SplitDataset& data) {
  return make_problem(ckpt, data);
}

template <typename Fn>
UnlearnRun with_checkpoint(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg,
                           Fn&& fn) {
  const Problem p = problem_for(ckpt, data);
  UnlearnRun run = fn(p, ckpt.theta, cfg);
  run.input_id = harness::checkpoint_id(ckpt);
  return run;
}

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

nlohmann::json opt_json(const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); }

nlohmann::json epoch_json(const UnlearnEpoch& e) {
  return {{"epoch", e.epoch},
          {"retain_loss", opt_json(e.retain_loss)},
          {"forget_loss", e.forget_loss},
          {"retain_acc", opt_json(e.retain_acc)},
          {"forget_acc", opt_json(e.forget_acc)},
          {"clipped_steps", e.clipped_steps},
          {"forget_kl", opt_json(e.forget_kl)}};
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::ft: return "ft";
    case Method::rl: return "rl";
    case Method::scrub: return "scrub";
    case Method::salun: return "salun";
    case Method::ieu: return "ieu";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "ft") return Method::ft;
  if (s == "rl") return Method::rl;
  if (s == "scrub") return Method::scrub;
  if (s == "salun") return Method::salun;
  if (s == "ieu") return Method::ieu;
  throw InvalidArgument("unknown unlearning method: " + s);
}

void validate(const UnlearnConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(cfg.c >= 0.0 && cfg.c <= 1.0)) throw InvalidArgument("c must lie in [0, 1]");
  if (!(cfg.eta > 0.0 && std::isfinite(cfg.eta))) throw InvalidArgument("step size must be positive");
  if (cfg.epochs < 0) throw InvalidArgument("epochs must be non-negative");
  if (cfg.scrub_max_epochs < 0) throw InvalidArgument("scrub max-step epochs must be non-negative");
  if (!(cfg.salun_fraction > 0.0 && cfg.salun_fraction <= 1.0)) throw InvalidArgument("salun fraction must lie in (0, 1]");
  if (!(cfg.clip_ratio >= 0.0)) throw InvalidArgument("clip ratio must be non-negative");
  if (!(cfg.divergence_factor > 0.0)) throw InvalidArgument("divergence factor must be positive");
}

nlohmann::json to_json(const UnlearnConfig& cfg) {
  nlohmann::json j = {{"method", to_string(cfg.method)},
                      {"eta", cfg.eta},
                      {"epochs", cfg.epochs},
                      {"batch_size", cfg.batch_size == 0 ? nlohmann::json("full") : nlohmann::json(cfg.batch_size)},
                      {"seed", cfg.seed},
                      {"divergence_factor", cfg.divergence_factor}};
  switch (cfg.method) {
    case Method::ieu:
      j["alpha"] = cfg.alpha;
      j["c"] = cfg.c;
      j["noise_scope"] = models::to_string(cfg.noise_scope);
      j["clip_ratio"] = cfg.clip_ratio;
      j["allow_empty_retain"] = cfg.allow_empty_retain;
      break;
    case Method::scrub: j["scrub_max_epochs"] = cfg.scrub_max_epochs; break;
    case Method::salun: j["salun_fraction"] = cfg.salun_fraction; break;
    case Method::ft:
    case Method::rl: break;
  }
  return j;
}

UnlearnConfig unlearn_config_from_json(const nlohmann::json& j) {
  UnlearnConfig c;
  try {
    c.method = method_from_string(j.at("method").get<std::string>());
    c.eta = j.value("eta", c.eta);
    c.epochs = j.value("epochs", c.epochs);
    const auto bs = j.value("batch_size", nlohmann::json("full"));
    c.batch_size = bs.is_string() ? 0 : bs.get<std::size_t>();
    c.seed = j.value("seed", c.seed);
    c.divergence_factor = j.value("divergence_factor", c.divergence_factor);
    c.alpha = j.value("alpha", c.alpha);
    c.c = j.value("c", c.c);
    c.noise_scope = models::init_scope_from_string(j.value("noise_scope", std::string("global_d")));
    c.clip_ratio = j.value("clip_ratio", c.clip_ratio);
    c.allow_empty_retain = j.value("allow_empty_retain", c.allow_empty_retain);
    c.scrub_max_epochs = j.value("scrub_max_epochs", c.scrub_max_epochs);
    c.salun_fraction = j.value("salun_fraction", c.salun_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed unlearning config: ") + e.what());
  }
  validate(c);
  return c;
}

bool same_result(const UnlearnRun& a, const UnlearnRun& b) {
  return a.initial == b.initial && a.trace == b.trace && a.theta == b.theta && a.aborted == b.aborted &&
         a.abort_reason == b.abort_reason;
}

void write_csv(std::ostream& os, const UnlearnRun& run) {
  os << "epoch,retain_loss,forget_loss,retain_acc,forget_acc,clipped_steps,forget_kl\n";
  auto row = [&](const UnlearnEpoch& e) {
    os << e.epoch << ',' << opt(e.retain_loss) << ',' << format_double(e.forget_loss) << ',' << opt(e.retain_acc)
       << ',' << opt(e.forget_acc) << ',' << e.clipped_steps << ',' << opt(e.forget_kl) << '\n';
  };
  row(run.initial);
  for (const auto& e : run.trace) row(e);
}

nlohmann::json summary_json(const UnlearnRun& run) {
  nlohmann::json j = {{"input_id", run.input_id},
                      {"config", to_json(run.config)},
                      {"initial", epoch_json(run.initial)},
                      {"epochs_completed", run.trace.size()},
                      {"aborted", run.aborted},
                      {"abort_reason", run.abort_reason}};
  j["final"] = epoch_json(run.trace.empty() ? run.initial : run.trace.back());
  return j;
}

Problem make_problem(const harness::Checkpoint& ckpt, const data::SplitDataset& data) {
  data::validate(data);
  if (ckpt.spec.kind == models::ModelKind::quadratic) throw InvalidArgument("quadratic checkpoints carry no dataset");
  if (data.forget_idx.empty()) throw InvalidArgument("empty forget set");
  if (ckpt.theta.dim() != ckpt.spec.param_count()) throw DimensionError("checkpoint theta does not match its spec");
  Problem p{std::nullopt, models::Objective(without_weight_decay(ckpt.spec),
                                            data.data->is_classification() ? models::LossKind::cross_entropy
                                                                           : models::LossKind::mse,
                                            models::DataView{data.data, data.forget_idx, {}, {}})};
  if (!data.retain_idx.empty()) p.retain = models::make_objective(ckpt.spec, data.data, data.retain_idx);
  return p;
}

ParamVector ieu_step(const ParamVector& theta, const ParamVector& grad_r, const ParamVector& grad_f, double alpha,
                     double c, double eta, RngStream& rng, const models::ModelSpec* spec, models::InitScope scope) {
  require_same_dim(theta, grad_r, "ieu_step retain gradient");
  require_same_dim(theta, grad_f, "ieu_step forget gradient");
  require_finite(grad_r, "retain gradient");
  require_finite(grad_f, "forget gradient");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(eta >= 0.0)) throw InvalidArgument("step size must be non-negative");
  ParamVector out = theta;
  if (alpha != 1.0) {
    const ParamVector init = draw_init(theta.dim(), rng, spec, scope);
    for (std::size_t i = 0; i < out.dim(); ++i) out[i] = alpha * theta[i] + (1.0 - alpha) * init[i];
  }
  axpy_inplace(-eta, grad_r, out);
  if (c != 0.0) axpy_inplace(c * eta, grad_f, out);
  return out;
}

UnlearnRun ieu_run(const Problem& p, const ParamVector& theta0, const UnlearnConfig& cfg, const StepObserver& observer) {
  check_method(cfg, Method::ieu);
  if (!p.retain && !cfg.allow_empty_retain) {
    throw InvalidArgument("ieu with an empty retain set must be requested explicitly");
  }
  const RngStream base = derive_stream(cfg.seed, kUnlearnStream);
  const RngStream forget_base = base.child(kForgetOrderTag);
  const models::ModelSpec& spec = p.forget.spec();
  const ParamVector zero(p.forget.dim());
  long step = 0;

  auto step_epoch = [&](ParamVector& theta, int e) {
    const Batches rb = p.retain ? make_batches(p.retain->size(), cfg.batch_size, base, e) : Batches{};
    const Batches fb = make_batches(p.forget.size(), cfg.batch_size, forget_base, e);
    const std::size_t steps = p.retain ? std::max<std::size_t>(rb.size(), 1) : std::max<std::size_t>(fb.size(), 1);
    int clipped = 0;
    for (std::size_t j = 0; j < steps; ++j, ++step) {
      const ParamVector gr = p.retain ? batch_gradient(*p.retain, rb, j, theta) : zero;
      ParamVector gf = zero;
      bool clip = false;
      if (cfg.c != 0.0) {
        gf = batch_gradient(p.forget, fb, j, theta);
        const double nr = norm2(gr);
        const double nf = norm2(gf);
        if (cfg.clip_ratio > 0.0 && nr > 0.0 && nf > cfg.clip_ratio * nr) {
          scale_inplace(cfg.clip_ratio * nr / nf, gf);
          clip = true;
          ++clipped;
        }
      }
      RngStream nrng = base.child(kNoiseTag).child(static_cast<std::uint64_t>(step));
      ParamVector next = ieu_step(theta, gr, gf, cfg.alpha, cfg.c, cfg.eta, nrng, &spec, cfg.noise_scope);
      if (observer) {
        observer(StepInfo{e, step, &theta, &gr, cfg.c != 0.0 ? &gf : nullptr, &next, clip});
      }
      theta = std::move(next);
    }
    return clipped;
  };
  return drive(p, theta0, cfg, step_epoch);
}

UnlearnRun ieu_run(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg,
                   const StepObserver& observer) {
  return with_checkpoint(ckpt, data, cfg,
                         [&](const Problem& p, const ParamVector& t, const UnlearnConfig& c) {
                           return ieu_run(p, t, c, observer);
                         });
}

UnlearnRun finetune(const Problem& p, const ParamVector& theta0, const UnlearnConfig& cfg) {
  check_method(cfg, Method::ft);
  require_retain(p, "ft");
  training::OptimizerConfig oc;
  oc.kind = training::OptimizerKind::sgd;
  oc.eta = cfg.eta;
  oc.batch_size = cfg.batch_size >= p.retain->size() ? 0 : cfg.batch_size;
  training::Stepper stepper(*p.retain, oc, derive_stream(cfg.seed, kUnlearnStream));
  return drive(p, theta0, cfg, [&](ParamVector& theta, int e) {
    stepper.epoch(theta, e);
    return 0;
  });
}

UnlearnRun finetune(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg) {
  return with_checkpoint(ckpt, data, cfg, [](const Problem& p, const ParamVector& t, const UnlearnConfig& c) {
    return finetune(p, t, c);
  });
}

std::vector<std::int32_t> resample_labels(std::span<const std::int32_t> labels, int num_classes, RngStream& rng) {
  if (num_classes < 2) throw InvalidArgument("relabeling needs at least two classes");
  std::vector<std::int32_t> out(labels.size());
  const auto others = static_cast<std::uint64_t>(num_classes - 1);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const auto shift = static_cast<std::int32_t>(1 + rng.uniform_index(others));
    out[k] = (labels[k] + shift) % num_classes;
  }
  return out;
}

UnlearnRun random_label(const Problem& p, const ParamVector& theta0, const UnlearnConfig& cfg) {
  check_method(cfg, Method::rl);
  return relabel_descent(p, theta0, cfg, nullptr);
}

UnlearnRun random_label(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg) {
  return with_checkpoint(ckpt, data, cfg, [](const Problem& p, const ParamVector& t, const UnlearnConfig& c) {
    return random_label(p, t, c);
  });
}

std::vector<char> saliency_mask(const ParamVector& forget_grad, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("salun fraction must lie in (0, 1]");
  const std::size_t d = forget_grad.dim();
  const auto k = std::min(d, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(d))));
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(forget_grad[a]) > std::abs(forget_grad[b]);
  });
  std::vector<char> mask(d, 0);
  for (std::size_t r = 0; r < k; ++r) mask[idx[r]] = 1;
  return mask;
}

UnlearnRun salun_lite(const Problem& p, const ParamVector& theta0, const UnlearnConfig& cfg) {
  check_method(cfg, Method::salun);
  const auto mask = saliency_mask(p.forget.gradient(theta0), cfg.salun_fraction);
  return relabel_descent(p, theta0, cfg, &mask);
}

UnlearnRun salun_lite(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg) {
  return with_checkpoint(ckpt, data, cfg, [](const Problem& p, const ParamVector& t, const UnlearnConfig& c) {
    return salun_lite(p, t, c);
  });
}

UnlearnRun scrub_lite(const Problem& p, const ParamVector& theta0, const UnlearnConfig& cfg) {
  check_method(cfg, Method::scrub);
  require_retain(p, "scrub");
  require_classification(p, "scrub");
  const RngStream base = derive_stream(cfg.seed, kUnlearnStream);
  const RngStream forget_base = base.child(kForgetOrderTag);
  const models::ModelSpec plain = without_weight_decay(p.forget.spec());

  auto teacher_view = [&](const models::Objective& obj) {
    models::DataView v{obj.view().data, obj.view().rows, {}, obj.probabilities(theta0)};
    return v;
  };
  auto entropy = [](const std::vector<double>& probs, std::size_t n) {
    double h = 0.0;
    for (double q : probs) {
      if (q > 0.0) h -= q * std::log(q);
    }
    return h / static_cast<double>(n);
  };
  const models::Objective kl_forget(plain, models::LossKind::cross_entropy, teacher_view(p.forget));
  const models::Objective kl_retain(plain, models::LossKind::cross_entropy, teacher_view(*p.retain));
  const double h_forget = entropy(kl_forget.view().soft_targets, kl_forget.size());

  auto step_epoch = [&](ParamVector& theta, int e) {
    if (e < cfg.scrub_max_epochs) {
      const Batches fb = make_batches(kl_forget.size(), cfg.batch_size, forget_base, e);
      const std::size_t steps = std::max<std::size_t>(fb.size(), 1);
      for (std::size_t j = 0; j < steps; ++j) {
        const ParamVector g = batch_gradient(kl_forget, fb, j, theta);
        require_finite(g, "forget KL gradient");
        axpy_inplace(cfg.eta, g, theta);
      }
    }
    const Batches rb = make_batches(p.retain->size(), cfg.batch_size, base, e);
    const std::size_t steps = std::max<std::size_t>(rb.size(), 1);
    for (std::size_t j = 0; j < steps; ++j) {
      ParamVector g = batch_gradient(*p.retain, rb, j, theta);
      axpy_inplace(1.0, batch_gradient(kl_retain, rb, j, theta), g);
      require_finite(g, "retain gradient");
      axpy_inplace(-cfg.eta, g, theta);
    }
    return 0;
  };
  auto decorate = [&](UnlearnEpoch& rec, const ParamVector& theta) {
    rec.forget_kl = kl_forget.value(theta) - h_forget;
  };
  return drive(p, theta0, cfg, step_epoch, decorate);
}

UnlearnRun scrub_lite(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg) {
  return with_checkpoint(ckpt, data, cfg, [](const Problem& p, const ParamVector& t, const UnlearnConfig& c) {
    return scrub_lite(p, t, c);
  });
}

UnlearnRun run_method(const harness::Checkpoint& ckpt, const data::SplitDataset& data, const UnlearnConfig& cfg) {
  switch (cfg.method) {
    case Method::ft: return finetune(ckpt, data, cfg);
    case Method::rl: return random_label(ckpt, data, cfg);
    case Method::scrub: return scrub_lite(ckpt, data, cfg);
    case Method::salun: return salun_lite(ckpt, data, cfg);
    case Method::ieu: return ieu_run(ckpt, data, cfg);
  }
  throw InvalidArgument("unknown unlearning method");
}

void irp_visit(const ParamVector& theta0, double alpha, long steps, RngStream& rng,
               const std::function<void(long, const ParamVector&)>& visit, const models::ModelSpec* spec,
               models::InitScope scope) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (steps < 0) throw InvalidArgument("steps must be non-negative");
  if (theta0.empty()) throw InvalidArgument("empty parameter vector");
  ParamVector theta = theta0;
  visit(0, theta);
  for (long t = 1; t <= steps; ++t) {
    if (alpha != 1.0) {
      const ParamVector init = draw_init(theta.dim(), rng, spec, scope);
      for (std::size_t i = 0; i < theta.dim(); ++i) theta[i] = alpha * theta[i] + (1.0 - alpha) * init[i];
    }
    visit(t, theta);
  }
}

std::vector<ParamVector> irp_run(const ParamVector& theta0, double alpha, long steps, RngStream& rng) {
  std::vector<ParamVector> out;
  out.reserve(static_cast<std::size_t>(std::max(steps, 0L)) + 1);
  irp_visit(theta0, alpha, steps, rng, [&](long, const ParamVector& t) { out.push_back(t); });
  return out;
}

}  // namespace uforge::unlearning
