#include "uforge/metrics/rcd.hpp"

#include <cmath>
#include <limits>

#include "uforge/numcore/error.hpp"
#include "uforge/numcore/format.hpp"
#include "uforge/training/optimizer.hpp"

namespace uforge::metrics {

namespace {

nlohmann::json opt_json(const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); }

}  // namespace

std::string to_string(PhiKind k) { return k == PhiKind::loss ? "loss" : "one_minus_accuracy"; }

PhiKind phi_kind_from_string(const std::string& s) {
  if (s == "loss") return PhiKind::loss;
  if (s == "one_minus_accuracy" || s == "error") return PhiKind::one_minus_accuracy;
  throw InvalidArgument("unknown phi kind: " + s);
}

PhiKind default_phi(const models::Objective& obj) {
  return obj.is_classification() ? PhiKind::one_minus_accuracy : PhiKind::loss;
}

double phi_value(const models::Objective& obj, const ParamVector& theta, PhiKind kind) {
  if (kind == PhiKind::loss) return obj.value(theta);
  if (!obj.is_classification()) throw InvalidArgument("accuracy phi needs a classification objective");
  return 1.0 - obj.accuracy(theta);
}

RcdReport rcd(const ParamVector& theta0, const models::Objective& forget_obj, double phi_ref, int K,
              const training::OptimizerConfig& relearn, PhiKind phi_kind, RngStream rng, const RcdOptions& opts) {
  if (K < 0) throw InvalidArgument("K must be non-negative");
  if (!std::isfinite(phi_ref)) throw InvalidArgument("phi_ref must be finite");
  require_same_dim(theta0, ParamVector(forget_obj.dim()), "rcd");
  RcdReport r;
  r.K = K;
  r.phi_kind = phi_kind;
  r.phi_ref = phi_ref;
  r.clamped = opts.clamp_at_zero;
  r.optimizer = training::to_string(relearn.kind);
  r.step_mode = relearn.kind == training::OptimizerKind::gd_adaptive ? "adaptive_inv_lambda_max"
                                                                     : "fixed:" + format_double(relearn.eta);
  r.label = relearn.kind == training::OptimizerKind::adam ? "RCD_Adam" : "RCD";

  if (opts.attach_bound && phi_kind == PhiKind::loss) {
    RngStream srng = rng.child(0x626f756e);
    const BoundResult b = rcd_bound(theta0, forget_obj, phi_ref, opts.spectral, srng);
    r.spectral = b.spectral;
    if (b.value) {
      r.kappa_gap_bound = b.value;
      r.bound_note = forget_obj.is_quadratic() ? "exact" : "heuristic";
      const double gap = forget_obj.value(theta0) - phi_ref;
      const double kappa = forget_obj.is_quadratic() ? models::quadratic_condition_number(forget_obj)
                                                     : *b.spectral->kappa;
      r.tail_bound = rcd_tail_bound(kappa, gap, K);
    } else {
      r.bound_note = b.diagnostic;
    }
  } else if (phi_kind != PhiKind::loss) {
    r.bound_note = "bounds apply to loss phi only";
  }

  training::Stepper stepper(forget_obj, relearn, rng);
  ParamVector theta = theta0;
  double sum = 0.0;
  r.phi.reserve(static_cast<std::size_t>(K) + 1);
  r.e.reserve(static_cast<std::size_t>(K) + 1);
  for (int t = 0; t <= K; ++t) {
    const double phi = phi_value(forget_obj, theta, phi_kind);
    double e = phi - phi_ref;
    if (!std::isfinite(e)) {
      throw NonFiniteError("rcd: error term at t=" + std::to_string(t) + " is " + format_double(e) +
                           " (phi " + format_double(phi) + ", phi_ref " + format_double(phi_ref) + ")");
    }
    if (opts.clamp_at_zero && e < 0.0) e = 0.0;
    r.phi.push_back(phi);
    r.e.push_back(e);
    sum += e;
    if (t < K) stepper.epoch(theta, t);
  }
  r.rcd_value = sum;
  if (phi_kind == PhiKind::loss && K >= 1) {
    const double prev = r.e[static_cast<std::size_t>(K) - 1];
    const double last = r.e[static_cast<std::size_t>(K)];
    if (prev > 0.0 && last > 0.0 && last < prev) {
      const double ratio = last / prev;
      r.tail_estimate = last * ratio / (1.0 - ratio);
    } else if (last == 0.0) {
      r.tail_estimate = 0.0;
    }
  }
  return r;
}

RcdReport rcd(const harness::Checkpoint& ckpt, const models::Objective& forget_obj, double phi_ref, int K,
              const training::OptimizerConfig& relearn, PhiKind phi_kind, RngStream rng, const RcdOptions& opts) {
  if (ckpt.spec.param_count() != forget_obj.dim()) throw DimensionError("checkpoint does not match forget objective");
  return rcd(ckpt.theta, forget_obj, phi_ref, K, relearn, phi_kind, rng, opts);
}

BoundResult rcd_bound(const ParamVector& theta, const models::Objective& forget_obj, double l_star,
                      const spectral::SpectralConfig& cfg, RngStream& rng) {
  BoundResult out;
  const double gap = forget_obj.value(theta) - l_star;
  if (forget_obj.is_quadratic()) {
    const auto& q = *forget_obj.spec().quadratic;
    spectral::SpectralEstimate est;
    est.lambda_max = q.beta();
    est.lambda_min = q.mu();
    est.kappa = q.beta() / q.mu();
    est.psd_flag = true;
    est.converged = true;
    out.spectral = est;
    out.form = "global_kappa";
    out.value = *est.kappa * gap;
    return out;
  }
  out.spectral = spectral::estimate_spectrum(forget_obj, theta, cfg, rng);
  const auto kappa = spectral::condition_number(*out.spectral, cfg.kappa_floor);
  out.form = "local_kappa";
  if (!kappa.value) {
    out.diagnostic = kappa.diagnostic;
    return out;
  }
  out.value = *kappa.value * gap;
  return out;
}

double rcd_tail_bound(double kappa, double gap, int K) {
  if (!(kappa >= 1.0)) throw InvalidArgument("condition number must be >= 1");
  const double rate = 1.0 - 1.0 / kappa;
  return gap * std::pow(rate, K + 1) * kappa;
}

double quadratic_rcd_limit(const models::Objective& quad, const ParamVector& theta0, double eta) {
  if (!quad.is_quadratic()) throw InvalidArgument("closed-form RCD needs a quadratic");
  const auto& q = *quad.spec().quadratic;
  require_same_dim(theta0, q.theta_star, "quadratic_rcd_limit");
  double total = 0.0;
  for (std::size_t i = 0; i < theta0.dim(); ++i) {
    const double r = theta0[i] - q.theta_star[i];
    if (r == 0.0) continue;
    const double m = 1.0 - eta * q.spectrum[i];
    if (std::abs(m) >= 1.0) return std::numeric_limits<double>::infinity();
    total += 0.5 * q.spectrum[i] * r * r / (1.0 - m * m);
  }
  return total;
}

nlohmann::json to_json(const RcdReport& r) {
  nlohmann::json j = {{"K", r.K},
                      {"label", r.label},
                      {"phi_kind", to_string(r.phi_kind)},
                      {"step_mode", r.step_mode},
                      {"optimizer", r.optimizer},
                      {"phi_ref", r.phi_ref},
                      {"rcd_value", r.rcd_value},
                      {"clamped", r.clamped},
                      {"e_t", r.e},
                      {"kappa_gap_bound", opt_json(r.kappa_gap_bound)},
                      {"tail_bound", opt_json(r.tail_bound)},
                      {"bound_note", r.bound_note},
                      {"tail_estimate", opt_json(r.tail_estimate)}};
  j["spectral"] = r.spectral ? spectral::to_json(*r.spectral) : nlohmann::json(nullptr);
  return j;
}

void write_csv(std::ostream& os, const RcdReport& r) {
  os << "t,phi,e_t,cumulative\n";
  double cum = 0.0;
  for (std::size_t t = 0; t < r.e.size(); ++t) {
    cum += r.e[t];
    os << t << ',' << format_double(r.phi[t]) << ',' << format_double(r.e[t]) << ',' << format_double(cum) << '\n';
  }
}

}  // namespace uforge::metrics
