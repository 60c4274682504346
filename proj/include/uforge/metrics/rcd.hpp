#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforge/harness/checkpoint.hpp"
#include "uforge/models/objective.hpp"
#include "uforge/spectral/spectral.hpp"
#include "uforge/training/optimizer.hpp"

namespace uforge::metrics {

enum class PhiKind { loss, one_minus_accuracy };

std::string to_string(PhiKind k);
PhiKind phi_kind_from_string(const std::string& s);

/// Loss for quadratics and regression, 1 - accuracy for classification.
PhiKind default_phi(const models::Objective& obj);

double phi_value(const models::Objective& obj, const ParamVector& theta, PhiKind kind);

struct RcdOptions {
  /// Clamp each e_t at zero before summing. Off by default.
  bool clamp_at_zero = false;
  /// Attach the kappa * loss-gap bound (loss phi only).
  bool attach_bound = true;
  spectral::SpectralConfig spectral;
};

struct RcdReport {
  int K = 0;
  PhiKind phi_kind = PhiKind::loss;
  std::string step_mode;  // "fixed:<eta>" or "adaptive_inv_lambda_max"
  std::string optimizer;
  std::string label;      // "RCD" or "RCD_Adam"
  double phi_ref = 0.0;
  std::vector<double> phi;  // phi at t = 0..K
  std::vector<double> e;    // phi - phi_ref (clamped when requested)
  double rcd_value = 0.0;
  bool clamped = false;
  std::optional<double> kappa_gap_bound;
  std::optional<double> tail_bound;  // bound on the sum of the terms after K
  std::string bound_note;            // "exact", "heuristic", or why no bound
  std::optional<spectral::SpectralEstimate> spectral;
  std::optional<double> tail_estimate;  // geometric extrapolation of the remaining sum
};

/// Relearns theta0 on the forget objective for exactly K epochs and sums the
/// per-epoch excess phi over t = 0..K. Throws NonFiniteError when an error
/// term is not finite.
RcdReport rcd(const ParamVector& theta0, const models::Objective& forget_obj, double phi_ref, int K,
              const training::OptimizerConfig& relearn, PhiKind phi_kind, RngStream rng,
              const RcdOptions& opts = {});
RcdReport rcd(const harness::Checkpoint& ckpt, const models::Objective& forget_obj, double phi_ref, int K,
              const training::OptimizerConfig& relearn, PhiKind phi_kind, RngStream rng,
              const RcdOptions& opts = {});

struct BoundResult {
  std::optional<double> value;
  std::string form;        // "local_kappa" or "global_kappa"
  std::string diagnostic;  // set when value is absent
  std::optional<spectral::SpectralEstimate> spectral;
};

/// kappa(theta) * (loss(theta) - l_star). Quadratics use their global
/// beta/mu; other objectives use the estimated local spectrum.
BoundResult rcd_bound(const ParamVector& theta, const models::Objective& forget_obj, double l_star,
                      const spectral::SpectralConfig& cfg, RngStream& rng);

/// Sum over t > K of the bounding geometric series gap * (1 - 1/kappa)^t.
double rcd_tail_bound(double kappa, double gap, int K);

/// Infinite-horizon RCD of gradient descent with fixed step eta on a
/// quadratic, loss phi, reference l_star. Infinite if eta is not stable.
double quadratic_rcd_limit(const models::Objective& quad, const ParamVector& theta0, double eta);

nlohmann::json to_json(const RcdReport& r);
/// Header: t,phi,e_t,cumulative
void write_csv(std::ostream& os, const RcdReport& r);

}  // namespace uforge::metrics
