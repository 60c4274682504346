#include "uforge/models/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "uforge/numcore/error.hpp"

namespace uforge::models::kernels {

double log_sum_exp(std::span<const double> z) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

namespace {

struct Workspace {
  explicit Workspace(const ModelSpec& spec) : layers(spec.layers()) {
    const std::size_t nl = layers.size();
    h.resize(nl);
    rh.resize(nl);
    a.resize(nl);
    ra.resize(nl);
    delta.resize(nl);
    rdelta.resize(nl);
    for (std::size_t l = 0; l < nl; ++l) {
      h[l].assign(layers[l].fan_in, 0.0);
      rh[l].assign(layers[l].fan_in, 0.0);
      a[l].assign(layers[l].fan_out, 0.0);
      ra[l].assign(layers[l].fan_out, 0.0);
      delta[l].assign(layers[l].fan_out, 0.0);
      rdelta[l].assign(layers[l].fan_out, 0.0);
    }
    const auto c = static_cast<std::size_t>(spec.num_classes);
    prob.assign(c, 0.0);
    target.assign(c, 0.0);
  }

  std::vector<LayerShape> layers;
  std::vector<std::vector<double>> h, rh, a, ra, delta, rdelta;
  std::vector<double> prob, target;
};

struct ActDerivs {
  double d1;
  double d2;
};

inline double activate(Activation act, double x) {
  return act == Activation::relu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

// ReLU uses the subgradient 0 at exactly 0.
inline ActDerivs derivs(Activation act, double x) {
  if (act == Activation::relu) return {x > 0.0 ? 1.0 : 0.0, 0.0};
  const double t = std::tanh(x);
  const double d1 = 1.0 - t * t;
  return {d1, -2.0 * t * d1};
}

void forward(const ModelSpec& spec, Workspace& ws, std::span<const double> theta,
             std::span<const double> x) {
  std::copy(x.begin(), x.end(), ws.h[0].begin());
  const std::size_t nl = ws.layers.size();
  for (std::size_t l = 0; l < nl; ++l) {
    const LayerShape& L = ws.layers[l];
    const double* w = theta.data() + L.w_offset;
    const double* b = theta.data() + L.b_offset;
    const auto& in = ws.h[l];
    auto& out = ws.a[l];
    for (std::size_t o = 0; o < L.fan_out; ++o) {
      double s = b[o];
      const double* wrow = w + o * L.fan_in;
      for (std::size_t i = 0; i < L.fan_in; ++i) s += wrow[i] * in[i];
      out[o] = s;
    }
    if (l + 1 < nl) {
      for (std::size_t o = 0; o < L.fan_out; ++o) ws.h[l + 1][o] = activate(spec.activation, out[o]);
    }
  }
}

// Fills ws.target for position k of the batch.
void load_target(const ModelSpec& spec, const Batch& batch, std::size_t k, Workspace& ws) {
  const auto c = static_cast<std::size_t>(spec.num_classes);
  const data::Dataset& ds = *batch.data;
  if (!batch.soft_targets.empty()) {
    std::copy_n(batch.soft_targets.begin() + static_cast<std::ptrdiff_t>(k * c), c, ws.target.begin());
    return;
  }
  if (ds.is_classification()) {
    const int y = batch.label_override.empty() ? ds.labels[batch.rows[k]] : batch.label_override[k];
    std::fill(ws.target.begin(), ws.target.end(), 0.0);
    ws.target[static_cast<std::size_t>(y)] = 1.0;
  } else {
    ws.target[0] = ds.targets[batch.rows[k]];
  }
}

// Loss at the output and its gradient written into ws.delta.back().
double output_loss(LossKind loss, Workspace& ws) {
  const auto& z = ws.a.back();
  auto& g = ws.delta.back();
  const std::size_t c = z.size();
  if (loss == LossKind::cross_entropy) {
    const double lse = log_sum_exp(z);
    double value = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      ws.prob[j] = std::exp(z[j] - lse);
      value += ws.target[j] * (lse - z[j]);
      g[j] = ws.prob[j] - ws.target[j];
    }
    return value;
  }
  double value = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    const double r = z[j] - ws.target[j];
    value += 0.5 * r * r;
    g[j] = r;
  }
  return value;
}

void backward(const ModelSpec& spec, Workspace& ws, std::span<const double> theta, double* grad) {
  for (std::size_t l = ws.layers.size(); l-- > 0;) {
    const LayerShape& L = ws.layers[l];
    const auto& d = ws.delta[l];
    const auto& in = ws.h[l];
    for (std::size_t o = 0; o < L.fan_out; ++o) {
      double* grow = grad + L.w_offset + o * L.fan_in;
      for (std::size_t i = 0; i < L.fan_in; ++i) grow[i] += d[o] * in[i];
      grad[L.b_offset + o] += d[o];
    }
    if (l == 0) break;
    const double* w = theta.data() + L.w_offset;
    auto& dprev = ws.delta[l - 1];
    const auto& aprev = ws.a[l - 1];
    for (std::size_t i = 0; i < L.fan_in; ++i) {
      double s = 0.0;
      for (std::size_t o = 0; o < L.fan_out; ++o) s += w[o * L.fan_in + i] * d[o];
      dprev[i] = derivs(spec.activation, aprev[i]).d1 * s;
    }
  }
}

// Pearlmutter R-operator: forward tangent along v, then reverse pass of the
// tangent. Accumulates H v for this example into hv.
void hessian_vector(const ModelSpec& spec, LossKind loss, Workspace& ws,
                    std::span<const double> theta, std::span<const double> v, double* hv) {
  const std::size_t nl = ws.layers.size();
  std::fill(ws.rh[0].begin(), ws.rh[0].end(), 0.0);
  for (std::size_t l = 0; l < nl; ++l) {
    const LayerShape& L = ws.layers[l];
    const double* w = theta.data() + L.w_offset;
    const double* vw = v.data() + L.w_offset;
    const double* vb = v.data() + L.b_offset;
    for (std::size_t o = 0; o < L.fan_out; ++o) {
      double s = vb[o];
      for (std::size_t i = 0; i < L.fan_in; ++i) {
        s += vw[o * L.fan_in + i] * ws.h[l][i] + w[o * L.fan_in + i] * ws.rh[l][i];
      }
      ws.ra[l][o] = s;
    }
    if (l + 1 < nl) {
      for (std::size_t o = 0; o < L.fan_out; ++o) {
        ws.rh[l + 1][o] = derivs(spec.activation, ws.a[l][o]).d1 * ws.ra[l][o];
      }
    }
  }

  const auto& rz = ws.ra.back();
  auto& rg = ws.rdelta.back();
  if (loss == LossKind::cross_entropy) {
    double prz = 0.0;
    for (std::size_t j = 0; j < rz.size(); ++j) prz += ws.prob[j] * rz[j];
    for (std::size_t j = 0; j < rz.size(); ++j) rg[j] = ws.prob[j] * (rz[j] - prz);
  } else {
    std::copy(rz.begin(), rz.end(), rg.begin());
  }

  for (std::size_t l = nl; l-- > 0;) {
    const LayerShape& L = ws.layers[l];
    const auto& d = ws.delta[l];
    const auto& rd = ws.rdelta[l];
    for (std::size_t o = 0; o < L.fan_out; ++o) {
      double* hrow = hv + L.w_offset + o * L.fan_in;
      for (std::size_t i = 0; i < L.fan_in; ++i) hrow[i] += rd[o] * ws.h[l][i] + d[o] * ws.rh[l][i];
      hv[L.b_offset + o] += rd[o];
    }
    if (l == 0) break;
    const double* w = theta.data() + L.w_offset;
    const double* vw = v.data() + L.w_offset;
    for (std::size_t i = 0; i < L.fan_in; ++i) {
      double sw = 0.0, sv = 0.0, swr = 0.0;
      for (std::size_t o = 0; o < L.fan_out; ++o) {
        sw += w[o * L.fan_in + i] * d[o];
        sv += vw[o * L.fan_in + i] * d[o];
        swr += w[o * L.fan_in + i] * rd[o];
      }
      const ActDerivs ad = derivs(spec.activation, ws.a[l - 1][i]);
      ws.delta[l - 1][i] = ad.d1 * sw;
      ws.rdelta[l - 1][i] = ad.d2 * ws.ra[l - 1][i] * sw + ad.d1 * (sv + swr);
    }
  }
}

double process_example(const ModelSpec& spec, LossKind loss, const Batch& batch, std::size_t k,
                       std::span<const double> theta, std::span<const double> v, Mode mode,
                       Workspace& ws, double* vec_out) {
  forward(spec, ws, theta, batch.data->row(batch.rows[k]));
  load_target(spec, batch, k, ws);
  const double l = output_loss(loss, ws);
  if (mode == Mode::gradient) {
    backward(spec, ws, theta, vec_out);
  } else if (mode == Mode::hvp) {
    hessian_vector(spec, loss, ws, theta, v, vec_out);
  }
  return l;
}

void check_batch(const ModelSpec& spec, LossKind loss, const Batch& batch) {
  if (spec.kind == ModelKind::quadratic) throw InvalidArgument("kernels do not handle quadratic models");
  if (batch.data == nullptr) throw InvalidArgument("batch without data");
  if (batch.data->p != static_cast<std::size_t>(spec.input_dim)) {
    throw DimensionError("dataset feature width does not match model input_dim");
  }
  if (loss == LossKind::quadratic_form) throw InvalidArgument("quadratic_form loss on a network model");
  if (!batch.soft_targets.empty() && loss != LossKind::cross_entropy) {
    throw InvalidArgument("soft targets need cross-entropy loss");
  }
}

void forward_logits_row(const ModelSpec& spec, Workspace& ws, const Batch& batch, std::size_t k,
                        std::span<const double> theta, std::span<double> out) {
  forward(spec, ws, theta, batch.data->row(batch.rows[k]));
  const auto c = static_cast<std::size_t>(spec.num_classes);
  std::copy(ws.a.back().begin(), ws.a.back().end(), out.begin() + static_cast<std::ptrdiff_t>(k * c));
}

}  // namespace

namespace serial {

Accumulated accumulate(const ModelSpec& spec, LossKind loss, const Batch& batch,
                       std::span<const double> theta, std::span<const double> v, Mode mode) {
  check_batch(spec, loss, batch);
  const std::size_t d = spec.param_count();
  Accumulated acc;
  std::vector<double>* target = nullptr;
  if (mode == Mode::gradient) target = &acc.grad_sum;
  if (mode == Mode::hvp) target = &acc.hvp_sum;
  if (target) target->assign(d, 0.0);
  Workspace ws(spec);
  for (std::size_t k = 0; k < batch.rows.size(); ++k) {
    acc.loss_sum += process_example(spec, loss, batch, k, theta, v, mode, ws,
                                    target ? target->data() : nullptr);
  }
  return acc;
}

void logits(const ModelSpec& spec, const Batch& batch, std::span<const double> theta,
            std::span<double> out) {
  Workspace ws(spec);
  for (std::size_t k = 0; k < batch.rows.size(); ++k) forward_logits_row(spec, ws, batch, k, theta, out);
}

}  // namespace serial

namespace parallel {

Accumulated accumulate(const ModelSpec& spec, LossKind loss, const Batch& batch,
                       std::span<const double> theta, std::span<const double> v, Mode mode) {
  check_batch(spec, loss, batch);
  const std::size_t d = spec.param_count();
  const std::size_t n = batch.rows.size();
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  const bool want_vec = mode != Mode::value;

  std::vector<double> loss_part(nblocks, 0.0);
  std::vector<double> vec_part(want_vec ? nblocks * d : 0, 0.0);

#pragma omp parallel if (nblocks > 1)
  {
    Workspace ws(spec);
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
      const auto ub = static_cast<std::size_t>(b);
      const std::size_t begin = ub * kBlockSize;
      const std::size_t end = std::min(n, begin + kBlockSize);
      double* vec = want_vec ? vec_part.data() + ub * d : nullptr;
      double s = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        s += process_example(spec, loss, batch, k, theta, v, mode, ws, vec);
      }
      loss_part[ub] = s;
    }
  }

  Accumulated acc;
  for (double s : loss_part) acc.loss_sum += s;
  if (want_vec) {
    std::vector<double> total(d, 0.0);
    for (std::size_t b = 0; b < nblocks; ++b) {
      const double* src = vec_part.data() + b * d;
      for (std::size_t i = 0; i < d; ++i) total[i] += src[i];
    }
    (mode == Mode::gradient ? acc.grad_sum : acc.hvp_sum) = std::move(total);
  }
  return acc;
}

void logits(const ModelSpec& spec, const Batch& batch, std::span<const double> theta,
            std::span<double> out) {
  const std::size_t n = batch.rows.size();
#pragma omp parallel if (n > kBlockSize)
  {
    Workspace ws(spec);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
      forward_logits_row(spec, ws, batch, static_cast<std::size_t>(k), theta, out);
    }
  }
}

}  // namespace parallel

}  // namespace uforge::models::kernels
