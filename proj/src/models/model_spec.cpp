#include "uforge/models/model_spec.hpp"

#include <cmath>

#include "uforge/numcore/error.hpp"

namespace uforge::models {

std::vector<LayerShape> ModelSpec::layers() const {
  std::vector<LayerShape> out;
  if (kind == ModelKind::quadratic) return out;
  std::vector<std::size_t> dims;
  dims.push_back(static_cast<std::size_t>(input_dim));
  for (int h : hidden) dims.push_back(static_cast<std::size_t>(h));
  dims.push_back(static_cast<std::size_t>(num_classes));
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    LayerShape s;
    s.fan_in = dims[l];
    s.fan_out = dims[l + 1];
    s.w_offset = offset;
    s.b_offset = offset + s.fan_in * s.fan_out;
    offset = s.b_offset + s.fan_out;
    out.push_back(s);
  }
  return out;
}

std::size_t ModelSpec::param_count() const {
  if (kind == ModelKind::quadratic) return quadratic ? quadratic->spectrum.size() : 0;
  const auto ls = layers();
  return ls.empty() ? 0 : ls.back().b_offset + ls.back().fan_out;
}

ModelSpec make_logistic_spec(int input_dim, int num_classes, double weight_decay) {
  ModelSpec s;
  s.kind = ModelKind::logistic;
  s.input_dim = input_dim;
  s.num_classes = num_classes;
  s.weight_decay = weight_decay;
  validate(s);
  return s;
}

ModelSpec make_mlp_spec(int input_dim, std::vector<int> hidden, int num_classes, Activation act,
                        double weight_decay) {
  ModelSpec s;
  s.kind = ModelKind::mlp;
  s.input_dim = input_dim;
  s.num_classes = num_classes;
  s.hidden = std::move(hidden);
  s.activation = act;
  s.weight_decay = weight_decay;
  validate(s);
  return s;
}

ModelSpec make_quadratic_spec(std::vector<double> spectrum, ParamVector theta_star, double l_star) {
  ModelSpec s;
  s.kind = ModelKind::quadratic;
  s.quadratic = QuadraticPayload{std::move(spectrum), std::move(theta_star), l_star};
  validate(s);
  return s;
}

void validate(const ModelSpec& spec) {
  if (spec.kind == ModelKind::quadratic) {
    if (!spec.quadratic) throw InvalidArgument("quadratic model without payload");
    const auto& q = *spec.quadratic;
    if (q.spectrum.empty()) throw InvalidArgument("quadratic spectrum is empty");
    for (std::size_t i = 0; i < q.spectrum.size(); ++i) {
      if (!(q.spectrum[i] > 0.0) || !std::isfinite(q.spectrum[i])) {
        throw InvalidArgument("quadratic spectrum must be strictly positive and finite");
      }
      if (i > 0 && q.spectrum[i] > q.spectrum[i - 1]) {
        throw InvalidArgument("quadratic spectrum must be sorted non-increasing");
      }
    }
    if (q.theta_star.dim() != q.spectrum.size()) {
      throw InvalidArgument("theta_star dimension does not match spectrum");
    }
    if (!q.theta_star.all_finite() || !std::isfinite(q.l_star)) {
      throw InvalidArgument("quadratic payload has non-finite entries");
    }
    return;
  }
  if (spec.input_dim <= 0) throw InvalidArgument("input_dim must be positive");
  if (spec.num_classes <= 0) throw InvalidArgument("num_classes must be positive");
  if (spec.weight_decay < 0.0) throw InvalidArgument("weight_decay must be non-negative");
  if (spec.kind == ModelKind::logistic && !spec.hidden.empty()) {
    throw InvalidArgument("logistic model takes no hidden layers");
  }
  if (spec.kind == ModelKind::mlp) {
    if (spec.hidden.empty() || spec.hidden.size() > kMaxHiddenLayers) {
      throw InvalidArgument("mlp needs 1..3 hidden layers");
    }
    for (int h : spec.hidden) {
      if (h <= 0 || h > kMaxHiddenUnits) throw InvalidArgument("mlp hidden width must be in 1..64");
    }
  }
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::quadratic: return "quadratic";
    case ModelKind::logistic: return "logistic";
    case ModelKind::mlp: return "mlp";
  }
  return "?";
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::mse: return "mse";
    case LossKind::cross_entropy: return "cross_entropy";
    case LossKind::quadratic_form: return "quadratic_form";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "quadratic") return ModelKind::quadratic;
  if (s == "logistic") return ModelKind::logistic;
  if (s == "mlp") return ModelKind::mlp;
  throw InvalidArgument("unknown model kind: " + s);
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw InvalidArgument("unknown activation: " + s);
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "mse") return LossKind::mse;
  if (s == "cross_entropy") return LossKind::cross_entropy;
  if (s == "quadratic_form") return LossKind::quadratic_form;
  throw InvalidArgument("unknown loss kind: " + s);
}

nlohmann::json to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["kind"] = to_string(spec.kind);
  if (spec.kind == ModelKind::quadratic) {
    const auto& q = *spec.quadratic;
    j["spectrum"] = q.spectrum;
    j["theta_star"] = q.theta_star.values();
    j["l_star"] = q.l_star;
    return j;
  }
  j["input_dim"] = spec.input_dim;
  j["num_classes"] = spec.num_classes;
  j["hidden"] = spec.hidden;
  j["activation"] = to_string(spec.activation);
  j["weight_decay"] = spec.weight_decay;
  j["param_count"] = spec.param_count();
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  try {
    ModelSpec s;
    s.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (s.kind == ModelKind::quadratic) {
      s.quadratic = QuadraticPayload{j.at("spectrum").get<std::vector<double>>(),
                                     ParamVector(j.at("theta_star").get<std::vector<double>>()),
                                     j.at("l_star").get<double>()};
    } else {
      s.input_dim = j.at("input_dim").get<int>();
      s.num_classes = j.at("num_classes").get<int>();
      s.hidden = j.value("hidden", std::vector<int>{});
      s.activation = activation_from_string(j.value("activation", std::string("relu")));
      s.weight_decay = j.value("weight_decay", 0.0);
    }
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model spec: ") + e.what());
  }
}

}  // namespace uforge::models
