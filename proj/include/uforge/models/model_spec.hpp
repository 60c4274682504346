#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uforge/numcore/param_vector.hpp"

namespace uforge::models {

enum class ModelKind { quadratic, logistic, mlp };
enum class Activation { relu, tanh };
enum class LossKind { mse, cross_entropy, quadratic_form };

/// L(theta) = 1/2 (theta - theta*)^T diag(spectrum) (theta - theta*) + l_star
struct QuadraticPayload {
  std::vector<double> spectrum;  // non-increasing, strictly positive
  ParamVector theta_star;
  double l_star = 0.0;

  double mu() const { return spectrum.back(); }
  double beta() const { return spectrum.front(); }
};

/// One affine layer inside the flat parameter vector: W (fan_out x fan_in,
/// row-major) at w_offset, then b (fan_out) at b_offset.
struct LayerShape {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::size_t w_offset = 0;
  std::size_t b_offset = 0;
};

/// Model architecture. Logistic regression is the zero-hidden-layer network
/// (multinomial softmax head); MLPs are capped at 3 hidden layers of <= 64
/// units.
struct ModelSpec {
  ModelKind kind = ModelKind::logistic;
  int input_dim = 0;
  /// Number of classes for classification; output width (1) for regression.
  int num_classes = 0;
  std::vector<int> hidden;
  Activation activation = Activation::relu;
  /// Adds weight_decay/2 * ||theta||^2 to every data-driven objective.
  double weight_decay = 0.0;
  std::optional<QuadraticPayload> quadratic;

  std::size_t param_count() const;
  std::vector<LayerShape> layers() const;
};

inline constexpr int kMaxHiddenLayers = 3;
inline constexpr int kMaxHiddenUnits = 64;

ModelSpec make_logistic_spec(int input_dim, int num_classes, double weight_decay = 0.0);
ModelSpec make_mlp_spec(int input_dim, std::vector<int> hidden, int num_classes,
                        Activation act = Activation::relu, double weight_decay = 0.0);
/// Throws InvalidArgument for an unsorted / non-positive spectrum or a
/// theta_star of the wrong size.
ModelSpec make_quadratic_spec(std::vector<double> spectrum, ParamVector theta_star, double l_star);

/// Throws InvalidArgument when the spec violates its invariants.
void validate(const ModelSpec& spec);

std::string to_string(ModelKind k);
std::string to_string(Activation a);
std::string to_string(LossKind k);
ModelKind model_kind_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);
LossKind loss_kind_from_string(const std::string& s);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

}  // namespace uforge::models
