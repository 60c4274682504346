#pragma once

#include <string>

#include "uforge/models/model_spec.hpp"
#include "uforge/numcore/param_vector.hpp"
#include "uforge/numcore/rng.hpp"

namespace uforge::models {

/// Variance convention for Kaiming draws. global_d treats theta as one
/// vector in R^d (variance 2/d); per_layer_fan_in uses each layer's fan-in.
enum class InitScope { global_d, per_layer_fan_in };

std::string to_string(InitScope s);
InitScope init_scope_from_string(const std::string& s);

/// Kaiming normal draw for every parameter of the model.
ParamVector kaiming_init(const ModelSpec& spec, InitScope scope, RngStream& rng);

}  // namespace uforge::models
