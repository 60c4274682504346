#include "uforge/models/init.hpp"

#include <cmath>

#include "uforge/numcore/error.hpp"

namespace uforge::models {

std::string to_string(InitScope s) { return s == InitScope::global_d ? "global_d" : "per_layer_fan_in"; }

InitScope init_scope_from_string(const std::string& s) {
  if (s == "global_d") return InitScope::global_d;
  if (s == "per_layer_fan_in") return InitScope::per_layer_fan_in;
  throw InvalidArgument("unknown init scope: " + s);
}

ParamVector kaiming_init(const ModelSpec& spec, InitScope scope, RngStream& rng) {
  const std::size_t d = spec.param_count();
  if (scope == InitScope::global_d || spec.kind == ModelKind::quadratic) return kaiming_sample(d, rng);
  ParamVector out(d);
  for (const LayerShape& l : spec.layers()) {
    const double sd = std::sqrt(2.0 / static_cast<double>(l.fan_in));
    normal_fill(out.span().subspan(l.w_offset, l.fan_in * l.fan_out + l.fan_out), sd, rng);
  }
  return out;
}

}  // namespace uforge::models
