#include "hyperklein/complexity.hpp"

#include <cmath>
#include <string>

#include "hyperklein/errors.hpp"

namespace hyperklein {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("eps must lie in (0, 1), got " + std::to_string(eps));
}

void require_s(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("s must be positive and finite, got " + std::to_string(s));
}

// The raw double is ceiled as-is; no nudge toward the integer below.
int ceil_bound(double value) { return static_cast<int>(std::ceil(value)); }

double dimension_multiplier(int d) { return 2.0 * d * (d + 1.0); }

}  // namespace

void validate(const ComplexityInputs& inputs) {
  if (inputs.d < 1) throw UsageError("dimension d must be at least 1");
  require_s(inputs.s);
  require_eps(inputs.eps);
}

double sinh_cosh_ratio(double s) {
  if (s < 1e-4) {
    const double s2 = s * s;
    return 1.0 + 2.0 * s2 / 3.0 + 2.0 * s2 * s2 / 15.0;
  }
  return std::sinh(2.0 * s) / (2.0 * s);
}

double log_factor(double s, double eps) {
  require_s(s);
  require_eps(eps);
  return std::log(16.0 * sinh_cosh_ratio(s) / eps);
}

int query_bound(const ComplexityInputs& inputs) {
  validate(inputs);
  return ceil_bound(dimension_multiplier(inputs.d) * log_factor(inputs.s, inputs.eps));
}

int simple_upper_bound(const ComplexityInputs& inputs) {
  validate(inputs);
  return ceil_bound(dimension_multiplier(inputs.d) * (2.0 * inputs.s + std::log(16.0 / inputs.eps)));
}

double large_s_expansion(double s, double eps) {
  require_s(s);
  require_eps(eps);
  return std::log(1.0 / eps) + 2.0 * s - std::log(4.0 * s) + std::log(16.0);
}

double small_s_expansion(double s) {
  if (!(s > 0.0 && s <= 0.5)) throw UsageError("small_s_expansion is only used for 0 < s <= 0.5");
  const double s2 = s * s;
  return 1.0 + 2.0 * s2 / 3.0 + 2.0 * s2 * s2 / 15.0;
}

int euclidean_limit_bound(int d, double eps) {
  if (d < 1) throw UsageError("dimension d must be at least 1");
  require_eps(eps);
  return ceil_bound(dimension_multiplier(d) * std::log(16.0 / eps));
}

double zeta(double s) {
  if (!(s >= 0.0)) throw UsageError("zeta requires s >= 0");
  if (s < 1e-4) return 1.0 + s * s / 3.0;
  return s / std::tanh(s);
}

}  // namespace hyperklein
