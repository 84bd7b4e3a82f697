#pragma once

// Closed-form query budget of the one-shot Klein cutting-plane method,
//   N(d, s, eps) = ceil(2 d (d+1) log(16 sinh(s) cosh(s) / (s eps))),
// with its asymptotic forms.

namespace hyperklein {

struct ComplexityInputs {
  int d = 1;
  double s = 1.0;    // dimensionless radius kappa * r
  double eps = 0.1;  // target accuracy in (0, 1)
};

/// Throws UsageError unless d >= 1, s > 0 and 0 < eps < 1.
void validate(const ComplexityInputs& inputs);

/// sinh(s) cosh(s) / s, computed as sinh(2s) / (2s) with a series below 1e-4.
double sinh_cosh_ratio(double s);

/// log(16 sinh(s) cosh(s) / (s eps)).
double log_factor(double s, double eps);

int query_bound(const ComplexityInputs& inputs);

/// ceil(2 d (d+1) (2s + log(16/eps))), always >= query_bound.
int simple_upper_bound(const ComplexityInputs& inputs);

/// log(1/eps) + 2s - log(4s) + log 16; exceeds log_factor by -log(1 - e^{-4s}).
double large_s_expansion(double s, double eps);

/// 1 + 2s^2/3 + 2s^4/15 for 0 < s <= 0.5.
double small_s_expansion(double s);

/// ceil(2 d (d+1) log(16/eps)), the s -> 0 limit of query_bound.
int euclidean_limit_bound(int d, double eps);

/// s / tanh(s), with zeta(0) = 1.
double zeta(double s);

}  // namespace hyperklein
