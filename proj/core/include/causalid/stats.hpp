#pragma once

namespace causalid {

// Standard normal CDF.
double normal_cdf(double x);

// Chi-squared CDF with k degrees of freedom (k >= 1), via the regularized
// lower incomplete gamma function. Absolute accuracy well under 1e-10.
double chi_squared_cdf(double x, double k);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

}  // namespace causalid
