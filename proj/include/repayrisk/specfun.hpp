#pragma once

namespace repayrisk::specfun {

// Tail convention for probabilities fed to the inverse functions.
enum class Tail { lower, upper };

struct TailProbability {
    double value = 0.0;
    Tail tail = Tail::lower;
};

// log Gamma(x) for x > 0, Lanczos approximation (relative error below 1e-13).
double log_gamma(double x);

// log Beta(a, b) for a, b > 0.
double log_beta(double a, double b);

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
// Series expansion for x < a + 1, continued fraction otherwise.
// Requires a > 0, x >= 0. Monotone nondecreasing in x, P(a, 0) = 0.
double reg_gamma_lower(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed on the
// complementary branch so that small tail values keep full relative accuracy.
double reg_gamma_upper(double a, double x);

// Inverse of the regularized incomplete gamma on the requested tail:
// returns x such that P(a, x) = p (lower) or Q(a, x) = p (upper).
// Safeguarded Newton with bisection fallback, capped at 200 iterations.
// Requires a > 0 and 0 < p < 1.
double inv_reg_gamma(double a, TailProbability p);

// Regularized incomplete beta I_x(a, b). Continued fraction with the
// symmetry I_x(a, b) = 1 - I_{1-x}(b, a). Requires a, b > 0 and x in [0, 1].
double reg_beta(double a, double b, double x);

// Inverse of I_x(a, b): x such that I_x(a, b) = p, 0 < p < 1.
double inv_reg_beta(double a, double b, double p);

}  // namespace repayrisk::specfun
