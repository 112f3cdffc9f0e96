#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace repayrisk::calibrate {

// Convention the solvency bound is applied under. default_at_most_eps is the
// semantically correct one (phi_inf(u) <= eps). table1_legacy reproduces the
// published memoryless rate table, whose cells match the upper-tail gamma
// inverse at 1e-4 rather than the stated bound; both are first-class so the
// table can be regenerated without treating the quantile convention as the
// solvency bound.
enum class TargetConvention { default_at_most_eps, table1_legacy };

struct SolvencyTarget {
    double epsilon = 1e-4;
    TargetConvention convention = TargetConvention::default_at_most_eps;
};

enum class QuoteMethod { closed_form, bisection };

struct PremiumQuote {
    double min_rate_ratio = 0.0;  // minimum c/u per unit time
    std::string provenance;
    SolvencyTarget target;
    QuoteMethod method = QuoteMethod::closed_form;
};

// Memoryless arrivals: c/u = lambda / x* with x* the regularized incomplete
// gamma inverse of shape alpha + 1 on the convention's tail.
PremiumQuote min_rate_memoryless(double lambda, double alpha, const SolvencyTarget& target);

// Randomized arrivals normalized to E[Lambda] = k theta = 1:
// c/u = (1 - x*) / (k x*) with x* = inv_reg_beta(alpha + 1, k, eps).
PremiumQuote min_rate_randomized(double k, double theta, double alpha,
                                 const SolvencyTarget& target);

// Generic inversion for families without a closed-form inverse. phi_of_c must
// be nonincreasing in c; the bracket is expanded by doubling (up to 60 times)
// until it straddles the target.
PremiumQuote min_rate_bisection(const std::function<double(double)>& phi_of_c, double u,
                                const SolvencyTarget& target, double bracket_lo,
                                double bracket_hi, double tol = 1e-10);

struct PremiumSplit {
    double premium = 0.0;  // c* - c0
    bool capped = false;   // quoted rate was below the base rate
};

PremiumSplit premium_split(double total_rate, double base_rate);

enum class TableFamily { memoryless, randomized };

// Full cartesian grid of min c/u quotes; rows follow the first grid
// (lambda or k), columns the alpha grid.
Eigen::ArrayXXd generate_table(TableFamily family, const std::vector<double>& rows,
                               const std::vector<double>& alphas,
                               const SolvencyTarget& target);

struct ComparisonPoint {
    double lambda = 0.0;
    double phi_memoryless = 0.0;
    double phi_randomized = 0.0;
};

// Default probabilities of the memoryless vs randomized families over a
// lambda grid with E[Lambda] = lambda held fixed; variance v < 0 selects the
// k = 1, theta = lambda parameterization, otherwise k = lambda^2 / v,
// theta = v / lambda.
std::vector<ComparisonPoint> comparison_curves(double alpha, double c, double u,
                                               const std::vector<double>& lambdas,
                                               double variance = -1.0);

}  // namespace repayrisk::calibrate
