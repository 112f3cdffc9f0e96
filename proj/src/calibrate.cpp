#include "repayrisk/calibrate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "repayrisk/closedform.hpp"
#include "repayrisk/specfun.hpp"

namespace repayrisk::calibrate {

namespace {

void validate_target(const SolvencyTarget& t) {
    if (!(t.epsilon > 0.0) || !(t.epsilon < 1.0)) {
        throw std::invalid_argument("solvency epsilon must lie strictly in (0, 1)");
    }
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

PremiumQuote min_rate_memoryless(double lambda, double alpha, const SolvencyTarget& target) {
    require_positive(lambda, "lambda");
    require_positive(alpha, "alpha");
    validate_target(target);
    const auto tail = target.convention == TargetConvention::default_at_most_eps
                          ? specfun::Tail::lower
                          : specfun::Tail::upper;
    const double x = specfun::inv_reg_gamma(alpha + 1.0, {target.epsilon, tail});
    return {lambda / x, "memoryless", target, QuoteMethod::closed_form};
}

PremiumQuote min_rate_randomized(double k, double theta, double alpha,
                                 const SolvencyTarget& target) {
    require_positive(k, "k");
    require_positive(theta, "theta");
    require_positive(alpha, "alpha");
    validate_target(target);
    if (std::fabs(k * theta - 1.0) > 1e-9) {
        throw std::invalid_argument(
            "min_rate_randomized assumes the normalization k * theta = 1");
    }
    if (target.convention != TargetConvention::default_at_most_eps) {
        throw std::invalid_argument(
            "min_rate_randomized supports only the default_at_most_eps convention");
    }
    const double x = specfun::inv_reg_beta(alpha + 1.0, k, target.epsilon);
    return {(1.0 - x) / (k * x), "randomized", target, QuoteMethod::closed_form};
}

PremiumQuote min_rate_bisection(const std::function<double(double)>& phi_of_c, double u,
                                const SolvencyTarget& target, double bracket_lo,
                                double bracket_hi, double tol) {
    require_positive(u, "u");
    require_positive(bracket_lo, "bracket_lo");
    validate_target(target);
    if (!(bracket_hi > bracket_lo)) {
        throw std::invalid_argument("bracket_hi must exceed bracket_lo");
    }
    const double eps = target.epsilon;

    // phi is nonincreasing in c: expand until phi(lo) >= eps >= phi(hi).
    double lo = bracket_lo, hi = bracket_hi;
    double f_lo = phi_of_c(lo) - eps;
    double f_hi = phi_of_c(hi) - eps;
    for (int i = 0; i < 60 && f_lo < 0.0; ++i) {
        lo /= 2.0;
        f_lo = phi_of_c(lo) - eps;
    }
    for (int i = 0; i < 60 && f_hi > 0.0; ++i) {
        hi *= 2.0;
        f_hi = phi_of_c(hi) - eps;
    }
    if (f_lo < 0.0 || f_hi > 0.0) {
        std::ostringstream msg;
        msg << "min_rate_bisection: bracket failure after 60 doublings; phi(" << lo
            << ") - eps = " << f_lo << ", phi(" << hi << ") - eps = " << f_hi;
        throw std::runtime_error(msg.str());
    }

    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double f = phi_of_c(mid) - eps;
        if (std::fabs(f) <= tol || (hi - lo) < tol * mid) break;
        (f > 0.0 ? lo : hi) = mid;
    }
    return {mid / u, "bisection", target, QuoteMethod::bisection};
}

PremiumSplit premium_split(double total_rate, double base_rate) {
    require_positive(base_rate, "base rate");
    if (!(total_rate >= 0.0) || !std::isfinite(total_rate)) {
        throw std::invalid_argument("total rate must be nonnegative and finite");
    }
    if (total_rate < base_rate) return {0.0, true};
    return {total_rate - base_rate, false};
}

Eigen::ArrayXXd generate_table(TableFamily family, const std::vector<double>& rows,
                               const std::vector<double>& alphas,
                               const SolvencyTarget& target) {
    if (rows.empty() || alphas.empty()) {
        throw std::invalid_argument("generate_table: parameter grids must be nonempty");
    }
    Eigen::ArrayXXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(alphas.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < alphas.size(); ++j) {
            const double cell =
                family == TableFamily::memoryless
                    ? min_rate_memoryless(rows[i], alphas[j], target).min_rate_ratio
                    : min_rate_randomized(rows[i], 1.0 / rows[i], alphas[j], target)
                          .min_rate_ratio;
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cell;
        }
    }
    return out;
}

std::vector<ComparisonPoint> comparison_curves(double alpha, double c, double u,
                                               const std::vector<double>& lambdas,
                                               double variance) {
    require_positive(alpha, "alpha");
    require_positive(c, "c");
    require_positive(u, "u");
    std::vector<ComparisonPoint> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        require_positive(lambda, "lambda");
        double k, theta;
        if (variance <= 0.0) {
            k = 1.0;
            theta = lambda;
        } else {
            k = lambda * lambda / variance;
            theta = variance / lambda;
        }
        out.push_back({lambda, closedform::phi_memoryless(lambda, alpha, u, c),
                       closedform::phi_randomized(k, theta, alpha, u, c)});
    }
    return out;
}

}  // namespace repayrisk::calibrate
