#include "repayrisk/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "repayrisk/specfun.hpp"

namespace repayrisk::closedform {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

void require_loan_args(double u, double c) {
    if (!(u >= 0.0) || !std::isfinite(u)) {
        throw std::invalid_argument("u must be nonnegative and finite");
    }
    require_positive(c, "c");
}

}  // namespace

double phi_memoryless(double lambda, double alpha, double u, double c) {
    require_positive(lambda, "lambda");
    require_positive(alpha, "alpha");
    require_loan_args(u, c);
    if (u == 0.0) return 0.0;
    return specfun::reg_gamma_lower(alpha + 1.0, lambda * u / c);
}

double phi_randomized(double k, double theta, double alpha, double u, double c) {
    require_positive(k, "k");
    require_positive(theta, "theta");
    require_positive(alpha, "alpha");
    require_loan_args(u, c);
    if (u == 0.0) return 0.0;
    const double x = u * theta / (c + u * theta);
    return specfun::reg_beta(alpha + 1.0, k, x);
}

double phi_erlang2(double lambda, double alpha, double u, double c) {
    require_positive(lambda, "lambda");
    require_positive(alpha, "alpha");
    require_loan_args(u, c);
    if (u == 0.0) return 0.0;

    const double L = lambda * u / c;
    double phi = 0.0;
    double weight_sum = 0.0;
    const int m_cap = static_cast<int>(alpha + 12.0 * std::sqrt(alpha + 1.0)) + 40;
    for (int m = 0; m <= m_cap; ++m) {
        // Poisson(alpha) weight in log space so large alpha cannot underflow.
        const double w = std::exp(-alpha + m * std::log(alpha) - specfun::log_gamma(m + 1.0));
        phi += w * specfun::reg_gamma_lower(alpha + 2.0 + m, L);
        weight_sum += w;
        if (1.0 - weight_sum < 1e-14) break;
    }
    return std::min(1.0, std::max(0.0, phi));
}

std::function<double(double)> laplace_exponential_density(double lambda) {
    require_positive(lambda, "lambda");
    return [lambda](double s) { return lambda / (lambda + s); };
}

double psi_hat_laplace(const std::function<double(double)>& fhat_w, double alpha,
                       double c, double s, const quadrature::QuadConfig& quad) {
    require_positive(alpha, "alpha");
    require_positive(c, "c");
    require_positive(s, "s");

    //   psi_hat(s) = s^{-1} (1 - fhat(cs))
    //              + alpha s^{-(alpha+1)} fhat(cs)
    //                \int_0^s u^{alpha-1} (1 - fhat(cu))
    //                         e^{\int_u^s alpha v^{-1} fhat(cv) dv} du.
    // Splitting fhat(cv)/v = 1/v - (1 - fhat(cv))/v turns the exponential
    // factor into (s/u)^alpha e^{-(H(s) - H(u))} with
    // H(x) = alpha \int_0^x (1 - fhat(cv))/v dv, whose integrand is smooth at
    // the origin. The powers of u and s then cancel:
    //   psi_hat(s) = s^{-1} [ (1 - fhat(cs))
    //              + alpha fhat(cs) \int_0^s g1(u) e^{-(H(s)-H(u))} du ],
    // with g1(v) = (1 - fhat(cv))/v. All exponents are <= 0.
    auto g1 = [&](double v) { return (1.0 - fhat_w(c * v)) / v; };
    quadrature::QuadConfig inner = quad;
    inner.abs_tol = std::min(quad.abs_tol, 1e-12);
    auto outer_integrand = [&](double u) {
        const double h = alpha * quadrature::integrate(g1, u, s, inner).value;
        return g1(u) * std::exp(-h);
    };
    const double integral = quadrature::integrate(outer_integrand, 0.0, s, quad).value;
    const double fcs = fhat_w(c * s);
    return ((1.0 - fcs) + alpha * fcs * integral) / s;
}

DefaultCurve default_curve(const model::DisasterModel& m, double c) {
    const double alpha = m.severity.alpha;
    if (const auto* e = std::get_if<model::ExponentialArrivals>(&m.arrivals)) {
        const double lambda = e->lambda;
        return {[lambda, alpha, c](double u) { return phi_memoryless(lambda, alpha, u, c); },
                "memoryless"};
    }
    if (const auto* r = std::get_if<model::RandomizedExponentialArrivals>(&m.arrivals)) {
        const double k = r->mixing_shape;
        const double theta = r->mixing_scale;
        return {[k, theta, alpha, c](double u) { return phi_randomized(k, theta, alpha, u, c); },
                "randomized"};
    }
    const auto& erl = std::get<model::ErlangArrivals>(m.arrivals);
    if (erl.shape != 2) {
        throw std::invalid_argument(
            "no closed form for erlang shape != 2; use the fredholm solver");
    }
    const double lambda = erl.rate;
    return {[lambda, alpha, c](double u) { return phi_erlang2(lambda, alpha, u, c); },
            "erlang2"};
}

}  // namespace repayrisk::closedform
