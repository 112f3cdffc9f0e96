#pragma once

#include <functional>
#include <string>

#include "repayrisk/model.hpp"
#include "repayrisk/quadrature.hpp"

namespace repayrisk::closedform {

// Infinite-horizon default probability as a function of the loan size u,
// tagged with the model family it was derived from. phi(0) = 0, nondecreasing,
// limit 1 as u grows.
struct DefaultCurve {
    std::function<double(double)> phi;
    std::string provenance;

    double psi(double u) const { return 1.0 - phi(u); }
};

// Poisson arrivals (rate lambda) independent of exponential severities
// (rate alpha): phi(u) = P(alpha + 1, lambda u / c), the regularized lower
// incomplete gamma.
double phi_memoryless(double lambda, double alpha, double u, double c);

// Randomized arrivals: W | Lambda ~ Exp(Lambda), Lambda ~ Gamma(k, theta);
// phi(u) = I_x(alpha + 1, k) with x = u theta / (c + u theta).
double phi_randomized(double k, double theta, double alpha, double u, double c);

// Erlang(2, lambda) arrivals. The Laplace transform of phi is
//   phi_hat(s) = e^{-alpha} s^{-1} (s + lambda/c)^{-(alpha+2)}
//                e^{alpha lambda / (lambda + c s)},
// whose inverse is a Poisson(alpha) mixture of regularized incomplete gammas:
//   phi(u) = sum_{m>=0} e^{-alpha} alpha^m / m! * P(alpha + 2 + m, lambda u / c).
// The series is truncated once the remaining Poisson weight drops below
// 1e-14; every term lies in [0, 1].
double phi_erlang2(double lambda, double alpha, double u, double c);

// Laplace transform of the full-repayment probability psi for general
// arrival density with transform fhat_w, exponential severities (alpha).
// fhat_w is the transform of the density (E[e^{-sW}]), evaluated at c*s.
double psi_hat_laplace(const std::function<double(double)>& fhat_w, double alpha,
                       double c, double s,
                       const quadrature::QuadConfig& quad = {1e-11, 1e-9, 4000});

// E[e^{-sW}] for W ~ Exp(lambda), i.e. lambda / (lambda + s).
std::function<double(double)> laplace_exponential_density(double lambda);

// Closed-form curve for the given model, or std::invalid_argument when none
// exists (general Erlang shapes go through the fredholm solver).
DefaultCurve default_curve(const model::DisasterModel& m, double c);

}  // namespace repayrisk::closedform
