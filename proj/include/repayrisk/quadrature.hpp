#pragma once

#include <functional>

namespace repayrisk::quadrature {

struct QuadConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

// Adaptive Gauss-Kronrod (G7, K15) on the finite interval [a, b].
// Throws std::runtime_error naming the achieved error estimate when the
// interval budget runs out before the tolerance is met.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadConfig& cfg = {});

// Integral over [a, infinity) via the substitution x = a + t / (1 - t).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 const QuadConfig& cfg = {});

}  // namespace repayrisk::quadrature
