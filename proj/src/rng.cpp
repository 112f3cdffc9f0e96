#include "repayrisk/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace repayrisk::rng {

double Engine::exponential(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("rng: exponential rate must be positive");
    return -std::log(uniform01()) / rate;
}

double Engine::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * factor;
    have_cached_normal_ = true;
    return u * factor;
}

double Engine::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw std::domain_error("rng: gamma shape and scale must be positive");
    }
    if (shape < 1.0) {
        // Marsaglia-Tsang boost from shape + 1.
        const double boost = std::pow(uniform01(), 1.0 / shape);
        return gamma(shape + 1.0, scale) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

std::uint64_t Engine::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("rng: poisson mean must be nonnegative");
    // Knuth multiplication in chunks of mean <= 30 to avoid exp underflow;
    // a sum of independent Poisson chunks is Poisson with the summed mean.
    std::uint64_t total = 0;
    while (mean > 30.0) {
        total += poisson(30.0);
        mean -= 30.0;
    }
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform01();
    while (prod > limit) {
        ++k;
        prod *= uniform01();
    }
    return total + k;
}

}  // namespace repayrisk::rng
