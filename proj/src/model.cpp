#include "repayrisk/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace repayrisk::model {

namespace {

void require_positive(double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(key) + " must be positive and finite");
    }
}

}  // namespace

SeverityLaw SeverityLaw::exponential(double alpha) {
    require_positive(alpha, "severity.alpha");
    return SeverityLaw{alpha};
}

DisasterModel DisasterModel::make(ArrivalLaw arrivals, SeverityLaw severity) {
    require_positive(severity.alpha, "severity.alpha");
    std::visit(
        [](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, ExponentialArrivals>) {
                require_positive(law.lambda, "arrivals.lambda");
            } else if constexpr (std::is_same_v<T, ErlangArrivals>) {
                require_positive(law.rate, "arrivals.lambda");
                if (law.shape < 1) {
                    throw std::invalid_argument("arrivals.k must be an integer >= 1");
                }
            } else {
                require_positive(law.mixing_shape, "arrivals.k");
                require_positive(law.mixing_scale, "arrivals.theta");
            }
        },
        arrivals);
    DisasterModel m;
    m.arrivals = arrivals;
    m.severity = severity;
    m.dependence = std::holds_alternative<RandomizedExponentialArrivals>(arrivals)
                       ? Dependence::conditionally_independent
                       : Dependence::independent;
    return m;
}

LoanSpec LoanSpec::make(double u, double c) {
    require_positive(u, "loan.u");
    require_positive(c, "loan.c");
    return LoanSpec{u, c};
}

rng::Engine scenario_engine(const SeedSpec& seed, std::uint64_t scenario_index) {
    std::uint64_t h = seed.master;
    h = rng::mix64(h ^ (0x9E3779B97F4A7C15ULL * (seed.stream + 1)));
    h = rng::mix64(h ^ (0xBF58476D1CE4E5B9ULL * (scenario_index + 1)));
    return rng::Engine(h);
}

double mean_discount(const DisasterModel& m) {
    return m.severity.alpha / (m.severity.alpha + 1.0);
}

double arrival_mean(const ArrivalLaw& law) {
    return std::visit(
        [](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialArrivals>) {
                return 1.0 / l.lambda;
            } else if constexpr (std::is_same_v<T, ErlangArrivals>) {
                return l.shape / l.rate;
            } else {
                // E[W] = E[1/Lambda] = 1 / (theta (k - 1)) for k > 1.
                if (l.mixing_shape <= 1.0) {
                    return std::numeric_limits<double>::infinity();
                }
                return 1.0 / (l.mixing_scale * (l.mixing_shape - 1.0));
            }
        },
        law);
}

double arrival_survival(const ArrivalLaw& law, double w) {
    if (w <= 0.0) return 1.0;
    return std::visit(
        [w](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialArrivals>) {
                return std::exp(-l.lambda * w);
            } else if constexpr (std::is_same_v<T, ErlangArrivals>) {
                const double lw = l.rate * w;
                double term = 1.0;
                double sum = 1.0;
                for (int j = 1; j < l.shape; ++j) {
                    term *= lw / j;
                    sum += term;
                }
                return std::exp(-lw) * sum;
            } else {
                return std::pow(1.0 + l.mixing_scale * w, -l.mixing_shape);
            }
        },
        law);
}

double arrival_density(const ArrivalLaw& law, double w) {
    if (w < 0.0) return 0.0;
    return std::visit(
        [w](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, ExponentialArrivals>) {
                return l.lambda * std::exp(-l.lambda * w);
            } else if constexpr (std::is_same_v<T, ErlangArrivals>) {
                double lognum = l.shape * std::log(l.rate) - l.rate * w;
                if (w > 0.0) lognum += (l.shape - 1) * std::log(w);
                double logfact = 0.0;
                for (int j = 2; j < l.shape; ++j) logfact += std::log(double(j));
                if (w == 0.0 && l.shape > 1) return 0.0;
                return std::exp(lognum - logfact);
            } else {
                return l.mixing_shape * l.mixing_scale *
                       std::pow(1.0 + l.mixing_scale * w, -l.mixing_shape - 1.0);
            }
        },
        law);
}

ScenarioSampler::ScenarioSampler(const DisasterModel& m, const SeedSpec& seed,
                                 std::uint64_t scenario_index, bool antithetic)
    : model_(&m), engine_(scenario_engine(seed, scenario_index)) {
    engine_.set_antithetic(antithetic);
    if (const auto* r = std::get_if<RandomizedExponentialArrivals>(&m.arrivals)) {
        conditional_rate_ = engine_.gamma(r->mixing_shape, r->mixing_scale);
    } else if (const auto* e = std::get_if<ExponentialArrivals>(&m.arrivals)) {
        conditional_rate_ = e->lambda;
    }
}

std::pair<double, double> ScenarioSampler::sample_pair() {
    double w;
    if (const auto* e = std::get_if<ErlangArrivals>(&model_->arrivals)) {
        w = 0.0;
        for (int j = 0; j < e->shape; ++j) w += engine_.exponential(e->rate);
    } else {
        w = engine_.exponential(conditional_rate_);
    }
    const double x = engine_.exponential(model_->severity.alpha);
    return {w, x};
}

double ScenarioSampler::conditional_rate() const {
    if (std::holds_alternative<ErlangArrivals>(model_->arrivals)) {
        throw std::logic_error("conditional_rate: erlang arrivals have no single rate");
    }
    return conditional_rate_;
}

}  // namespace repayrisk::model
