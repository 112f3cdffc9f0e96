#pragma once

#include <cstdint>
#include <utility>
#include <variant>

#include "repayrisk/rng.hpp"

namespace repayrisk::model {

// Severity X of a single disaster: the surviving fraction of borrowers is
// e^{-X}. Only the exponential law is supported; every closed form below
// relies on it.
struct SeverityLaw {
    double alpha = 1.0;  // rate of X

    static SeverityLaw exponential(double alpha);
};

struct ExponentialArrivals {
    double lambda = 1.0;
};

struct ErlangArrivals {
    int shape = 2;
    double rate = 1.0;
};

// Inter-arrivals exponential given a random rate Lambda ~ Gamma(shape k,
// scale theta); one Lambda per scenario.
struct RandomizedExponentialArrivals {
    double mixing_shape = 1.0;  // k
    double mixing_scale = 1.0;  // theta
};

using ArrivalLaw =
    std::variant<ExponentialArrivals, ErlangArrivals, RandomizedExponentialArrivals>;

enum class Dependence { independent, conditionally_independent };

struct DisasterModel {
    ArrivalLaw arrivals;
    SeverityLaw severity;
    Dependence dependence = Dependence::independent;

    // Validates parameters and fixes the dependence mode implied by the
    // arrival law (randomized arrivals are conditionally independent given
    // Lambda, everything else independent).
    static DisasterModel make(ArrivalLaw arrivals, SeverityLaw severity);

    bool randomized() const {
        return std::holds_alternative<RandomizedExponentialArrivals>(arrivals);
    }
};

struct LoanSpec {
    double u = 1.0;  // loan size
    double c = 1.0;  // repayment rate per unit time

    static LoanSpec make(double u, double c);
};

// (master seed, stream id) fully determines every random sequence; scenario
// engines are derived counter-style so parallel and serial runs agree.
struct SeedSpec {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

rng::Engine scenario_engine(const SeedSpec& seed, std::uint64_t scenario_index);

// E[e^{-X}] = alpha / (alpha + 1), the operator contraction factor;
// strictly below 1 for every valid model.
double mean_discount(const DisasterModel& m);

double arrival_mean(const ArrivalLaw& law);
// Marginal P(W > w); for randomized arrivals this is the Pareto-type mixture
// (1 + theta w)^{-k}.
double arrival_survival(const ArrivalLaw& law, double w);
// Marginal density of W.
double arrival_density(const ArrivalLaw& law, double w);

// Per-scenario sampler for the marked point process. In randomized mode a
// single Lambda is drawn at construction and shared by all inter-arrivals of
// the scenario.
class ScenarioSampler {
  public:
    // antithetic mirrors every uniform of this scenario's stream (set before
    // the scenario's Lambda draw in randomized mode).
    ScenarioSampler(const DisasterModel& m, const SeedSpec& seed,
                    std::uint64_t scenario_index, bool antithetic = false);

    // One (W, X) pair, both strictly positive.
    std::pair<double, double> sample_pair();

    // The exponential rate in effect (lambda, or the scenario's Lambda draw);
    // only defined for exponential / randomized arrivals.
    double conditional_rate() const;

    // Raw engine access for samplers layered on top (Poisson counts, order
    // statistics); draws interleave with sample_pair on the same stream.
    rng::Engine& engine() { return engine_; }

  private:
    const DisasterModel* model_;
    rng::Engine engine_;
    double conditional_rate_ = 0.0;
};

}  // namespace repayrisk::model
