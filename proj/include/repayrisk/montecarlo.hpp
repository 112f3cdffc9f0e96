#pragma once

#include <cstdint>
#include <vector>

#include "repayrisk/gridfunction.hpp"
#include "repayrisk/model.hpp"

namespace repayrisk::montecarlo {

// One scenario of the cash-flow process U_t = c * int_0^t e^{R_s} ds.
struct ScenarioOutcome {
    double cash_at_horizon = 0.0;       // U_t (exact when full_path was requested)
    bool defaulted = true;              // tau_u >= t
    double first_passage = 0.0;         // tau_u, valid when reached is true
    bool reached = false;               // loan fully repaid strictly before t
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sqrt(mean (1 - mean) / n); pair-mean based
                             // when antithetic scenarios are used
    std::int64_t n = 0;
    model::SeedSpec seed;
    double elapsed_seconds = 0.0;
};

enum class Algorithm { renewal = 1, poisson_order_statistics = 2 };

// Algorithm 1 core: renewal loop with per-event discounting; stops early at
// the first passage unless full_path (histograms need the exact U_t).
ScenarioOutcome simulate_scenario(const model::LoanSpec& loan, double t,
                                  model::ScenarioSampler& sampler, bool full_path = false);

// phi(u, t) estimate by the renewal simulation (Algorithm 1). With
// antithetic on, scenarios come in mirrored pairs (n must be even) and the
// standard error is computed from the pair means.
MonteCarloEstimate simulate_algorithm1(const model::DisasterModel& m,
                                       const model::LoanSpec& loan, double t, std::int64_t n,
                                       const model::SeedSpec& seed, int workers = 1,
                                       bool antithetic = false);

// phi(u, t) estimate by Poisson count + uniform order statistics
// (Algorithm 2); exponential (or conditionally exponential) arrivals only.
MonteCarloEstimate simulate_algorithm2(const model::DisasterModel& m,
                                       const model::LoanSpec& loan, double t, std::int64_t n,
                                       const model::SeedSpec& seed, int workers = 1);

MonteCarloEstimate simulate(const model::DisasterModel& m, const model::LoanSpec& loan,
                            double t, std::int64_t n, const model::SeedSpec& seed,
                            Algorithm alg, int workers = 1);

struct Histogram {
    Eigen::ArrayXd edges;                // bins + 1 edges spanning [0, c t]
    std::vector<std::int64_t> counts;    // sums to n
};

Histogram histogram_cashflow(const model::DisasterModel& m, const model::LoanSpec& loan,
                             double t, std::int64_t n, int bins, const model::SeedSpec& seed,
                             Algorithm alg = Algorithm::renewal, int workers = 1);

struct ConvergencePoint {
    double t = 0.0;
    double phi_hat = 0.0;
    double std_error = 0.0;
};

// phi(u, t) over a t-grid from one scenario set: each scenario is simulated
// once to max(t_grid) and contributes 1_{tau_u >= t} at every t, so the curve
// is nonincreasing by construction.
std::vector<ConvergencePoint> convergence_study(const model::DisasterModel& m,
                                                const model::LoanSpec& loan,
                                                const std::vector<double>& t_grid,
                                                std::int64_t n, const model::SeedSpec& seed,
                                                int workers = 1);

// Empirical survival curve of U_t on a u-grid (common scenarios across u):
// psi_hat(u, t) = #{U_t >= u} / n.
grid::GridFunction empirical_psi_curve(const model::DisasterModel& m, double c, double t,
                                       const Eigen::ArrayXd& u_grid, std::int64_t n,
                                       const model::SeedSpec& seed, int workers = 1);

}  // namespace repayrisk::montecarlo
