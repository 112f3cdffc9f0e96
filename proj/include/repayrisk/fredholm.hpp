#pragma once

#include <vector>

#include "repayrisk/gridfunction.hpp"
#include "repayrisk/model.hpp"

namespace repayrisk::fredholm {

// Discretization of the integral operators. The solver works on a uniform
// lattice with du = c * dt so that every w-quadrature node and every shifted
// argument u - cw lands exactly on lattice nodes: the finite- and
// infinite-horizon operators then share their discretization error, which is
// what lets the computed L1 gap between the two solutions follow the
// exponential decay bound all the way down to ~1e-9.
struct OperatorConfig {
    double u_max = 20.0;
    int n_u = 1000;  // u cells (n_u + 1 nodes); du = u_max / n_u
    int n_t = 0;     // t cells for the finite-horizon solver; dt = du / c
    int quad_nodes_per_cell = 4;    // auxiliary cross-check quadratures only
    double truncation_tol = 1e-8;   // Neumann term L1-mass stop + tail budget
    int max_neumann_terms = 2000;

    double du() const { return u_max / static_cast<double>(n_u); }

    // Lattice sized so the finite solver covers horizon t_max.
    static OperatorConfig for_horizon(double u_max, int n_u, double t_max, double c);
};

// Contraction data for exponential arrivals: the L1 distance between the
// finite- and infinite-horizon repayment probabilities is bounded by
// prefactor * exp(-rate * t).
struct DecayBound {
    double contraction = 0.0;  // rho = E[e^{-X}] = alpha / (alpha + 1)
    double alpha_bar = 0.0;    // 1 - rho
    double rate = 0.0;         // lambda * (1 - rho)
    double prefactor = 0.0;    // 1 / (1 - rho)

    double l1_bound(double t) const;
};

struct SolveInfo {
    int terms = 0;              // operator applications performed
    double last_term_mass = 0.0;
};

// psi_0^inf(u) = P(W > u/c) sampled on the config lattice.
grid::GridFunction psi0_infinite(const model::DisasterModel& m, double c,
                                 const OperatorConfig& cfg);

// K_inf g (u) = E[ 1_{cW < u} g(e^X (u - cW)) ] evaluated on the lattice.
// g is resampled onto the lattice if its nodes differ; reads beyond u_max use
// g's constant extrapolation.
grid::GridFunction apply_K_inf(const grid::GridFunction& g, const model::DisasterModel& m,
                               double c, const OperatorConfig& cfg);

// Finite-horizon operator K h (u, t) = E[ 1_{W < t ^ u/c} h(e^X (u - cW), t - W) ].
grid::GridFunction2D apply_K(const grid::GridFunction2D& h, const model::DisasterModel& m,
                             double c, const OperatorConfig& cfg);

// Neumann series psi^inf = sum_n K_inf^n psi_0^inf. Stops when the added
// term's L1 mass drops below truncation_tol or at the a-priori term count,
// whichever comes first. force_terms >= 0 runs exactly that many
// applications (used to pair runs for gap studies).
grid::GridFunction solve_psi_infinite(const model::DisasterModel& m, double c,
                                      const OperatorConfig& cfg, SolveInfo* info = nullptr,
                                      int force_terms = -1);

// Finite-horizon Neumann series psi = sum_n K^n psi_0 on the (u, t) lattice;
// psi(u, t) = 0 for t <= u/c by construction.
grid::GridFunction2D solve_psi_finite(const model::DisasterModel& m, double c,
                                      const OperatorConfig& cfg, SolveInfo* info = nullptr,
                                      int force_terms = -1);

// Exponential arrivals + exponential severities only.
DecayBound decay_bound(const model::DisasterModel& m);

struct GapPoint {
    double t = 0.0;
    double l1_gap = 0.0;
    double bound = 0.0;
};

// Runs the infinite- and finite-horizon solvers on the same lattice with a
// paired term count and reports trapezoid L1 gaps against the decay bound at
// the requested lattice times.
std::vector<GapPoint> convergence_gap_study(const model::DisasterModel& m, double c,
                                            const OperatorConfig& cfg,
                                            const std::vector<double>& ts);

}  // namespace repayrisk::fredholm
