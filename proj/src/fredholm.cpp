#include "repayrisk/fredholm.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "repayrisk/quadrature.hpp"

namespace repayrisk::fredholm {

namespace {

// Arrival density as a single polynomial-exponential term
// f_W(w) = coef * w^power * e^{-rate w}; exact for exponential and Erlang
// laws, which is what the w-recursion below relies on.
struct Weight {
    double rate = 1.0;
    int power = 0;
    double coef = 1.0;

    double at(double w) const {
        double p = 1.0;
        for (int q = 0; q < power; ++q) p *= w;
        return coef * p * std::exp(-rate * w);
    }
    double at_zero() const { return power == 0 ? coef : 0.0; }
};

Weight make_weight(const model::ArrivalLaw& law) {
    if (const auto* e = std::get_if<model::ExponentialArrivals>(&law)) {
        return {e->lambda, 0, e->lambda};
    }
    if (const auto* erl = std::get_if<model::ErlangArrivals>(&law)) {
        double coef = erl->rate;
        for (int j = 1; j < erl->shape; ++j) coef *= erl->rate / j;
        return {erl->rate, erl->shape - 1, coef};
    }
    throw std::invalid_argument(
        "fredholm: randomized arrivals are conditionally independent, not an "
        "i.i.d. (W, X) sequence; use the closed form for that family");
}

void validate_config(const OperatorConfig& cfg, bool need_time) {
    if (cfg.n_u < 16) throw std::invalid_argument("OperatorConfig: n_u must be >= 16");
    if (!(cfg.u_max > 0.0)) throw std::invalid_argument("OperatorConfig: u_max must be positive");
    if (need_time && cfg.n_t < 1) {
        throw std::invalid_argument("OperatorConfig: n_t must be >= 1 for finite-horizon work");
    }
    if (!(cfg.truncation_tol > 0.0)) {
        throw std::invalid_argument("OperatorConfig: truncation_tol must be positive");
    }
}

void check_tail_budget(const model::DisasterModel& m, double c, const OperatorConfig& cfg) {
    // Mass of psi_0^inf beyond u_max: c * E[(W - u_max/c)^+].
    const double x0 = cfg.u_max / c;
    const auto tail = quadrature::integrate_to_infinity(
        [&](double w) { return model::arrival_survival(m.arrivals, w); }, x0,
        {1e-12, 1e-9, 2000});
    const double mass = c * tail.value;
    if (mass > cfg.truncation_tol) {
        std::ostringstream msg;
        msg << "OperatorConfig: tail mass beyond u_max is " << mass
            << ", above truncation_tol " << cfg.truncation_tol << "; increase u_max";
        throw std::invalid_argument(msg.str());
    }
}

// Precomputed per-node factors of the severity transform
//   A_g(y) = E[g(e^X y)] = alpha y^alpha \int_y^inf z^{-alpha-1} g~(z) dz
// for exponential X and piecewise-linear g~ on the uniform lattice. Segment
// integrals are exact; only ratios (u_k / u_{k+1})^alpha appear, so nothing
// overflows for any alpha.
struct SeverityTransform {
    double alpha = 1.0;
    double du = 0.0;
    // r_alpha[k]  = (k/(k+1))^alpha
    // b_factor[k] = alpha (1 - (k/(k+1))^{alpha-1}) / (alpha - 1), cont. at 1
    Eigen::ArrayXd r_alpha;
    Eigen::ArrayXd b_factor;

    SeverityTransform(double alpha_in, double du_in, int nu)
        : alpha(alpha_in), du(du_in), r_alpha(nu), b_factor(nu) {
        for (int k = 1; k < nu; ++k) {
            const double lnr = std::log(static_cast<double>(k) / (k + 1.0));
            r_alpha[k] = std::exp(alpha * lnr);
            if (std::fabs(alpha - 1.0) > 1e-12) {
                b_factor[k] = alpha * (-std::expm1((alpha - 1.0) * lnr)) / (alpha - 1.0);
            } else {
                b_factor[k] = -lnr;
            }
        }
    }

    // A[k] = E[g(e^X u_k)], backward cumulative pass, O(nu).
    void apply(const double* g, int nu, double* A) const {
        A[nu] = g[nu];  // all reads beyond u_max hit the constant extrapolation
        double S = g[nu];
        for (int k = nu - 1; k >= 1; --k) {
            const double slope = (g[k + 1] - g[k]) / du;
            const double uk = k * du;
            const double intercept = g[k] - slope * uk;
            S = r_alpha[k] * S + intercept * (1.0 - r_alpha[k]) + slope * uk * b_factor[k];
            A[k] = S;
        }
        // A is continuous at 0 with limit g(0), but only across a boundary
        // layer of width e^{-1/alpha} that no lattice resolves. A[0] is read
        // solely as the trapezoid endpoint of the cell y in [0, du], so store
        // the pseudo-value that makes that cell integrate
        //   int_0^du A dy = du [A(du)/(alpha+1) + alpha (g0+g1)/(2(alpha+1))]
        // exactly (by parts, exact for the linear interpolant).
        A[0] = A[1] * (1.0 - alpha) / (1.0 + alpha) +
               alpha * (g[0] + g[1]) / (1.0 + alpha);
    }
};

// Pascal triangle up to the weight's polynomial degree.
std::vector<std::vector<double>> binomials(int pmax) {
    std::vector<std::vector<double>> c(pmax + 1);
    for (int p = 0; p <= pmax; ++p) {
        c[p].assign(p + 1, 1.0);
        for (int l = 1; l < p; ++l) c[p][l] = c[p - 1][l - 1] + c[p - 1][l];
    }
    return c;
}

// Trapezoid in w over the lattice {m dt}, interior handled by the recursion
//   S_q(i+1) = e^{-rate dt} (A[i] + sum_l C(q,l) S_l(i)),
// valid because the weight is w^p e^{-rate w}.
void apply_inf_lattice(const Eigen::ArrayXd& A, const Weight& wgt, double dt, int nu,
                       Eigen::ArrayXd& out) {
    const int p = wgt.power;
    const auto C = binomials(p);
    const double decay = std::exp(-wgt.rate * dt);
    double dt_pow = 1.0;
    for (int q = 0; q < p; ++q) dt_pow *= dt;

    std::vector<double> S(p + 1, 0.0), S_new(p + 1, 0.0);
    out[0] = 0.0;
    for (int i = 1; i <= nu; ++i) {
        const double interior = wgt.coef * dt_pow * S[p];
        const double w_end = i * dt;
        out[i] = dt * (0.5 * wgt.at_zero() * A[i] + interior + 0.5 * wgt.at(w_end) * A[0]);
        for (int q = 0; q <= p; ++q) {
            double acc = A[i];
            for (int l = 0; l <= q; ++l) acc += C[q][l] * S[l];
            S_new[q] = decay * acc;
        }
        S.swap(S_new);
    }
}

// Finite-horizon analogue; walks each lattice diagonal (i - j constant) so
// the shifted reads A_{j-m}[i-m] stay O(1) per node.
void apply_finite_lattice(const Eigen::ArrayXXd& A, const Weight& wgt, double dt, int nu,
                          int nt, Eigen::ArrayXXd& out) {
    const int p = wgt.power;
    const auto C = binomials(p);
    const double decay = std::exp(-wgt.rate * dt);
    double dt_pow = 1.0;
    for (int q = 0; q < p; ++q) dt_pow *= dt;
    const double f0 = wgt.at_zero();

    out.row(0).setZero();
    out.col(0).setZero();
    std::vector<double> S(p + 1), S_new(p + 1);

    auto walk = [&](int i0, int j0) {
        std::fill(S.begin(), S.end(), 0.0);
        int i = i0, j = j0;
        while (i <= nu && j <= nt) {
            const int M = std::min(i, j);
            const double interior = wgt.coef * dt_pow * S[p];
            const double w_end = M * dt;
            out(i, j) = dt * (0.5 * f0 * A(i, j) + interior +
                              0.5 * wgt.at(w_end) * A(i - M, j - M));
            for (int q = 0; q <= p; ++q) {
                double acc = A(i, j);
                for (int l = 0; l <= q; ++l) acc += C[q][l] * S[l];
                S_new[q] = decay * acc;
            }
            S.swap(S_new);
            ++i;
            ++j;
        }
    };

    for (int i0 = 1; i0 <= nu; ++i0) walk(i0, 1);
    for (int j0 = 2; j0 <= nt; ++j0) walk(1, j0);
}

double lattice_trapz_abs(const Eigen::ArrayXd& v, double du) {
    double s = 0.5 * (std::fabs(v[0]) + std::fabs(v[v.size() - 1]));
    for (Eigen::Index i = 1; i + 1 < v.size(); ++i) s += std::fabs(v[i]);
    return s * du;
}

int apriori_term_count(double rho, double c, double mean_w, double tol) {
    const double target = tol * (1.0 - rho) / (c * mean_w);
    if (target >= 1.0) return 0;
    const double count = std::ceil(std::log(target) / std::log(rho));
    if (!(count < 1e9)) return std::numeric_limits<int>::max();
    return static_cast<int>(count);
}

}  // namespace

OperatorConfig OperatorConfig::for_horizon(double u_max, int n_u, double t_max, double c) {
    OperatorConfig cfg;
    cfg.u_max = u_max;
    cfg.n_u = n_u;
    const double dt = cfg.du() / c;
    cfg.n_t = static_cast<int>(std::ceil(t_max / dt - 1e-9));
    return cfg;
}

double DecayBound::l1_bound(double t) const { return prefactor * std::exp(-rate * t); }

grid::GridFunction psi0_infinite(const model::DisasterModel& m, double c,
                                 const OperatorConfig& cfg) {
    validate_config(cfg, false);
    const auto u = grid::GridFunction::uniform_nodes(cfg.u_max, cfg.n_u);
    Eigen::ArrayXd v(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        v[i] = model::arrival_survival(m.arrivals, u[i] / c);
    }
    return grid::GridFunction(u, v);
}

grid::GridFunction apply_K_inf(const grid::GridFunction& g, const model::DisasterModel& m,
                               double c, const OperatorConfig& cfg) {
    validate_config(cfg, false);
    const Weight wgt = make_weight(m.arrivals);
    const int nu = cfg.n_u;
    const double du = cfg.du();
    const double dt = du / c;
    const auto nodes = grid::GridFunction::uniform_nodes(cfg.u_max, nu);

    Eigen::ArrayXd gv(nu + 1);
    for (int i = 0; i <= nu; ++i) gv[i] = g(nodes[i]);

    SeverityTransform sev(m.severity.alpha, du, nu);
    Eigen::ArrayXd A(nu + 1), out(nu + 1);
    sev.apply(gv.data(), nu, A.data());
    apply_inf_lattice(A, wgt, dt, nu, out);
    return grid::GridFunction(nodes, out);
}

grid::GridFunction2D apply_K(const grid::GridFunction2D& h, const model::DisasterModel& m,
                             double c, const OperatorConfig& cfg) {
    validate_config(cfg, true);
    const Weight wgt = make_weight(m.arrivals);
    const int nu = cfg.n_u;
    const int nt = cfg.n_t;
    const double du = cfg.du();
    const double dt = du / c;
    const auto un = grid::GridFunction::uniform_nodes(cfg.u_max, nu);
    Eigen::ArrayXd tn(nt + 1);
    for (int j = 0; j <= nt; ++j) tn[j] = dt * j;

    Eigen::ArrayXXd hv(nu + 1, nt + 1);
    for (int j = 0; j <= nt; ++j) {
        for (int i = 0; i <= nu; ++i) hv(i, j) = h(un[i], tn[j]);
    }

    SeverityTransform sev(m.severity.alpha, du, nu);
    Eigen::ArrayXXd A(nu + 1, nt + 1), out(nu + 1, nt + 1);
    for (int j = 0; j <= nt; ++j) {
        sev.apply(hv.col(j).data(), nu, A.col(j).data());
    }
    apply_finite_lattice(A, wgt, dt, nu, nt, out);
    return grid::GridFunction2D(un, tn, out);
}

grid::GridFunction solve_psi_infinite(const model::DisasterModel& m, double c,
                                      const OperatorConfig& cfg, SolveInfo* info,
                                      int force_terms) {
    validate_config(cfg, false);
    check_tail_budget(m, c, cfg);
    const Weight wgt = make_weight(m.arrivals);
    const int nu = cfg.n_u;
    const double du = cfg.du();
    const double dt = du / c;
    const auto nodes = grid::GridFunction::uniform_nodes(cfg.u_max, nu);

    Eigen::ArrayXd term(nu + 1);
    for (int i = 0; i <= nu; ++i) term[i] = model::arrival_survival(m.arrivals, nodes[i] / c);
    Eigen::ArrayXd psi = term;

    const double rho = model::mean_discount(m);
    const double mean_w = model::arrival_mean(m.arrivals);
    const int n_star = apriori_term_count(rho, c, mean_w, cfg.truncation_tol);
    const int budget = (force_terms >= 0) ? force_terms : n_star;

    SeverityTransform sev(m.severity.alpha, du, nu);
    Eigen::ArrayXd A(nu + 1), next(nu + 1);
    int n = 0;
    double mass = lattice_trapz_abs(term, du);
    while (n < budget) {
        if (n >= cfg.max_neumann_terms) {
            std::ostringstream msg;
            msg << "solve_psi_infinite: max_neumann_terms (" << cfg.max_neumann_terms
                << ") exceeded; residual bound rho^N/(1-rho) = "
                << std::pow(rho, n) / (1.0 - rho) * c * mean_w;
            throw std::runtime_error(msg.str());
        }
        sev.apply(term.data(), nu, A.data());
        apply_inf_lattice(A, wgt, dt, nu, next);
        psi += next;
        term.swap(next);
        ++n;
        mass = lattice_trapz_abs(term, du);
        if (force_terms < 0 && mass < cfg.truncation_tol) break;
    }
    if (info) {
        info->terms = n;
        info->last_term_mass = mass;
    }
    psi = psi.min(1.0).max(0.0);
    return grid::GridFunction(nodes, psi);
}

grid::GridFunction2D solve_psi_finite(const model::DisasterModel& m, double c,
                                      const OperatorConfig& cfg, SolveInfo* info,
                                      int force_terms) {
    validate_config(cfg, true);
    check_tail_budget(m, c, cfg);
    const Weight wgt = make_weight(m.arrivals);
    const int nu = cfg.n_u;
    const int nt = cfg.n_t;
    const double du = cfg.du();
    const double dt = du / c;
    const auto un = grid::GridFunction::uniform_nodes(cfg.u_max, nu);
    Eigen::ArrayXd tn(nt + 1);
    for (int j = 0; j <= nt; ++j) tn[j] = dt * j;

    // psi_0(u, t) = P(W >= u/c) 1_{t > u/c}: on the lattice t_j > u_i/c iff j > i.
    Eigen::ArrayXXd term(nu + 1, nt + 1);
    term.setZero();
    for (int i = 0; i <= nu; ++i) {
        const double surv = model::arrival_survival(m.arrivals, un[i] / c);
        for (int j = i + 1; j <= nt; ++j) term(i, j) = surv;
    }
    Eigen::ArrayXXd psi = term;

    const double rho = model::mean_discount(m);
    const double mean_w = model::arrival_mean(m.arrivals);
    const int n_star = apriori_term_count(rho, c, mean_w, cfg.truncation_tol);
    const int budget = (force_terms >= 0) ? force_terms : n_star;

    SeverityTransform sev(m.severity.alpha, du, nu);
    Eigen::ArrayXXd A(nu + 1, nt + 1), next(nu + 1, nt + 1);
    int n = 0;
    double mass = 0.0;
    for (int j = 0; j <= nt; ++j) mass = std::max(mass, lattice_trapz_abs(term.col(j), du));
    while (n < budget) {
        if (n >= cfg.max_neumann_terms) {
            std::ostringstream msg;
            msg << "solve_psi_finite: max_neumann_terms (" << cfg.max_neumann_terms
                << ") exceeded; residual bound rho^N/(1-rho) = "
                << std::pow(rho, n) / (1.0 - rho) * c * mean_w;
            throw std::runtime_error(msg.str());
        }
        for (int j = 0; j <= nt; ++j) sev.apply(term.col(j).data(), nu, A.col(j).data());
        apply_finite_lattice(A, wgt, dt, nu, nt, next);
        psi += next;
        term.swap(next);
        ++n;
        mass = 0.0;
        for (int j = 0; j <= nt; ++j) mass = std::max(mass, lattice_trapz_abs(term.col(j), du));
        if (force_terms < 0 && mass < cfg.truncation_tol) break;
    }
    if (info) {
        info->terms = n;
        info->last_term_mass = mass;
    }
    psi = psi.min(1.0).max(0.0);
    return grid::GridFunction2D(un, tn, psi);
}

DecayBound decay_bound(const model::DisasterModel& m) {
    const auto* e = std::get_if<model::ExponentialArrivals>(&m.arrivals);
    if (!e) {
        throw std::invalid_argument("decay_bound: exponential arrivals required");
    }
    DecayBound b;
    b.contraction = model::mean_discount(m);
    b.alpha_bar = 1.0 - b.contraction;
    b.rate = e->lambda * b.alpha_bar;
    b.prefactor = 1.0 / b.alpha_bar;
    return b;
}

std::vector<GapPoint> convergence_gap_study(const model::DisasterModel& m, double c,
                                            const OperatorConfig& cfg,
                                            const std::vector<double>& ts) {
    const DecayBound bound = decay_bound(m);
    SolveInfo inf_info;
    const auto psi_inf = solve_psi_infinite(m, c, cfg, &inf_info);
    const auto psi_fin = solve_psi_finite(m, c, cfg, nullptr, inf_info.terms);

    const double du = cfg.du();
    std::vector<GapPoint> out;
    out.reserve(ts.size());
    for (double t : ts) {
        const Eigen::Index j = psi_fin.time_index(t);
        const Eigen::ArrayXd diff = psi_inf.values() - psi_fin.values().col(j);
        out.push_back({t, lattice_trapz_abs(diff, du), bound.l1_bound(t)});
    }
    return out;
}

}  // namespace repayrisk::fredholm
