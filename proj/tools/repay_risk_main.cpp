// repay-risk: default / full-repayment probabilities for a loan pool hit by
// random disasters, plus the insurance-loaded repayment rate backed out from
// a solvency target. Closed forms, a Fredholm/Neumann grid solver, and Monte
// Carlo simulation behind one CSV-emitting command line.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "repayrisk/calibrate.hpp"
#include "repayrisk/closedform.hpp"
#include "repayrisk/config.hpp"
#include "repayrisk/csv.hpp"
#include "repayrisk/fredholm.hpp"
#include "repayrisk/montecarlo.hpp"

namespace {

using namespace repayrisk;

struct GlobalOpts {
    std::string config_path;
    std::string out_path = "-";
    std::uint64_t seed = 0;
    int workers = 1;
};

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("output path not writable: " + path);
    out << content;
}

// Grid syntax: "lo:hi:count" (inclusive linspace), or a comma list "1,2,5".
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double lo, hi;
        int count;
        char c1, c2;
        std::istringstream in(spec);
        if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1) {
            throw std::invalid_argument("bad grid spec '" + spec + "'; want lo:hi:count");
        }
        out.reserve(count);
        for (int i = 0; i < count; ++i) {
            out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
        }
        return out;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("bad grid spec '" + spec + "'");
    return out;
}

// Smallest lattice extent whose psi_0 tail mass fits the truncation budget.
double auto_u_max(const model::DisasterModel& m, double c, double start, double tol) {
    double u_max = start;
    for (int i = 0; i < 60; ++i) {
        const auto tail = quadrature::integrate_to_infinity(
            [&](double w) { return model::arrival_survival(m.arrivals, w); }, u_max / c,
            {1e-12, 1e-9, 2000});
        if (c * tail.value <= tol) return u_max;
        u_max *= 1.5;
    }
    throw std::runtime_error("fredholm: could not satisfy the truncation budget");
}

int cmd_prob(const GlobalOpts& g, const std::string& method, const std::string& grid_spec,
             double u_max_flag, int n_u, int max_terms) {
    const auto cfg = config::RunConfig::parse_file(g.config_path);
    std::vector<double> us =
        grid_spec.empty() ? std::vector<double>{cfg.loan.u} : parse_grid(grid_spec);

    std::ostringstream out;
    out << csv::version_header("prob") << "u,phi_inf,psi_inf\n";
    if (method == "closed") {
        const auto curve = closedform::default_curve(cfg.disaster, cfg.loan.c);
        for (double u : us) {
            const double phi = curve.phi(u);
            out << csv::fmt17(u) << ',' << csv::fmt17(phi) << ',' << csv::fmt17(1.0 - phi)
                << '\n';
        }
    } else if (method == "fredholm") {
        double top = 0.0;
        for (double u : us) top = std::max(top, u);
        fredholm::OperatorConfig ocfg;
        ocfg.u_max = u_max_flag > 0.0
                         ? u_max_flag
                         : auto_u_max(cfg.disaster, cfg.loan.c, std::max(top * 1.25, 1.0), 1e-8);
        ocfg.n_u = n_u;
        ocfg.max_neumann_terms = max_terms;
        const auto psi = fredholm::solve_psi_infinite(cfg.disaster, cfg.loan.c, ocfg);
        for (double u : us) {
            const double p = psi(u);
            out << csv::fmt17(u) << ',' << csv::fmt17(1.0 - p) << ',' << csv::fmt17(p) << '\n';
        }
    } else {
        throw std::invalid_argument("prob: method must be 'closed' or 'fredholm'");
    }
    write_output(g.out_path, out.str());
    return 0;
}

int cmd_simulate(const GlobalOpts& g, int algorithm, double t, std::int64_t n,
                 const std::string& histogram_path, int bins, bool antithetic) {
    const auto cfg = config::RunConfig::parse_file(g.config_path);
    const model::SeedSpec seed{g.seed, 0};
    if (antithetic && algorithm != 1) {
        throw std::invalid_argument("--antithetic is available for --algorithm 1 only");
    }
    const auto alg = algorithm == 2 ? montecarlo::Algorithm::poisson_order_statistics
                                    : montecarlo::Algorithm::renewal;
    const auto est =
        antithetic
            ? montecarlo::simulate_algorithm1(cfg.disaster, cfg.loan, t, n, seed, g.workers,
                                              true)
            : montecarlo::simulate(cfg.disaster, cfg.loan, t, n, seed, alg, g.workers);

    std::ostringstream out;
    out << csv::version_header("simulate") << "t,u,c,estimate,stderr,n,seed\n"
        << csv::fmt17(t) << ',' << csv::fmt17(cfg.loan.u) << ',' << csv::fmt17(cfg.loan.c)
        << ',' << csv::fmt17(est.mean) << ',' << csv::fmt17(est.std_error) << ',' << est.n
        << ',' << g.seed << '\n';
    write_output(g.out_path, out.str());

    if (!histogram_path.empty()) {
        const auto hist = montecarlo::histogram_cashflow(cfg.disaster, cfg.loan, t, n, bins,
                                                         seed, alg, g.workers);
        std::ostringstream hout;
        hout << csv::version_header("simulate-histogram") << "bin_lo,bin_hi,count\n";
        for (int b = 0; b < bins; ++b) {
            hout << csv::fmt17(hist.edges[b]) << ',' << csv::fmt17(hist.edges[b + 1]) << ','
                 << hist.counts[static_cast<size_t>(b)] << '\n';
        }
        write_output(histogram_path, hout.str());
    }
    return 0;
}

calibrate::SolvencyTarget make_target(double epsilon, const std::string& convention) {
    if (convention == "default") {
        return {epsilon, calibrate::TargetConvention::default_at_most_eps};
    }
    if (convention == "table1-legacy") {
        return {epsilon, calibrate::TargetConvention::table1_legacy};
    }
    throw std::invalid_argument("convention must be 'default' or 'table1-legacy'");
}

int cmd_calibrate(const GlobalOpts& g, double epsilon, const std::string& convention,
                  int n_u) {
    const auto cfg = config::RunConfig::parse_file(g.config_path);
    const auto target = make_target(epsilon, convention);
    const double alpha = cfg.disaster.severity.alpha;

    calibrate::PremiumQuote quote;
    double param = 0.0;
    std::string family;
    if (const auto* e = std::get_if<model::ExponentialArrivals>(&cfg.disaster.arrivals)) {
        quote = calibrate::min_rate_memoryless(e->lambda, alpha, target);
        param = e->lambda;
        family = "memoryless";
    } else if (const auto* r =
                   std::get_if<model::RandomizedExponentialArrivals>(&cfg.disaster.arrivals)) {
        quote = calibrate::min_rate_randomized(r->mixing_shape, r->mixing_scale, alpha, target);
        param = r->mixing_shape;
        family = "randomized";
    } else {
        const auto& erl = std::get<model::ErlangArrivals>(cfg.disaster.arrivals);
        if (target.convention != calibrate::TargetConvention::default_at_most_eps) {
            throw std::invalid_argument("erlang calibration supports only --convention default");
        }
        const double u = cfg.loan.u;
        auto phi_at_rate = [&](double c) -> double {
            if (erl.shape == 2) return closedform::phi_erlang2(erl.rate, alpha, u, c);
            fredholm::OperatorConfig ocfg;
            ocfg.n_u = n_u;
            ocfg.u_max = auto_u_max(cfg.disaster, c, 2.0 * u, 1e-8);
            return 1.0 - fredholm::solve_psi_infinite(cfg.disaster, c, ocfg)(u);
        };
        quote = calibrate::min_rate_bisection(phi_at_rate, u, target, cfg.loan.c / 16.0,
                                              cfg.loan.c * 16.0, 1e-9);
        param = erl.rate;
        family = "erlang";
    }

    std::ostringstream out;
    out << csv::version_header("calibrate") << "family,convention,epsilon,param,alpha,c_over_u,method\n"
        << family << ',' << convention << ',' << csv::fmt17(epsilon) << ','
        << csv::fmt17(param) << ',' << csv::fmt17(alpha) << ','
        << csv::fmt17(quote.min_rate_ratio) << ','
        << (quote.method == calibrate::QuoteMethod::closed_form ? "closed_form" : "bisection")
        << '\n';
    write_output(g.out_path, out.str());
    return 0;
}

int cmd_table(const GlobalOpts& g, const std::string& family_name, double epsilon,
              const std::string& convention, const std::string& rows_spec,
              const std::string& alphas_spec) {
    const auto target = make_target(epsilon, convention);
    const auto family = [&] {
        if (family_name == "memoryless") return calibrate::TableFamily::memoryless;
        if (family_name == "randomized") return calibrate::TableFamily::randomized;
        throw std::invalid_argument("table: family must be 'memoryless' or 'randomized'");
    }();
    const auto rows = parse_grid(rows_spec);
    const auto alphas = parse_grid(alphas_spec);
    const auto table = calibrate::generate_table(family, rows, alphas, target);

    std::ostringstream out;
    out << csv::version_header("table");
    out << (family == calibrate::TableFamily::memoryless ? "lambda\\alpha" : "k\\alpha");
    for (double a : alphas) out << ',' << csv::fmt6(a);
    out << '\n';
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        out << csv::fmt6(rows[static_cast<size_t>(i)]);
        for (Eigen::Index j = 0; j < table.cols(); ++j) out << ',' << csv::fmt6(table(i, j));
        out << '\n';
    }
    write_output(g.out_path, out.str());
    return 0;
}

int cmd_converge(const GlobalOpts& g, const std::string& t_grid_spec, std::int64_t n) {
    const auto cfg = config::RunConfig::parse_file(g.config_path);
    const auto* e = std::get_if<model::ExponentialArrivals>(&cfg.disaster.arrivals);
    if (!e) {
        throw std::invalid_argument(
            "converge: exponential arrivals required (the decay bound is exponential-only)");
    }
    const auto t_grid = parse_grid(t_grid_spec);
    const model::SeedSpec seed{g.seed, 0};
    const auto points = montecarlo::convergence_study(cfg.disaster, cfg.loan, t_grid, n, seed,
                                                      g.workers);
    const double phi_inf =
        closedform::phi_memoryless(e->lambda, cfg.disaster.severity.alpha, cfg.loan.u,
                                   cfg.loan.c);
    const auto bound = fredholm::decay_bound(cfg.disaster);

    std::ostringstream out;
    out << csv::version_header("converge") << "t,phi_hat,phi_inf,bound\n";
    for (const auto& p : points) {
        out << csv::fmt17(p.t) << ',' << csv::fmt17(p.phi_hat) << ',' << csv::fmt17(phi_inf)
            << ',' << csv::fmt17(bound.l1_bound(p.t)) << '\n';
    }
    write_output(g.out_path, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repay-risk: loan-pool default probabilities under random disasters"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "model/loan config file")->required();
    app.add_option("--seed", g.seed, "master random seed (default 0)");
    app.add_option("--workers", g.workers, "worker threads; never changes results")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out_path, "output CSV path ('-' = stdout)");
    app.fallthrough();

    auto* prob = app.add_subcommand("prob", "infinite-horizon default probabilities over a u-grid");
    std::string method = "closed", u_grid;
    double u_max = 0.0;
    int n_u = 2000, max_terms = 2000;
    prob->add_option("--method", method, "closed | fredholm");
    prob->add_option("--u-grid", u_grid, "u values: lo:hi:count or comma list (default loan.u)");
    prob->add_option("--u-max", u_max, "fredholm lattice extent (default: auto)");
    prob->add_option("--n-u", n_u, "fredholm lattice cells (default 2000)");
    prob->add_option("--max-terms", max_terms, "Neumann series term cap (default 2000)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo default-probability estimate");
    int algorithm = 1, bins = 50;
    bool antithetic = false;
    double sim_t = 0.0;
    std::int64_t sim_n = 100000;
    std::string histogram_path;
    simulate->add_option("--algorithm", algorithm, "1 = renewal loop, 2 = Poisson order statistics")
        ->check(CLI::Range(1, 2));
    simulate->add_option("--t", sim_t, "horizon")->required();
    simulate->add_option("--n", sim_n, "replications (default 1e5)");
    simulate->add_option("--histogram", histogram_path, "also emit a cash-flow histogram CSV");
    simulate->add_option("--bins", bins, "histogram bins (default 50)");
    simulate->add_flag("--antithetic", antithetic, "mirrored scenario pairs (algorithm 1)");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "minimum insurance-loaded c/u for a solvency target");
    double epsilon = 1e-4;
    std::string convention = "default";
    int cal_n_u = 1500;
    calibrate_cmd->add_option("--epsilon", epsilon, "solvency bound (default 1e-4)");
    calibrate_cmd->add_option("--convention", convention, "default | table1-legacy");
    calibrate_cmd->add_option("--n-u", cal_n_u, "lattice cells for solver-backed calibration");

    auto* table = app.add_subcommand("table", "matrix of min c/u quotes over parameter grids");
    std::string family, rows_spec, alphas_spec = "1:6:6", tbl_convention = "default";
    double tbl_epsilon = 1e-4;
    table->add_option("--family", family, "memoryless | randomized")->required();
    table->add_option("--epsilon", tbl_epsilon, "solvency bound (default 1e-4)");
    table->add_option("--convention", tbl_convention, "default | table1-legacy");
    table->add_option("--rows", rows_spec, "lambda grid (memoryless) or k grid (randomized)")
        ->required();
    table->add_option("--alphas", alphas_spec, "alpha grid (default 1:6:6)");

    auto* converge = app.add_subcommand("converge", "finite-horizon estimates against the infinite-horizon limit");
    std::string t_grid_spec;
    std::int64_t conv_n = 100000;
    converge->add_option("--t-grid", t_grid_spec, "horizons: lo:hi:count or comma list")->required();
    converge->add_option("--n", conv_n, "replications per study (default 1e5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (prob->parsed()) return cmd_prob(g, method, u_grid, u_max, n_u, max_terms);
        if (simulate->parsed())
            return cmd_simulate(g, algorithm, sim_t, sim_n, histogram_path, bins, antithetic);
        if (calibrate_cmd->parsed()) return cmd_calibrate(g, epsilon, convention, cal_n_u);
        if (table->parsed())
            return cmd_table(g, family, tbl_epsilon, tbl_convention, rows_spec, alphas_spec);
        if (converge->parsed()) return cmd_converge(g, t_grid_spec, conv_n);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
