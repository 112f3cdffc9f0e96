#include "repayrisk/gridfunction.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace repayrisk::grid {

namespace {

void require_strictly_increasing(const Eigen::ArrayXd& x, const char* what) {
    if (x.size() < 2) {
        throw std::invalid_argument(std::string(what) + ": need at least two nodes");
    }
    if (!(x[0] >= 0.0)) {
        throw std::invalid_argument(std::string(what) + ": nodes must be nonnegative");
    }
    for (Eigen::Index i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw std::invalid_argument(std::string(what) +
                                        ": nodes must be strictly increasing");
        }
    }
}

// Index of the cell containing x (clamped), for interpolation.
Eigen::Index cell_index(const Eigen::ArrayXd& nodes, double x) {
    const Eigen::Index n = nodes.size();
    if (x <= nodes[0]) return 0;
    if (x >= nodes[n - 1]) return n - 2;
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (nodes[mid] <= x ? lo : hi) = mid;
    }
    return lo;
}

double interp1(const Eigen::ArrayXd& nodes, const Eigen::ArrayXd& vals, double x) {
    if (x <= nodes[0]) return vals[0];
    const Eigen::Index n = nodes.size();
    if (x >= nodes[n - 1]) return vals[n - 1];
    const Eigen::Index k = cell_index(nodes, x);
    const double w = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    return vals[k] + w * (vals[k + 1] - vals[k]);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double trapezoid(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        sum += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    }
    return sum;
}

GridFunction::GridFunction(Eigen::ArrayXd u, Eigen::ArrayXd values)
    : u_(std::move(u)), v_(std::move(values)) {
    require_strictly_increasing(u_, "GridFunction");
    if (u_.size() != v_.size()) {
        throw std::invalid_argument("GridFunction: grid/value size mismatch");
    }
    if (!v_.isFinite().all()) {
        throw std::invalid_argument("GridFunction: values must be finite");
    }
}

GridFunction GridFunction::sampled(const Eigen::ArrayXd& u,
                                   const std::function<double(double)>& f) {
    Eigen::ArrayXd v(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) v[i] = f(u[i]);
    return GridFunction(u, v);
}

Eigen::ArrayXd GridFunction::uniform_nodes(double u_max, Eigen::Index n_cells) {
    if (!(u_max > 0.0) || n_cells < 1) {
        throw std::invalid_argument("uniform_nodes: u_max > 0 and n_cells >= 1 required");
    }
    Eigen::ArrayXd u(n_cells + 1);
    const double du = u_max / static_cast<double>(n_cells);
    for (Eigen::Index i = 0; i <= n_cells; ++i) u[i] = du * static_cast<double>(i);
    return u;
}

double GridFunction::operator()(double u) const { return interp1(u_, v_, u); }

double GridFunction::integrate() const { return trapezoid(u_, v_); }

double GridFunction::integrate_abs() const { return trapezoid(u_, v_.abs()); }

void GridFunction::write_csv(std::ostream& os) const {
    os << "u,value\n";
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
        os << fmt17(u_[i]) << ',' << fmt17(v_[i]) << '\n';
    }
}

GridFunction GridFunction::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("u,value", 0) != 0) {
        throw std::invalid_argument("GridFunction csv: missing 'u,value' header");
    }
    std::vector<double> us, vs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b)) {
            throw std::invalid_argument("GridFunction csv: malformed row: " + line);
        }
        us.push_back(std::stod(a));
        vs.push_back(std::stod(b));
    }
    Eigen::ArrayXd u = Eigen::Map<Eigen::ArrayXd>(us.data(), us.size());
    Eigen::ArrayXd v = Eigen::Map<Eigen::ArrayXd>(vs.data(), vs.size());
    return GridFunction(u, v);
}

GridFunction2D::GridFunction2D(Eigen::ArrayXd u, Eigen::ArrayXd t, Eigen::ArrayXXd values)
    : u_(std::move(u)), t_(std::move(t)), v_(std::move(values)) {
    require_strictly_increasing(u_, "GridFunction2D u");
    require_strictly_increasing(t_, "GridFunction2D t");
    if (v_.rows() != u_.size() || v_.cols() != t_.size()) {
        throw std::invalid_argument("GridFunction2D: value shape mismatch");
    }
}

double GridFunction2D::operator()(double u, double t) const {
    const Eigen::Index i = cell_index(u_, u);
    const Eigen::Index j = cell_index(t_, t);
    const double wu = std::min(1.0, std::max(0.0, (u - u_[i]) / (u_[i + 1] - u_[i])));
    const double wt = std::min(1.0, std::max(0.0, (t - t_[j]) / (t_[j + 1] - t_[j])));
    const double lo = v_(i, j) + wu * (v_(i + 1, j) - v_(i, j));
    const double hi = v_(i, j + 1) + wu * (v_(i + 1, j + 1) - v_(i, j + 1));
    return lo + wt * (hi - lo);
}

Eigen::Index GridFunction2D::time_index(double t) const {
    for (Eigen::Index j = 0; j < t_.size(); ++j) {
        if (std::fabs(t_[j] - t) <= 1e-9 * std::max(1.0, std::fabs(t))) return j;
    }
    throw std::invalid_argument("GridFunction2D: t is not a lattice node");
}

GridFunction GridFunction2D::at_time(double t) const {
    const Eigen::Index j = time_index(t);
    return GridFunction(u_, v_.col(j));
}

void GridFunction2D::write_csv(std::ostream& os) const {
    os << "u,t,value\n";
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
        for (Eigen::Index j = 0; j < t_.size(); ++j) {
            os << fmt17(u_[i]) << ',' << fmt17(t_[j]) << ',' << fmt17(v_(i, j)) << '\n';
        }
    }
}

}  // namespace repayrisk::grid
