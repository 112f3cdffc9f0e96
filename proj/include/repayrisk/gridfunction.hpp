#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>

namespace repayrisk::grid {

// Tabulated function over a strictly increasing u-grid. Linear interpolation
// between nodes, constant extrapolation beyond the ends.
class GridFunction {
  public:
    GridFunction() = default;
    GridFunction(Eigen::ArrayXd u, Eigen::ArrayXd values);

    static GridFunction sampled(const Eigen::ArrayXd& u,
                                const std::function<double(double)>& f);
    // n_cells + 1 nodes on [0, u_max], uniform spacing.
    static Eigen::ArrayXd uniform_nodes(double u_max, Eigen::Index n_cells);

    double operator()(double u) const;

    const Eigen::ArrayXd& nodes() const { return u_; }
    const Eigen::ArrayXd& values() const { return v_; }
    Eigen::ArrayXd& values() { return v_; }
    Eigen::Index size() const { return u_.size(); }

    // Trapezoid rule over the full grid.
    double integrate() const;
    double integrate_abs() const;

    void write_csv(std::ostream& os) const;
    static GridFunction read_csv(std::istream& is);

  private:
    Eigen::ArrayXd u_;
    Eigen::ArrayXd v_;
};

// Tabulated function over a (u, t) lattice; values_(i, j) at (u_i, t_j).
// Bilinear interpolation, constant extrapolation.
class GridFunction2D {
  public:
    GridFunction2D() = default;
    GridFunction2D(Eigen::ArrayXd u, Eigen::ArrayXd t, Eigen::ArrayXXd values);

    double operator()(double u, double t) const;

    const Eigen::ArrayXd& u_nodes() const { return u_; }
    const Eigen::ArrayXd& t_nodes() const { return t_; }
    const Eigen::ArrayXXd& values() const { return v_; }
    Eigen::ArrayXXd& values() { return v_; }

    // Slice at an existing t node (t must match a node within rounding).
    GridFunction at_time(double t) const;
    Eigen::Index time_index(double t) const;

    void write_csv(std::ostream& os) const;

  private:
    Eigen::ArrayXd u_;
    Eigen::ArrayXd t_;
    Eigen::ArrayXXd v_;
};

double trapezoid(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

}  // namespace repayrisk::grid
