#include "repayrisk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace repayrisk::quadrature {

namespace {

// QUADPACK dqk15 abscissae/weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        result_kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) {
            result_gauss += kWg[j / 2] * fsum;
        }
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = result_kronrod * half;
    p.error = std::fabs((result_kronrod - result_gauss) * half);
    return p;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadConfig& cfg) {
    if (a == b) return {0.0, 0.0, 0};
    auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> heap(worse);
    Panel first = evaluate_panel(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int used = 1;
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total)) &&
           used < cfg.max_intervals) {
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = evaluate_panel(f, worst.a, mid);
        const Panel right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++used;
    }
    if (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total))) {
        std::ostringstream msg;
        msg << "quadrature did not converge: achieved error estimate " << total_err
            << " over " << used << " intervals (abs_tol " << cfg.abs_tol << ")";
        throw std::runtime_error(msg.str());
    }
    return {total, total_err, used};
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 const QuadConfig& cfg) {
    auto mapped = [&](double t) {
        const double om = 1.0 - t;
        const double x = a + t / om;
        return f(x) / (om * om);
    };
    // The endpoint t = 1 is never evaluated by the Kronrod nodes.
    return integrate(mapped, 0.0, 1.0, cfg);
}

}  // namespace repayrisk::quadrature
