#include "hfreg/hp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hfreg/grid.hpp"

namespace hfreg {

namespace {

void legendre_row(int degree, double t, Eigen::VectorXd& row) {
    row(0) = 1.0;
    if (degree >= 1) row(1) = t;
    for (int n = 2; n <= degree; ++n)
        row(n) = ((2.0 * n - 1.0) * t * row(n - 1) - (n - 1.0) * row(n - 2)) / n;
}

/// squared weighted-L^2 best-approximation error of f by P_degree on [a, b]
double cell_projection_error2(const std::function<double(double)>& f, double a, double b,
                              int degree, int dim) {
    const int q = degree + 15;
    const GaussLegendre& gl = gauss_legendre(q);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(degree + 1, degree + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(degree + 1);
    Eigen::VectorXd row(degree + 1);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<double> fw(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        const double t = gl.points(i);
        const double r = mid + half * t;
        const double w = half * gl.weights(i) * std::pow(r, dim - 1.0);
        legendre_row(degree, t, row);
        gram.noalias() += w * row * row.transpose();
        const double fr = f(r);
        fw[static_cast<std::size_t>(i)] = fr;
        rhs.noalias() += (w * fr) * row;
    }
    const Eigen::VectorXd coef = gram.ldlt().solve(rhs);
    double err2 = 0.0;
    for (int i = 0; i < q; ++i) {
        const double t = gl.points(i);
        const double r = mid + half * t;
        const double w = half * gl.weights(i) * std::pow(r, dim - 1.0);
        legendre_row(degree, t, row);
        const double diff = fw[static_cast<std::size_t>(i)] - coef.dot(row);
        err2 += w * diff * diff;
    }
    return err2 * sphere_measure(dim);
}

HpFit regress(const std::vector<double>& x, const std::vector<double>& y) {
    HpFit fit;
    const std::size_t n = x.size();
    if (n < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.correlation = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    return fit;
}

HpResult finish(std::vector<HpPoint> table) {
    HpResult result;
    result.table = std::move(table);
    std::vector<double> xs, xl, y;
    for (const HpPoint& p : result.table) {
        if (!(p.error > 1e-13)) continue;  // rounding floor
        xs.push_back(std::sqrt(static_cast<double>(p.dof)));
        xl.push_back(std::log(static_cast<double>(p.dof)));
        y.push_back(std::log(p.error));
    }
    result.fit_sqrt_dof = regress(xs, y);
    result.fit_log_dof = regress(xl, y);
    return result;
}

}  // namespace

HpResult hp_convergence_demo(const std::function<double(double)>& target, double radius, int dim,
                             double sigma, int levels, double degree_slope) {
    if (levels < 3) throw std::domain_error("hp_convergence_demo: need at least 3 levels");
    if (!(sigma > 0.0 && sigma < 1.0)) throw std::domain_error("hp_convergence_demo: sigma in (0,1)");
    if (!(degree_slope > 0.0)) throw std::domain_error("hp_convergence_demo: degenerate degree schedule");
    std::vector<HpPoint> table;
    for (int level = 1; level <= levels; ++level) {
        // boundaries 0, R sigma^level, ..., R; degree grows away from 0
        std::vector<double> b{0.0};
        for (int j = level; j >= 1; --j) b.push_back(radius * std::pow(sigma, j));
        b.push_back(radius);
        double err2 = 0.0;
        int dof = 0;
        for (std::size_t e = 0; e + 1 < b.size(); ++e) {
            const int degree = 1 + static_cast<int>(std::lround(degree_slope * static_cast<double>(e)));
            err2 += cell_projection_error2(target, b[e], b[e + 1], degree, dim);
            dof += degree + 1;
        }
        table.push_back({dof, std::sqrt(err2)});
    }
    return finish(std::move(table));
}

HpResult hp_uniform_control(const std::function<double(double)>& target, double radius, int dim,
                            int degree, int levels) {
    if (levels < 3) throw std::domain_error("hp_uniform_control: need at least 3 levels");
    if (degree < 1) throw std::domain_error("hp_uniform_control: degenerate degree schedule");
    std::vector<HpPoint> table;
    for (int level = 1; level <= levels; ++level) {
        const int cells = 2 << level;
        double err2 = 0.0;
        for (int e = 0; e < cells; ++e)
            err2 += cell_projection_error2(target, radius * e / cells, radius * (e + 1) / cells,
                                           degree, dim);
        table.push_back({cells * (degree + 1), std::sqrt(err2)});
    }
    return finish(std::move(table));
}

}  // namespace hfreg
