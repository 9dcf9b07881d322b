#include "hfreg/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hfreg {

std::pair<double, double> GradedRadialGrid::cell(int i) const {
    if (i < 0 || i >= n_cells) throw std::out_of_range("GradedRadialGrid::cell");
    const double lo = (i == 0) ? 0.0 : nodes(i - 1);
    return {lo, nodes(i)};
}

Eigen::VectorXd GradedRadialGrid::element_boundaries(int points_per_cell) const {
    if (points_per_cell < 1) throw std::domain_error("element_boundaries: points_per_cell >= 1");
    Eigen::VectorXd b(n_cells * points_per_cell + 1);
    b(0) = 0.0;
    int k = 1;
    for (int i = 0; i < n_cells; ++i) {
        auto [lo, hi] = cell(i);
        for (int s = 1; s <= points_per_cell; ++s)
            b(k++) = lo + (hi - lo) * static_cast<double>(s) / points_per_cell;
    }
    return b;
}

GradedRadialGrid build_grid(double radius, int n_cells, double sigma) {
    if (radius <= 0.0) throw std::domain_error("build_grid: radius must be positive");
    if (n_cells < 8) throw std::domain_error("build_grid: n_cells must be at least 8");
    if (!(sigma > 0.0 && sigma < 1.0)) throw std::domain_error("build_grid: sigma must lie in (0, 1)");
    GradedRadialGrid g;
    g.radius = radius;
    g.n_cells = n_cells;
    g.sigma = sigma;
    g.nodes.resize(n_cells);
    for (int i = 0; i < n_cells; ++i) g.nodes(i) = radius * std::pow(sigma, n_cells - 1 - i);
    g.nodes(n_cells - 1) = radius;
    if (g.nodes(0) <= 0.0) throw std::domain_error("build_grid: innermost node underflowed to zero");
    return g;
}

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: order must be >= 1");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come
    // from the first eigenvector components.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = static_cast<double>(i) / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    GaussLegendre rule;
    rule.points = es.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule.weights(i) = 2.0 * v0 * v0;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

RadialQuadrature radial_quadrature(const GradedRadialGrid& grid, double lo, double hi,
                                   int points_per_cell) {
    if (!(lo >= 0.0 && hi <= grid.radius * (1.0 + 1e-12) && lo < hi))
        throw std::domain_error("radial_quadrature: need 0 <= lo < hi <= R");
    const GaussLegendre& gl = gauss_legendre(points_per_cell);
    std::vector<double> pts, wts;
    for (int i = 0; i < grid.cell_count(); ++i) {
        auto [a, b] = grid.cell(i);
        const double ca = std::max(a, lo);
        const double cb = std::min(b, hi);
        if (cb <= ca) continue;
        const double mid = 0.5 * (ca + cb);
        const double half = 0.5 * (cb - ca);
        for (int q = 0; q < points_per_cell; ++q) {
            pts.push_back(mid + half * gl.points(q));
            wts.push_back(half * gl.weights(q));
        }
    }
    RadialQuadrature rq;
    rq.points = Eigen::Map<Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
    rq.weights = Eigen::Map<Eigen::VectorXd>(wts.data(), static_cast<Eigen::Index>(wts.size()));
    return rq;
}

double sphere_measure(int dim) {
    if (dim == 3) return 4.0 * std::numbers::pi;
    if (dim == 2) return 2.0 * std::numbers::pi;
    throw std::domain_error("sphere_measure: dimension must be 2 or 3");
}

AngularQuadrature angular_quadrature(int dim, int n_polar, int n_azimuth) {
    AngularQuadrature aq;
    if (dim == 2) {
        const int n = std::max(n_azimuth, 4);
        aq.directions.reserve(static_cast<std::size_t>(n));
        aq.weights.resize(n);
        for (int i = 0; i < n; ++i) {
            const double phi = 2.0 * std::numbers::pi * (i + 0.5) / n;
            aq.directions.emplace_back(std::cos(phi), std::sin(phi), 0.0);
            aq.weights(i) = 2.0 * std::numbers::pi / n;
        }
        return aq;
    }
    if (dim != 3) throw std::domain_error("angular_quadrature: dimension must be 2 or 3");
    const GaussLegendre& gl = gauss_legendre(std::max(n_polar, 2));
    const int nphi = std::max(n_azimuth, 4);
    aq.directions.reserve(static_cast<std::size_t>(gl.points.size() * nphi));
    aq.weights.resize(gl.points.size() * nphi);
    int k = 0;
    for (int i = 0; i < gl.points.size(); ++i) {
        const double mu = gl.points(i);
        const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int jj = 0; jj < nphi; ++jj) {
            const double phi = 2.0 * std::numbers::pi * (jj + 0.5) / nphi;
            aq.directions.emplace_back(s * std::cos(phi), s * std::sin(phi), mu);
            aq.weights(k++) = gl.weights(i) * 2.0 * std::numbers::pi / nphi;
        }
    }
    return aq;
}

}  // namespace hfreg
