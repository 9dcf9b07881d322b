#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace hfreg {

/// Radial grid on [0, R] whose cell boundaries shrink geometrically toward
/// the origin: nodes R sigma^{n-1}, ..., R sigma, R, plus the implicit
/// origin. Cell 0 is [0, nodes(0)]; cell i is [nodes(i-1), nodes(i)].
struct GradedRadialGrid {
    double radius = 1.0;
    int n_cells = 0;
    double sigma = 0.5;
    Eigen::VectorXd nodes;

    int cell_count() const { return n_cells; }
    std::pair<double, double> cell(int i) const;
    double innermost() const { return nodes(0); }

    /// Element boundaries {0, nodes...} with each cell split uniformly into
    /// points_per_cell pieces; this is the mesh used by the 1D solvers.
    Eigen::VectorXd element_boundaries(int points_per_cell = 1) const;
};

GradedRadialGrid build_grid(double radius, int n_cells, double sigma);

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch); cached per order.
struct GaussLegendre {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};
const GaussLegendre& gauss_legendre(int n);

/// Quadrature points/weights for integrals of smooth-per-cell functions
/// against plain dr over [lo, hi] intersected with the grid cells.
struct RadialQuadrature {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};
RadialQuadrature radial_quadrature(const GradedRadialGrid& grid, double lo, double hi,
                                   int points_per_cell = 12);

/// Directions and weights integrating over the unit sphere (d = 3, total
/// weight 4 pi) or unit circle (d = 2, total weight 2 pi). Product
/// Gauss-Legendre in the polar cosine and uniform azimuth.
struct AngularQuadrature {
    std::vector<Eigen::Vector3d> directions;
    Eigen::VectorXd weights;
};
AngularQuadrature angular_quadrature(int dim, int n_polar, int n_azimuth);

/// Full measure of the unit sphere in R^d (4 pi or 2 pi).
double sphere_measure(int dim);

}  // namespace hfreg
