#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hfreg/fem1d.hpp"
#include "hfreg/grid.hpp"
#include "hfreg/radial_calculus.hpp"

namespace hfreg {

/// Spherically symmetric function sampled on the P2 dof mesh built from a
/// graded radial grid; evaluation between dofs is the element-wise quadratic.
struct RadialField {
    GradedRadialGrid grid;
    FemMesh mesh;
    Eigen::VectorXd values;
    int dim = 3;

    double eval(double r) const { return fem_eval(mesh, values, r); }
    double eval_deriv(double r) const { return fem_eval_deriv(mesh, values, r); }

    /// Value and first derivative at r0 from local polynomial interpolation
    /// through `stencil` nearby dofs (default degree 8).
    std::pair<double, double> interp_value_deriv(double r0, int stencil = 9) const;

    /// integral over R^d of f * g (angular measure folded in)
    double inner(const RadialField& other) const;
    double l2_norm() const;
    double sup_norm() const { return values.cwiseAbs().maxCoeff(); }

    static RadialField sampled(const GradedRadialGrid& grid, int dim,
                               const std::function<double(double)>& f, int points_per_cell = 1);
};

/// Solution of -Laplace(u) = 4 pi rho for radial rho in d = 2, 3 with the
/// point-charge far field (u ~ Q/r for d = 3, -4 pi (int rho s ds) ln r for
/// d = 2). Throws if rho has not decayed at the outer boundary.
RadialField poisson_solve(const RadialField& rho, int dim);

struct GroundState {
    double lambda = 0.0;
    RadialField phi;
};

/// Discretized radial operator -t Laplace + W and companion metric: for
/// d = 3 through the w = r phi substitution (plain-dr mass, w(0) = 0), for
/// d = 2 through the r-weighted weak form (phi(0) free). Dirichlet decay at
/// the outer boundary in both cases.
struct RadialPencil {
    FemMesh mesh;
    BandedSym stiffness;
    BandedSym mass;
    int dim = 3;
    bool drop_first = true;

    /// restriction to the unconstrained dofs
    BandedSym reduced(const BandedSym& m) const;
    /// full-length solution-space vector of a nodal phi
    Eigen::VectorXd solution_from_phi(const Eigen::VectorXd& phi_values) const;
};
RadialPencil assemble_radial_pencil(const std::function<double(double)>& potential, double t,
                                    int dim, const GradedRadialGrid& grid);

/// Lowest eigenpair of -t Laplace + W on radial functions over B_R with a
/// decay (Dirichlet) condition at R; phi > 0 and normalized in L^2(R^d).
GroundState eigensolve_ground(const std::function<double(double)>& potential, double t, int dim,
                              const GradedRadialGrid& grid);
GroundState eigensolve_ground(const RadialField& potential, double t, int dim);

/// Lowest n eigenpairs of the same operator (ascending), L^2-orthonormal.
struct RadialSpectrum {
    std::vector<double> lambdas;
    std::vector<RadialField> phis;
};
RadialSpectrum eigensolve_lowest(const std::function<double(double)>& potential, double t, int dim,
                                 const GradedRadialGrid& grid, int n_states);

/// phi^(m)(r0) for m = 0..m_max obtained by repeatedly differentiating
/// t (phi'' + (d-1)/r phi') = (W - lambda) phi.  Base values phi(r0),
/// phi'(r0) come from local interpolation; W^(j)(r0) from the oracle.
/// Throws on non-finite growth.
std::vector<double> derivative_bootstrap(const RadialField& phi, const RadialDerivOracle& w_oracle,
                                         double lambda, double t, int m_max, double r0);

/// Same recurrence driven by explicit base values instead of interpolation.
std::vector<double> derivative_bootstrap_from(double phi0, double dphi0,
                                              const RadialDerivOracle& w_oracle, double lambda,
                                              double t, int dim, int m_max, double r0);

/// Scalar-generic core of the ODE derivative recurrence,
///   t (phi'' + (d-1)/r phi') = (W - lambda) phi,
/// differentiated m_max - 2 times by the Leibniz rule. The terms carrying
/// the singular coefficients cancel almost completely for smooth solutions,
/// so extended-precision scalars are the intended instantiation; the double
/// entry points run it in quad precision internally.
template <typename Scalar, typename Oracle>
std::vector<Scalar> bootstrap_recurrence(Scalar phi0, Scalar dphi0, const Oracle& w_oracle,
                                         Scalar lambda, Scalar t, int dim, int m_max, Scalar r0) {
    std::vector<Scalar> d(static_cast<std::size_t>(m_max) + 1, Scalar(0));
    d[0] = phi0;
    if (m_max >= 1) d[1] = dphi0;
    std::vector<Scalar> rinv(static_cast<std::size_t>(m_max) + 1);
    rinv[0] = Scalar(1) / r0;
    for (int j = 1; j <= m_max; ++j)
        rinv[static_cast<std::size_t>(j)] = rinv[static_cast<std::size_t>(j - 1)] * Scalar(-j) / r0;
    const Scalar dm1 = Scalar(dim - 1);
    for (int m = 0; m + 2 <= m_max; ++m) {
        Scalar s_w(0), s_r(0);
        for (int j = 0; j <= m; ++j) {
            const Scalar cb = Scalar(static_cast<double>(binom(static_cast<std::int64_t>(m), j)));
            s_w += cb * w_oracle(j, r0) * d[static_cast<std::size_t>(m - j)];
            s_r += cb * rinv[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(m + 1 - j)];
        }
        d[static_cast<std::size_t>(m + 2)] =
            s_w / t - (lambda / t) * d[static_cast<std::size_t>(m)] - dm1 * s_r;
    }
    return d;
}

/// On the positive x1-axis the pure derivative with alpha = (k, 0, ..., 0)
/// of a radial function equals the k-th radial derivative, because the
/// restriction to the axis is f(x1) itself. Identity mapping, kept as the
/// documented bridge from radial to Cartesian derivative data.
std::vector<double> axis_cartesian_derivatives(const std::vector<double>& radial_derivatives);

}  // namespace hfreg
