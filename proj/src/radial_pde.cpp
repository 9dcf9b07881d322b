#include "hfreg/radial_pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hfreg {

namespace {

void apply_dirichlet(BandedSym& a, Eigen::VectorXd& rhs, int dof, double value) {
    const int lo = std::max(0, dof - a.bandwidth);
    const int hi = std::min(a.n - 1, dof + a.bandwidth);
    for (int i = lo; i <= hi; ++i) {
        if (i == dof) continue;
        rhs(i) -= a.get(i, dof) * value;
        a.at(i, dof) = 0.0;
    }
    a.at(dof, dof) = 1.0;
    rhs(dof) = value;
}

double dimension_check(int dim) {
    if (dim != 2 && dim != 3) throw std::domain_error("radial_pde: dimension must be 2 or 3");
    return static_cast<double>(dim);
}

}  // namespace

std::pair<double, double> RadialField::interp_value_deriv(double r0, int stencil) const {
    const int n = static_cast<int>(mesh.dofs.size());
    if (stencil < 3) throw std::domain_error("interp_value_deriv: stencil too small");
    stencil = std::min(stencil, n);
    // contiguous dof window centered at r0
    const double* begin = mesh.dofs.data();
    int pos = static_cast<int>(std::lower_bound(begin, begin + n, r0) - begin);
    int first = std::clamp(pos - stencil / 2, 0, n - stencil);
    const double scale = std::max(mesh.dofs(first + stencil - 1) - mesh.dofs(first), 1e-300);
    Eigen::MatrixXd vand(stencil, stencil);
    Eigen::VectorXd rhs(stencil);
    for (int i = 0; i < stencil; ++i) {
        const double t = (mesh.dofs(first + i) - r0) / scale;
        double p = 1.0;
        for (int j = 0; j < stencil; ++j) {
            vand(i, j) = p;
            p *= t;
        }
        rhs(i) = values(first + i);
    }
    const Eigen::VectorXd c = vand.colPivHouseholderQr().solve(rhs);
    return {c(0), c(1) / scale};
}

double RadialField::inner(const RadialField& other) const {
    const double d = dimension_check(dim);
    const GaussLegendre& gl = gauss_legendre(8);
    double sum = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const double a = mesh.boundaries(e), b = mesh.boundaries(e + 1);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < gl.points.size(); ++q) {
            const double r = mid + half * gl.points(q);
            sum += half * gl.weights(q) * eval(r) * other.eval(r) * std::pow(r, d - 1.0);
        }
    }
    return sum * sphere_measure(dim);
}

double RadialField::l2_norm() const { return std::sqrt(std::max(0.0, inner(*this))); }

RadialField RadialField::sampled(const GradedRadialGrid& grid, int dim,
                                 const std::function<double(double)>& f, int points_per_cell) {
    dimension_check(dim);
    RadialField field;
    field.grid = grid;
    field.dim = dim;
    field.mesh = make_fem_mesh(grid.element_boundaries(points_per_cell));
    field.values.resize(field.mesh.dof_count());
    for (int i = 0; i < field.mesh.dof_count(); ++i) field.values(i) = f(field.mesh.dofs(i));
    return field;
}

RadialField poisson_solve(const RadialField& rho, int dim) {
    const double d = dimension_check(dim);
    const FemMesh& mesh = rho.mesh;
    const double R = mesh.boundaries(mesh.boundaries.size() - 1);

    const double rho_max = rho.values.cwiseAbs().maxCoeff();
    if (rho_max > 0.0) {
        double tail = 0.0;
        for (int i = 0; i < mesh.dof_count(); ++i)
            if (mesh.dofs(i) >= 0.98 * R) tail = std::max(tail, std::abs(rho.values(i)));
        if (tail > 1e-7 * rho_max)
            throw std::runtime_error("poisson_solve: density has not decayed at the outer boundary");
    }

    std::function<double(double)> a_coeff = [d](double r) { return std::pow(r, d - 1.0); };
    BandedSym k = assemble_p2(mesh, &a_coeff, nullptr);
    Eigen::VectorXd load = assemble_load_p2(
        mesh, [&](double r) { return 4.0 * std::numbers::pi * rho.eval(r) * std::pow(r, d - 1.0); });

    const int last = mesh.dof_count() - 1;
    if (dim == 3) {
        // far field u ~ Q / r gives the natural condition u'(R) = -u(R)/R
        k.at(last, last) += R;
    } else {
        // 2d log matching: pin u(R) to the point-charge potential value
        const GaussLegendre& gl = gauss_legendre(10);
        double q_int = 0.0;
        for (int e = 0; e < mesh.element_count(); ++e) {
            const double a = mesh.boundaries(e), b = mesh.boundaries(e + 1);
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int q = 0; q < gl.points.size(); ++q) {
                const double r = mid + half * gl.points(q);
                q_int += half * gl.weights(q) * rho.eval(r) * r;
            }
        }
        apply_dirichlet(k, load, last, -4.0 * std::numbers::pi * q_int * std::log(R));
    }

    BandedLDLT ldlt;
    if (!ldlt.factorize(k)) throw std::runtime_error("poisson_solve: singular linear system");

    RadialField u = rho;
    u.values = ldlt.solve(load);
    return u;
}

RadialPencil assemble_radial_pencil(const std::function<double(double)>& potential, double t,
                                    int dim, const GradedRadialGrid& grid) {
    dimension_check(dim);
    if (!(t > 0.0)) throw std::domain_error("eigensolve: kinetic coefficient must be positive");
    RadialPencil p;
    p.dim = dim;
    p.mesh = make_fem_mesh(grid.element_boundaries(1));
    if (dim == 3) {
        // w = r phi symmetrizes the operator with a plain-dr mass; w(0) = 0
        std::function<double(double)> a_coeff = [t](double) { return t; };
        std::function<double(double)> c_coeff = potential;
        std::function<double(double)> unit = [](double) { return 1.0; };
        p.stiffness = assemble_p2(p.mesh, &a_coeff, &c_coeff);
        p.mass = assemble_p2(p.mesh, nullptr, &unit);
        p.drop_first = true;
    } else {
        // r-weighted weak form; phi(0) is a free dof
        std::function<double(double)> a_coeff = [t](double r) { return t * r; };
        std::function<double(double)> c_coeff = [&potential](double r) { return potential(r) * r; };
        std::function<double(double)> rw = [](double r) { return r; };
        p.stiffness = assemble_p2(p.mesh, &a_coeff, &c_coeff);
        p.mass = assemble_p2(p.mesh, nullptr, &rw);
        p.drop_first = false;
    }
    return p;
}

BandedSym RadialPencil::reduced(const BandedSym& m) const {
    const int lo = drop_first ? 1 : 0;
    const int hi = m.n - 1;  // Dirichlet decay at the outer boundary
    BandedSym r = BandedSym::zero(hi - lo, m.bandwidth);
    for (int col = lo; col < hi; ++col)
        for (int k = 0; k <= m.bandwidth && col + k < hi; ++k)
            r.bands(k, col - lo) = m.bands(k, col);
    return r;
}

Eigen::VectorXd RadialPencil::solution_from_phi(const Eigen::VectorXd& phi_values) const {
    Eigen::VectorXd s(mesh.dof_count());
    if (dim == 3) {
        s(0) = 0.0;
        for (int i = 1; i < mesh.dof_count(); ++i) s(i) = phi_values(i) * mesh.dofs(i);
    } else {
        s = phi_values;
    }
    return s;
}

namespace {

GroundState state_from_solution(const GradedRadialGrid& grid, const RadialPencil& pencil,
                                const Eigen::VectorXd& reduced_vec, double lambda) {
    const int n = pencil.mesh.dof_count();
    const int lo = pencil.drop_first ? 1 : 0;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    full.segment(lo, n - 1 - lo) = reduced_vec;

    GroundState gs;
    gs.lambda = lambda;
    gs.phi.grid = grid;
    gs.phi.mesh = pencil.mesh;
    gs.phi.dim = pencil.dim;
    gs.phi.values.resize(n);
    if (pencil.dim == 3) {
        for (int i = 1; i < n; ++i) gs.phi.values(i) = full(i) / pencil.mesh.dofs(i);
        // phi(0) = w'(0) by l'Hopital; differentiate the first element shape
        gs.phi.values(0) = fem_eval_deriv(pencil.mesh, full, 0.0);
    } else {
        gs.phi.values = full;
    }
    if (gs.phi.values.sum() < 0.0) gs.phi.values = -gs.phi.values;
    const double norm = gs.phi.l2_norm();
    if (!(norm > 0.0)) throw std::runtime_error("eigensolve: degenerate eigenfunction");
    gs.phi.values /= norm;
    return gs;
}

}  // namespace

GroundState eigensolve_ground(const std::function<double(double)>& potential, double t, int dim,
                              const GradedRadialGrid& grid) {
    RadialPencil p = assemble_radial_pencil(potential, t, dim, grid);
    PencilEigenSolution sol = smallest_eigenpairs(p.reduced(p.stiffness), p.reduced(p.mass), 1);
    if (!sol.converged) throw std::runtime_error("eigensolve_ground: eigen-iteration failed");
    return state_from_solution(grid, p, sol.eigenvectors.col(0), sol.eigenvalues(0));
}

GroundState eigensolve_ground(const RadialField& potential, double t, int dim) {
    return eigensolve_ground([&potential](double r) { return potential.eval(r); }, t, dim,
                             potential.grid);
}

RadialSpectrum eigensolve_lowest(const std::function<double(double)>& potential, double t, int dim,
                                 const GradedRadialGrid& grid, int n_states) {
    RadialPencil p = assemble_radial_pencil(potential, t, dim, grid);
    PencilEigenSolution sol =
        smallest_eigenpairs(p.reduced(p.stiffness), p.reduced(p.mass), n_states);
    RadialSpectrum spectrum;
    for (int m = 0; m < n_states; ++m) {
        GroundState gs = state_from_solution(grid, p, sol.eigenvectors.col(m), sol.eigenvalues(m));
        spectrum.lambdas.push_back(gs.lambda);
        spectrum.phis.push_back(std::move(gs.phi));
    }
    return spectrum;
}

std::vector<double> derivative_bootstrap_from(double phi0, double dphi0,
                                              const RadialDerivOracle& w_oracle, double lambda,
                                              double t, int dim, int m_max, double r0) {
    dimension_check(dim);
    if (!(r0 > 1e-290)) throw std::domain_error("derivative_bootstrap: r0 must be strictly positive");
    if (m_max < 0 || m_max > 64) throw std::domain_error("derivative_bootstrap: order limit is 64");

    auto quad_oracle = [&w_oracle](int m, __float128 r) -> __float128 {
        return static_cast<__float128>(w_oracle(m, static_cast<double>(r)));
    };
    const std::vector<__float128> dq = bootstrap_recurrence<__float128>(
        static_cast<__float128>(phi0), static_cast<__float128>(dphi0), quad_oracle,
        static_cast<__float128>(lambda), static_cast<__float128>(t), dim, m_max,
        static_cast<__float128>(r0));

    // growth window: |phi^{(m)}| <= window_c * window_a^m * m! * r0^{-m} * scale
    constexpr double log_window_c = 23.0;  // ~ log(1e10)
    const double log_window_a = std::log(64.0);
    const double scale = std::max({std::abs(phi0), std::abs(dphi0) * r0, 1.0});
    std::vector<double> d(dq.size());
    for (std::size_t m = 0; m < dq.size(); ++m) {
        const long double vl = static_cast<long double>(dq[m]);
        d[m] = static_cast<double>(vl);
        if (m < 2) continue;
        const double log_window = log_window_c + std::log(scale) +
                                  static_cast<double>(m) * log_window_a +
                                  std::lgamma(static_cast<double>(m) + 1.0) -
                                  static_cast<double>(m) * std::log(r0);
        if (!std::isfinite(d[m]) ||
            (std::abs(vl) > 0.0L && static_cast<double>(std::log(std::abs(vl))) > log_window))
            throw std::runtime_error("derivative_bootstrap: recurrence left the expected growth window");
    }
    return d;
}

std::vector<double> derivative_bootstrap(const RadialField& phi, const RadialDerivOracle& w_oracle,
                                         double lambda, double t, int m_max, double r0) {
    auto [v, dv] = phi.interp_value_deriv(r0);
    return derivative_bootstrap_from(v, dv, w_oracle, lambda, t, phi.dim, m_max, r0);
}

std::vector<double> axis_cartesian_derivatives(const std::vector<double>& radial_derivatives) {
    return radial_derivatives;
}

}  // namespace hfreg
