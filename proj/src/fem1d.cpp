#include "hfreg/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hfreg/grid.hpp"

namespace hfreg {

BandedSym BandedSym::zero(int n, int bandwidth) {
    BandedSym m;
    m.n = n;
    m.bandwidth = bandwidth;
    m.bands = Eigen::MatrixXd::Zero(bandwidth + 1, n);
    return m;
}

double& BandedSym::at(int row, int col) {
    if (row < col) std::swap(row, col);
    return bands(row - col, col);
}

double BandedSym::get(int row, int col) const {
    if (row < col) std::swap(row, col);
    if (row - col > bandwidth) return 0.0;
    return bands(row - col, col);
}

Eigen::VectorXd BandedSym::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < n; ++col) {
        y(col) += bands(0, col) * x(col);
        const int kmax = std::min(bandwidth, n - 1 - col);
        for (int k = 1; k <= kmax; ++k) {
            y(col + k) += bands(k, col) * x(col);
            y(col) += bands(k, col) * x(col + k);
        }
    }
    return y;
}

BandedSym BandedSym::plus_scaled(const BandedSym& other, double factor) const {
    if (other.n != n || other.bandwidth != bandwidth)
        throw std::invalid_argument("BandedSym::plus_scaled: shape mismatch");
    BandedSym r = *this;
    r.bands += factor * other.bands;
    return r;
}

bool BandedLDLT::factorize(const BandedSym& a, double zero_pivot_tol) {
    n_ = a.n;
    bw_ = a.bandwidth;
    l_ = a.bands;
    d_.resize(n_);
    breakdown = false;
    const double scale = a.bands.row(0).cwiseAbs().maxCoeff() + 1e-300;
    for (int j = 0; j < n_; ++j) {
        double dj = l_(0, j);
        const int kmin = std::max(0, j - bw_);
        for (int k = kmin; k < j; ++k) {
            const double ljk = l_(j - k, k);
            dj -= ljk * ljk * d_(k);
        }
        if (std::abs(dj) <= zero_pivot_tol * scale) {
            breakdown = true;
            return false;
        }
        d_(j) = dj;
        const int imax = std::min(n_ - 1, j + bw_);
        for (int i = j + 1; i <= imax; ++i) {
            double lij = l_(i - j, j);
            const int kmin2 = std::max({0, i - bw_, j - bw_});
            for (int k = kmin2; k < j; ++k) {
                if (i - k > bw_) continue;
                lij -= l_(i - k, k) * l_(j - k, k) * d_(k);
            }
            l_(i - j, j) = lij / dj;
        }
    }
    return true;
}

Eigen::VectorXd BandedLDLT::solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = rhs;
    for (int j = 0; j < n_; ++j) {
        const int imax = std::min(n_ - 1, j + bw_);
        for (int i = j + 1; i <= imax; ++i) x(i) -= l_(i - j, j) * x(j);
    }
    x.array() /= d_.array();
    for (int j = n_ - 1; j >= 0; --j) {
        const int imax = std::min(n_ - 1, j + bw_);
        for (int i = j + 1; i <= imax; ++i) x(j) -= l_(i - j, j) * x(i);
    }
    return x;
}

int BandedLDLT::negative_pivots() const {
    int c = 0;
    for (int i = 0; i < n_; ++i)
        if (d_(i) < 0.0) ++c;
    return c;
}

int FemMesh::locate(double r) const {
    const int m = element_count();
    if (r <= boundaries(1)) return 0;
    if (r >= boundaries(m - 1)) return m - 1;
    const double* begin = boundaries.data();
    int e = static_cast<int>(std::upper_bound(begin, begin + boundaries.size(), r) - begin) - 1;
    return std::clamp(e, 0, m - 1);
}

FemMesh make_fem_mesh(const Eigen::VectorXd& boundaries) {
    if (boundaries.size() < 2) throw std::domain_error("make_fem_mesh: need at least one element");
    for (int i = 1; i < boundaries.size(); ++i)
        if (!(boundaries(i) > boundaries(i - 1)))
            throw std::domain_error("make_fem_mesh: boundaries must be strictly increasing");
    FemMesh mesh;
    mesh.boundaries = boundaries;
    const int m = static_cast<int>(boundaries.size()) - 1;
    mesh.dofs.resize(2 * m + 1);
    for (int e = 0; e < m; ++e) {
        mesh.dofs(2 * e) = boundaries(e);
        mesh.dofs(2 * e + 1) = 0.5 * (boundaries(e) + boundaries(e + 1));
    }
    mesh.dofs(2 * m) = boundaries(m);
    return mesh;
}

namespace {

// reference shapes on [0,1]: vertices then midpoint
inline void p2_shapes(double t, double* v, double* dv) {
    v[0] = 2.0 * (t - 0.5) * (t - 1.0);
    v[1] = -4.0 * t * (t - 1.0);
    v[2] = 2.0 * t * (t - 0.5);
    dv[0] = 4.0 * t - 3.0;
    dv[1] = -8.0 * t + 4.0;
    dv[2] = 4.0 * t - 1.0;
}

}  // namespace

BandedSym assemble_p2(const FemMesh& mesh, const std::function<double(double)>* a_coeff,
                      const std::function<double(double)>* c_coeff, int quad_points) {
    const int m = mesh.element_count();
    BandedSym mat = BandedSym::zero(mesh.dof_count(), 2);
    const GaussLegendre& gl = gauss_legendre(quad_points);
    double v[3], dv[3];
    for (int e = 0; e < m; ++e) {
        const double x0 = mesh.boundaries(e);
        const double h = mesh.boundaries(e + 1) - x0;
        Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
        for (int q = 0; q < quad_points; ++q) {
            const double t = 0.5 * (gl.points(q) + 1.0);
            const double w = 0.5 * gl.weights(q) * h;
            const double r = x0 + h * t;
            p2_shapes(t, v, dv);
            if (a_coeff) {
                const double a = (*a_coeff)(r) / (h * h);
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j) local(j, i) += w * a * dv[i] * dv[j];
            }
            if (c_coeff) {
                const double c = (*c_coeff)(r);
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j) local(j, i) += w * c * v[i] * v[j];
            }
        }
        const int base = 2 * e;  // local 0,1,2 -> global base, base+1, base+2
        static const int perm[3] = {0, 1, 2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j) mat.at(base + perm[i], base + perm[j]) += local(i, j);
    }
    return mat;
}

Eigen::VectorXd assemble_load_p2(const FemMesh& mesh, const std::function<double(double)>& f,
                                 int quad_points) {
    const int m = mesh.element_count();
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.dof_count());
    const GaussLegendre& gl = gauss_legendre(quad_points);
    double v[3], dv[3];
    for (int e = 0; e < m; ++e) {
        const double x0 = mesh.boundaries(e);
        const double h = mesh.boundaries(e + 1) - x0;
        for (int q = 0; q < quad_points; ++q) {
            const double t = 0.5 * (gl.points(q) + 1.0);
            const double w = 0.5 * gl.weights(q) * h;
            const double fr = f(x0 + h * t);
            p2_shapes(t, v, dv);
            for (int i = 0; i < 3; ++i) load(2 * e + i) += w * fr * v[i];
        }
    }
    return load;
}

double fem_eval(const FemMesh& mesh, const Eigen::VectorXd& coeffs, double r) {
    const int e = mesh.locate(r);
    const double x0 = mesh.boundaries(e);
    const double h = mesh.boundaries(e + 1) - x0;
    const double t = (r - x0) / h;
    double v[3], dv[3];
    p2_shapes(t, v, dv);
    return coeffs(2 * e) * v[0] + coeffs(2 * e + 1) * v[1] + coeffs(2 * e + 2) * v[2];
}

double fem_eval_deriv(const FemMesh& mesh, const Eigen::VectorXd& coeffs, double r) {
    const int e = mesh.locate(r);
    const double x0 = mesh.boundaries(e);
    const double h = mesh.boundaries(e + 1) - x0;
    const double t = (r - x0) / h;
    double v[3], dv[3];
    p2_shapes(t, v, dv);
    return (coeffs(2 * e) * dv[0] + coeffs(2 * e + 1) * dv[1] + coeffs(2 * e + 2) * dv[2]) / h;
}

namespace {

// #eigenvalues of the pencil below lambda (Sylvester inertia of A - lambda B)
int inertia_below(const BandedSym& a, const BandedSym& b, double lambda) {
    BandedLDLT ldlt;
    double shift = lambda;
    for (int attempt = 0; attempt < 6; ++attempt) {
        if (ldlt.factorize(a.plus_scaled(b, -shift), 1e-300)) return ldlt.negative_pivots();
        shift = lambda + (std::abs(lambda) + 1.0) * 1e-13 * static_cast<double>(attempt + 1);
    }
    throw std::runtime_error("inertia_below: persistent LDLT breakdown");
}

}  // namespace

PencilEigenSolution smallest_eigenpairs(const BandedSym& a, const BandedSym& b, int n_pairs,
                                        double tol, int max_bisect) {
    const int n = a.n;
    if (n_pairs < 1 || n_pairs > n) throw std::domain_error("smallest_eigenpairs: bad n_pairs");
    PencilEigenSolution sol;
    sol.eigenvalues.resize(n_pairs);
    sol.eigenvectors.resize(n, n_pairs);

    // bracket all requested eigenvalues
    double lo = -1.0, hi = 1.0;
    while (inertia_below(a, b, lo) > 0) {
        lo *= 2.0;
        if (lo < -1e15) throw std::runtime_error("smallest_eigenpairs: pencil appears unbounded below");
    }
    while (inertia_below(a, b, hi) < n_pairs) hi *= 2.0;

    BandedLDLT solver;
    for (int m = 0; m < n_pairs; ++m) {
        double llo = lo, lhi = hi;
        for (int it = 0; it < max_bisect; ++it) {
            const double mid = 0.5 * (llo + lhi);
            if (inertia_below(a, b, mid) >= m + 1)
                lhi = mid;
            else
                llo = mid;
            if (lhi - llo <= tol * (std::abs(lhi) + 1.0)) break;
        }
        double lambda = 0.5 * (llo + lhi);

        // shifted inverse iteration, B-orthogonal to earlier vectors
        double shift = llo - 1e3 * tol * (std::abs(llo) + 1.0);
        if (!solver.factorize(a.plus_scaled(b, -shift), 1e-300)) {
            shift = llo - 1e-8 * (std::abs(llo) + 1.0);
            if (!solver.factorize(a.plus_scaled(b, -shift), 1e-300))
                throw std::runtime_error("smallest_eigenpairs: inverse iteration factorization failed");
        }
        Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
        for (int i = 0; i < n; ++i) x(i) += 1e-3 * std::sin(1.0 + 2.7 * i);
        double rq_prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 80; ++it) {
            for (int j = 0; j < m; ++j) {
                const Eigen::VectorXd bv = b.multiply(sol.eigenvectors.col(j));
                x -= sol.eigenvectors.col(j) * bv.dot(x);
            }
            Eigen::VectorXd y = solver.solve(b.multiply(x));
            const double norm = std::sqrt(y.dot(b.multiply(y)));
            if (!(norm > 0.0) || !std::isfinite(norm))
                throw std::runtime_error("smallest_eigenpairs: inverse iteration degenerated");
            y /= norm;
            const double rq = y.dot(a.multiply(y));
            const bool settled = std::abs(rq - rq_prev) <= 1e-14 * (std::abs(rq) + 1.0);
            rq_prev = rq;
            x = y;
            if (settled && it >= 2) break;
        }
        for (int j = 0; j < m; ++j) {
            const Eigen::VectorXd bv = b.multiply(sol.eigenvectors.col(j));
            x -= sol.eigenvectors.col(j) * bv.dot(x);
        }
        x /= std::sqrt(x.dot(b.multiply(x)));
        int imax = 0;
        x.cwiseAbs().maxCoeff(&imax);
        if (x(imax) < 0.0) x = -x;
        lambda = x.dot(a.multiply(x));
        sol.eigenvalues(m) = lambda;
        sol.eigenvectors.col(m) = x;
    }
    sol.converged = true;
    return sol;
}

}  // namespace hfreg
