#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace hfreg {

/// Symmetric banded matrix, lower storage: bands(k, i) = A(i + k, i),
/// k = 0..bandwidth. Entries outside are zero.
struct BandedSym {
    int n = 0;
    int bandwidth = 0;
    Eigen::MatrixXd bands;

    static BandedSym zero(int n, int bandwidth);
    double& at(int row, int col);
    double get(int row, int col) const;
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    BandedSym plus_scaled(const BandedSym& other, double factor) const;
};

/// LDL^T factorization without pivoting; usable for definite and mildly
/// indefinite band matrices (eigenvalue bisection nudges shifts away from
/// breakdowns).
struct BandedLDLT {
    bool factorize(const BandedSym& a, double zero_pivot_tol = 0.0);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    int negative_pivots() const;
    bool breakdown = false;

private:
    int n_ = 0;
    int bw_ = 0;
    Eigen::MatrixXd l_;
    Eigen::VectorXd d_;
};

/// Lagrange P2 mesh on a boundary vector {b_0 < b_1 < ... < b_m}: dofs are
/// the vertices plus the element midpoints, ordered by radius.
struct FemMesh {
    Eigen::VectorXd boundaries;
    Eigen::VectorXd dofs;

    int element_count() const { return static_cast<int>(boundaries.size()) - 1; }
    int dof_count() const { return static_cast<int>(dofs.size()); }
    /// index of the element containing r (clamped to [first, last])
    int locate(double r) const;
};

FemMesh make_fem_mesh(const Eigen::VectorXd& boundaries);

/// Assemble  integral( a(r) u' v' + c(r) u v ) dr  over the mesh into banded
/// storage (bandwidth 2). Pass nullptr to drop a term.
BandedSym assemble_p2(const FemMesh& mesh, const std::function<double(double)>* a_coeff,
                      const std::function<double(double)>* c_coeff, int quad_points = 10);

/// Assemble the load vector integral( f(r) v ) dr.
Eigen::VectorXd assemble_load_p2(const FemMesh& mesh, const std::function<double(double)>& f,
                                 int quad_points = 10);

/// Evaluate a P2 coefficient vector (and derivative) at a point.
double fem_eval(const FemMesh& mesh, const Eigen::VectorXd& coeffs, double r);
double fem_eval_deriv(const FemMesh& mesh, const Eigen::VectorXd& coeffs, double r);

/// Generalized symmetric-definite pencil A x = lambda B x (B positive
/// definite), smallest eigenvalues by inertia bisection plus shifted inverse
/// iteration with B-orthogonalization.
struct PencilEigenSolution {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // columns, B-orthonormal
    bool converged = false;
};
PencilEigenSolution smallest_eigenpairs(const BandedSym& a, const BandedSym& b, int n_pairs,
                                        double tol = 1e-13, int max_bisect = 120);

}  // namespace hfreg
