#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hfreg/potentials.hpp"
#include "hfreg/radial_pde.hpp"

namespace hfreg {

/// The coupled nonlinear system: N orbital equations
///   (-t Laplace + V) phi_i + sum_{s,a,b} c^{is}_{ab} u_ab phi_s = lambda_i phi_i
/// closed by -Laplace(u_ab) = 4 pi phi_a phi_b.
struct SystemSpec {
    int n_orbitals = 1;
    int dim = 3;
    double t = 0.5;  // kinetic coefficient
    PotentialSpec potential;
    Eigen::VectorXd coupling;  // flat (iota, sigma, a, b), all in 0..N-1

    double c(int iota, int sigma, int a, int b) const;
    double& c(int iota, int sigma, int a, int b);
    static Eigen::VectorXd zero_coupling(int n);
    double max_coupling() const { return coupling.size() ? coupling.cwiseAbs().maxCoeff() : 0.0; }
    bool coupling_diagonal() const;
    void validate() const;
};

struct SCFConfig {
    double mixing = 0.5;  // damping factor in (0, 1]
    double tolerance = 1e-10;
    int max_iterations = 200;
    double grid_radius = 25.0;
    int grid_cells = 1200;
    double grid_sigma = 0.985;
    int grid_points_per_cell = 1;

    void validate() const;
    GradedRadialGrid make_grid() const { return build_grid(grid_radius, grid_cells, grid_sigma); }
};

struct SCFState {
    std::vector<RadialField> orbitals;       // N fields, unit L^2 norm
    std::vector<RadialField> aux_potentials; // N*N fields, u[a*N+b] with u_ab = u_ba
    std::vector<double> lambdas;
    std::vector<double> orbital_residuals;
    std::vector<double> poisson_residuals;
    std::vector<double> residual_history;
    int iterations = 0;
    bool converged = false;
    bool monotone_tail = true;  // residual decreased over the last iterations
    std::string note;

    const RadialField& u(int a, int b) const;
    double max_residual() const;
};

/// u_ab = poisson_solve(phi_a phi_b) for a <= b, mirrored to u_ba.
std::vector<RadialField> update_potentials(const std::vector<RadialField>& orbitals);

/// Damped fixed-point iteration for the full system. Non-convergence is
/// reported through SCFState::converged, not an exception.
SCFState scf_solve(const SystemSpec& spec, const SCFConfig& config);

struct ResidualReport {
    std::vector<double> orbital;  // per iota
    std::vector<double> poisson;  // per (a, b), a * N + b
    double max_orbital = 0.0;
    double max_poisson = 0.0;
};

/// L^2 norms of the discrete residuals of both equation groups.
ResidualReport scf_residual(const SCFState& state, const SystemSpec& spec);

/// max_{a,b} || u_ab ||_inf over the grid nodes.
double uab_sup_norm(const SCFState& state);

/// Joint high-order derivative table at radius r0: differentiates every
/// orbital ODE and every Poisson ODE in lockstep, so the effective-potential
/// derivatives are available to any order.
struct StateDerivatives {
    std::vector<std::vector<double>> orbital;  // [iota][m]
    std::vector<std::vector<double>> aux;      // [a*N+b][m]
};
StateDerivatives state_axis_derivatives(const SCFState& state, const SystemSpec& spec, double r0,
                                        int m_max);

}  // namespace hfreg
