#pragma once

// Independent dense-grid shooting solver for the radial model
//   -t phi'' - t (2/r) phi' + W(r) phi = lambda phi   (d = 3, ell = 0)
// with W = -Z/r + c * u_H[phi] and -Lap u_H = 4 pi phi^2, used as a
// cross-check oracle for the banded FEM path. Everything here is built on
// Numerov integration and Simpson quadrature only.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace shooting {

struct Result {
    double lambda = 0.0;
    std::vector<double> phi;  // nodal values on the uniform grid
    int scf_iterations = 0;
    bool converged = false;
};

class RadialShooting {
public:
    RadialShooting(double r_max, int n_points) : rmax_(r_max), n_(n_points), h_(r_max / n_points) {
        r_.resize(static_cast<std::size_t>(n_) + 1);
        for (int i = 0; i <= n_; ++i) r_[static_cast<std::size_t>(i)] = h_ * i;
    }

    const std::vector<double>& radii() const { return r_; }

    // lowest eigenvalue of u'' = (2/t)(W - lambda) u, u(0) = u(R) = 0, u = r phi
    double ground_eigenvalue(const std::function<double(double)>& w_of_r, double t,
                             double lambda_lo, double lambda_hi, std::vector<double>* u_out) const {
        auto nodes_and_match = [&](double lambda, std::vector<double>* u_keep) {
            return integrate(w_of_r, t, lambda, u_keep);
        };
        // bracket by node count: ground state has zero interior nodes
        int lo_nodes = nodes_and_match(lambda_lo, nullptr).first;
        int hi_nodes = nodes_and_match(lambda_hi, nullptr).first;
        if (lo_nodes != 0) throw std::runtime_error("shooting: lower bracket already oscillates");
        if (hi_nodes < 1) throw std::runtime_error("shooting: upper bracket has no node");
        double lo = lambda_lo, hi = lambda_hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (nodes_and_match(mid, nullptr).first >= 1)
                hi = mid;
            else
                lo = mid;
            if (hi - lo < 1e-13 * (std::abs(lo) + 1.0)) break;
        }
        const double lambda = 0.5 * (lo + hi);
        if (u_out) *u_out = reconstruct(w_of_r, t, lambda);
        return lambda;
    }

    /// eigenfunction by outward/inward Numerov sweeps spliced at the outer
    /// classical turning point (the one-sided sweep is exponentially
    /// contaminated in the forbidden region)
    std::vector<double> reconstruct(const std::function<double(double)>& w_of_r, double t,
                                    double lambda) const {
        int i_match = n_ / 2;
        for (int i = n_ - 1; i >= 1; --i) {
            if (w_of_r(r_[static_cast<std::size_t>(i)]) - lambda < 0.0) {
                i_match = std::max(2, std::min(i, n_ - 2));
                break;
            }
        }
        std::vector<double> u;
        integrate(w_of_r, t, lambda, &u);  // outward, valid up to i_match
        auto q = [&](int i) {
            const double r = (i == 0) ? 0.5 * h_ : r_[static_cast<std::size_t>(i)];
            return (w_of_r(r) - lambda) / t;
        };
        std::vector<double> v(static_cast<std::size_t>(n_) + 1, 0.0);
        v[static_cast<std::size_t>(n_)] = 0.0;
        v[static_cast<std::size_t>(n_) - 1] = 1e-200;
        const double h2 = h_ * h_;
        for (int i = n_ - 1; i > i_match; --i) {
            const double c0 = 1.0 - h2 / 12.0 * q(i - 1);
            const double c1 = 2.0 * (1.0 + 5.0 * h2 / 12.0 * q(i));
            const double c2 = 1.0 - h2 / 12.0 * q(i + 1);
            v[static_cast<std::size_t>(i) - 1] =
                (c1 * v[static_cast<std::size_t>(i)] - c2 * v[static_cast<std::size_t>(i) + 1]) / c0;
            const double mag = std::abs(v[static_cast<std::size_t>(i) - 1]);
            if (mag > 1e250)
                for (int j = n_; j >= i - 1; --j) v[static_cast<std::size_t>(j)] /= mag;
        }
        const double scale = u[static_cast<std::size_t>(i_match)] / v[static_cast<std::size_t>(i_match)];
        for (int i = i_match; i <= n_; ++i)
            u[static_cast<std::size_t>(i)] = scale * v[static_cast<std::size_t>(i)];
        return u;
    }

    // Simpson integral of f over the grid
    double simpson(const std::vector<double>& f) const {
        double s = 0.0;
        for (int i = 0; i + 2 <= n_; i += 2)
            s += (f[static_cast<std::size_t>(i)] + 4.0 * f[static_cast<std::size_t>(i) + 1] +
                  f[static_cast<std::size_t>(i) + 2]) * h_ / 3.0;
        if (n_ % 2 == 1)
            s += 0.5 * h_ * (f[static_cast<std::size_t>(n_) - 1] + f[static_cast<std::size_t>(n_)]);
        return s;
    }

    // Hartree potential of the density phi^2 by the shell theorem:
    // u(r) = (4 pi / r) int_0^r rho s^2 ds + 4 pi int_r^R rho s ds
    std::vector<double> hartree(const std::vector<double>& phi) const {
        std::vector<double> inner(static_cast<std::size_t>(n_) + 1, 0.0);
        std::vector<double> outer(static_cast<std::size_t>(n_) + 1, 0.0);
        auto rho = [&](int i) {
            return phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
        };
        for (int i = 1; i <= n_; ++i) {
            const double a = rho(i - 1) * r_[static_cast<std::size_t>(i) - 1] * r_[static_cast<std::size_t>(i) - 1];
            const double b = rho(i) * r_[static_cast<std::size_t>(i)] * r_[static_cast<std::size_t>(i)];
            inner[static_cast<std::size_t>(i)] = inner[static_cast<std::size_t>(i) - 1] + 0.5 * h_ * (a + b);
        }
        for (int i = n_ - 1; i >= 0; --i) {
            const double a = rho(i) * r_[static_cast<std::size_t>(i)];
            const double b = rho(i + 1) * r_[static_cast<std::size_t>(i) + 1];
            outer[static_cast<std::size_t>(i)] = outer[static_cast<std::size_t>(i) + 1] + 0.5 * h_ * (a + b);
        }
        std::vector<double> u(static_cast<std::size_t>(n_) + 1);
        for (int i = 0; i <= n_; ++i) {
            const double fourpi = 4.0 * std::numbers::pi;
            u[static_cast<std::size_t>(i)] =
                (i == 0) ? fourpi * outer[0]
                         : fourpi * inner[static_cast<std::size_t>(i)] / r_[static_cast<std::size_t>(i)] +
                               fourpi * outer[static_cast<std::size_t>(i)];
        }
        return u;
    }

    // damped SCF for W = -Z/r + c * u_H, t-kinetic
    Result solve_hartree_model(double z, double c, double t, double mixing, double tol,
                               int max_iter) const {
        Result res;
        std::vector<double> u_h(static_cast<std::size_t>(n_) + 1, 0.0);
        double lambda_prev = 0.0;
        std::vector<double> u;
        for (int it = 1; it <= max_iter; ++it) {
            auto w = [&](double r) {
                const int i = std::min(n_, static_cast<int>(r / h_));
                return -z / r + c * u_h[static_cast<std::size_t>(i)];
            };
            const double lambda = ground_eigenvalue(w, t, -4.0 * z * z, 0.5, &u);
            // normalize phi = u / r in L^2(R^3)
            std::vector<double> integrand(static_cast<std::size_t>(n_) + 1);
            for (int i = 0; i <= n_; ++i)
                integrand[static_cast<std::size_t>(i)] =
                    u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
            const double norm2 = 4.0 * std::numbers::pi * simpson(integrand);
            std::vector<double> phi(static_cast<std::size_t>(n_) + 1);
            for (int i = 1; i <= n_; ++i)
                phi[static_cast<std::size_t>(i)] =
                    u[static_cast<std::size_t>(i)] / (r_[static_cast<std::size_t>(i)] * std::sqrt(norm2));
            phi[0] = 2.0 * phi[1] - phi[2];
            const std::vector<double> u_new = hartree(phi);
            for (int i = 0; i <= n_; ++i)
                u_h[static_cast<std::size_t>(i)] = (1.0 - mixing) * u_h[static_cast<std::size_t>(i)] +
                                                   mixing * u_new[static_cast<std::size_t>(i)];
            res.scf_iterations = it;
            res.phi = phi;
            res.lambda = lambda;
            if (it > 1 && std::abs(lambda - lambda_prev) < tol) {
                res.converged = true;
                break;
            }
            lambda_prev = lambda;
        }
        return res;
    }

private:
    // Numerov outward sweep; returns (node count, endpoint value)
    std::pair<int, double> integrate(const std::function<double(double)>& w_of_r, double t,
                                     double lambda, std::vector<double>* u_out) const {
        std::vector<double> u(static_cast<std::size_t>(n_) + 1, 0.0);
        // u'' = q u with q = (W - lambda)/t; q(0) multiplies u(0) = 0, any
        // finite stand-in works there
        auto q = [&](int i) {
            const double r = (i == 0) ? 0.5 * h_ : r_[static_cast<std::size_t>(i)];
            return (w_of_r(r) - lambda) / t;
        };
        u[0] = 0.0;
        // series start: u = r + a r^2 with 2a = lim r->0 r W(r) / t
        const double a0 = 0.5 * (w_of_r(1e-8) * 1e-8) / t;
        u[1] = h_ + a0 * h_ * h_;
        int nodes = 0;
        const double h2 = h_ * h_;
        // Numerov for u'' = q u:
        // (1 - h^2 q_{i+1}/12) u_{i+1} = 2 (1 + 5 h^2 q_i / 12) u_i - (1 - h^2 q_{i-1}/12) u_{i-1}
        for (int i = 1; i < n_; ++i) {
            const double c0 = 1.0 - h2 / 12.0 * q(i + 1);
            const double c1 = 2.0 * (1.0 + 5.0 * h2 / 12.0 * q(i));
            const double c2 = 1.0 - h2 / 12.0 * q(i - 1);
            u[static_cast<std::size_t>(i) + 1] =
                (c1 * u[static_cast<std::size_t>(i)] - c2 * u[static_cast<std::size_t>(i) - 1]) / c0;
            if (u[static_cast<std::size_t>(i) + 1] * u[static_cast<std::size_t>(i)] < 0.0) ++nodes;
            // rescale to avoid overflow in classically forbidden regions
            const double mag = std::abs(u[static_cast<std::size_t>(i) + 1]);
            if (mag > 1e250) {
                for (int j = 0; j <= i + 1; ++j) u[static_cast<std::size_t>(j)] /= mag;
            }
        }
        if (u_out) *u_out = u;
        return {nodes, u[static_cast<std::size_t>(n_)]};
    }

    double rmax_;
    int n_;
    double h_;
    std::vector<double> r_;
};

}  // namespace shooting
