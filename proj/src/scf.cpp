#include "hfreg/scf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hfreg {

namespace {

int flat(int n, int iota, int sigma, int a, int b) {
    return ((iota * n + sigma) * n + a) * n + b;
}

}  // namespace

double SystemSpec::c(int iota, int sigma, int a, int b) const {
    return coupling(flat(n_orbitals, iota, sigma, a, b));
}

double& SystemSpec::c(int iota, int sigma, int a, int b) {
    return coupling(flat(n_orbitals, iota, sigma, a, b));
}

Eigen::VectorXd SystemSpec::zero_coupling(int n) { return Eigen::VectorXd::Zero(n * n * n * n); }

bool SystemSpec::coupling_diagonal() const {
    for (int i = 0; i < n_orbitals; ++i)
        for (int s = 0; s < n_orbitals; ++s) {
            if (i == s) continue;
            for (int a = 0; a < n_orbitals; ++a)
                for (int b = 0; b < n_orbitals; ++b)
                    if (c(i, s, a, b) != 0.0) return false;
        }
    return true;
}

void SystemSpec::validate() const {
    if (n_orbitals < 1) throw std::domain_error("SystemSpec: need at least one orbital");
    if (dim != 2 && dim != 3) throw std::domain_error("SystemSpec: dimension must be 2 or 3");
    if (!(t > 0.0)) throw std::domain_error("SystemSpec: kinetic coefficient must be positive");
    const auto need = static_cast<Eigen::Index>(n_orbitals) * n_orbitals * n_orbitals * n_orbitals;
    if (coupling.size() != need) throw std::domain_error("SystemSpec: coupling tensor has wrong size");
    if (!coupling.allFinite()) throw std::domain_error("SystemSpec: coupling tensor must be finite");
    if (!potential.radial_profile || !potential.radial_oracle)
        throw std::domain_error("SystemSpec: the radial solver needs a single-center radial potential");
    for (int i = 0; i < n_orbitals; ++i)
        for (int s = 0; s < n_orbitals; ++s)
            if (i != s)
                for (int a = 0; a < n_orbitals; ++a)
                    for (int b = 0; b < n_orbitals; ++b)
                        if (c(i, s, a, b) != c(s, i, a, b))
                            throw std::domain_error(
                                "SystemSpec: off-diagonal coupling must be symmetric in (iota, sigma)");
}

void SCFConfig::validate() const {
    if (!(mixing > 0.0 && mixing <= 1.0)) throw std::domain_error("SCFConfig: mixing must lie in (0, 1]");
    if (!(tolerance > 0.0)) throw std::domain_error("SCFConfig: tolerance must be positive");
    if (max_iterations < 1) throw std::domain_error("SCFConfig: max_iterations must be positive");
}

const RadialField& SCFState::u(int a, int b) const {
    const int n = static_cast<int>(orbitals.size());
    return aux_potentials[static_cast<std::size_t>(a * n + b)];
}

double SCFState::max_residual() const {
    double m = 0.0;
    for (double r : orbital_residuals) m = std::max(m, r);
    for (double r : poisson_residuals) m = std::max(m, r);
    return m;
}

std::vector<RadialField> update_potentials(const std::vector<RadialField>& orbitals) {
    const int n = static_cast<int>(orbitals.size());
    std::vector<RadialField> us(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            RadialField rho = orbitals[static_cast<std::size_t>(a)];
            rho.values =
                orbitals[static_cast<std::size_t>(a)].values.cwiseProduct(orbitals[static_cast<std::size_t>(b)].values);
            RadialField u = poisson_solve(rho, rho.dim);
            us[static_cast<std::size_t>(a * n + b)] = u;
            us[static_cast<std::size_t>(b * n + a)] = std::move(u);
        }
    return us;
}

namespace {

/// effective radial potential of orbital iota against frozen aux potentials
std::function<double(double)> effective_potential(const SystemSpec& spec,
                                                  const std::vector<RadialField>& us, int iota) {
    const int n = spec.n_orbitals;
    std::vector<std::pair<double, const RadialField*>> parts;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double cc = spec.c(iota, iota, a, b);
            if (cc != 0.0) parts.emplace_back(cc, &us[static_cast<std::size_t>(a * n + b)]);
        }
    auto v = spec.potential.radial_profile;
    return [v, parts](double r) {
        double w = v(r);
        for (const auto& [cc, field] : parts) w += cc * field->eval(r);
        return w;
    };
}

struct LinearStep {
    std::vector<RadialField> phis;
    std::vector<double> lambdas;
};

LinearStep linear_eigenstep(const SystemSpec& spec, const GradedRadialGrid& grid,
                            const std::vector<RadialField>& us) {
    LinearStep step;
    if (spec.coupling_diagonal() || spec.n_orbitals == 1) {
        for (int i = 0; i < spec.n_orbitals; ++i) {
            GroundState gs = eigensolve_ground(effective_potential(spec, us, i), spec.t, spec.dim, grid);
            step.phis.push_back(std::move(gs.phi));
            step.lambdas.push_back(gs.lambda);
        }
        return step;
    }
    // Off-diagonal sigma coupling: block pencil over the concatenated
    // solution space, subspace iteration with B-orthogonalization; orbital
    // iota is read off the dominant component of the iota-th eigen-tuple
    // (exact in the block-diagonal limit, ascending-lambda ordering).
    const int n = spec.n_orbitals;
    RadialPencil base = assemble_radial_pencil(spec.potential.radial_profile, spec.t, spec.dim, grid);
    const FemMesh& mesh = base.mesh;
    std::vector<BandedSym> umats;  // coupling terms per (iota, sigma)
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < n; ++s) {
            std::function<double(double)> coeff = [&, i, s](double r) {
                double w = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        const double cc = spec.c(i, s, a, b);
                        if (cc != 0.0) w += cc * us[static_cast<std::size_t>(a * n + b)].eval(r);
                    }
                return (spec.dim == 3) ? w : w * r;  // measure of the solution space
            };
            umats.push_back(assemble_p2(mesh, nullptr, &coeff));
        }

    const int lo = base.drop_first ? 1 : 0;
    const int inner = mesh.dof_count() - 1 - lo;
    const int bw = 2 * n + (n - 1);
    BandedSym a_blk = BandedSym::zero(inner * n, bw);
    BandedSym b_blk = BandedSym::zero(inner * n, bw);
    for (int col = 0; col < inner; ++col) {
        for (int k = 0; k <= 2 && col + k < inner; ++k) {
            const double kv = base.stiffness.bands(k, col + lo);
            const double mv = base.mass.bands(k, col + lo);
            for (int i = 0; i < n; ++i) {
                a_blk.at((col + k) * n + i, col * n + i) += kv;
                b_blk.at((col + k) * n + i, col * n + i) += mv;
            }
            for (int i = 0; i < n; ++i)
                for (int s = 0; s < n; ++s) {
                    const double uv = umats[static_cast<std::size_t>(i * n + s)].bands(k, col + lo);
                    if (uv == 0.0) continue;
                    if (k > 0)
                        a_blk.at((col + k) * n + i, col * n + s) += uv;
                    else if (i >= s)  // same-dof block: store each pair once
                        a_blk.at(col * n + i, col * n + s) += uv;
                }
        }
    }
    PencilEigenSolution sol = smallest_eigenpairs(a_blk, b_blk, n);
    for (int m = 0; m < n; ++m) {
        // pick the dominant component of the tuple
        int best = 0;
        double bestn = -1.0;
        for (int i = 0; i < n; ++i) {
            double norm2 = 0.0;
            for (int dof = 0; dof < inner; ++dof) {
                const double v = sol.eigenvectors(dof * n + i, m);
                norm2 += v * v;
            }
            if (norm2 > bestn) {
                bestn = norm2;
                best = i;
            }
        }
        Eigen::VectorXd reduced(inner);
        for (int dof = 0; dof < inner; ++dof) reduced(dof) = sol.eigenvectors(dof * n + best, m);
        Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.dof_count());
        full.segment(lo, inner) = reduced;
        RadialField phi;
        phi.grid = grid;
        phi.mesh = mesh;
        phi.dim = spec.dim;
        phi.values.resize(mesh.dof_count());
        if (spec.dim == 3) {
            for (int i = 1; i < mesh.dof_count(); ++i) phi.values(i) = full(i) / mesh.dofs(i);
            phi.values(0) = fem_eval_deriv(mesh, full, 0.0);
        } else {
            phi.values = full;
        }
        if (phi.values.sum() < 0.0) phi.values = -phi.values;
        phi.values /= phi.l2_norm();
        step.phis.push_back(std::move(phi));
        step.lambdas.push_back(sol.eigenvalues(m));
    }
    return step;
}

}  // namespace

ResidualReport scf_residual(const SCFState& state, const SystemSpec& spec) {
    spec.validate();
    const int n = spec.n_orbitals;
    ResidualReport report;
    const GradedRadialGrid& grid = state.orbitals[0].grid;
    RadialPencil base =
        assemble_radial_pencil(spec.potential.radial_profile, spec.t, spec.dim, grid);
    const FemMesh& mesh = base.mesh;
    const int nd = mesh.dof_count();
    const double d = spec.dim;
    const double omega = sphere_measure(spec.dim);

    BandedLDLT mass_ldlt;
    mass_ldlt.factorize(base.mass);

    for (int iota = 0; iota < n; ++iota) {
        const Eigen::VectorXd sol_iota =
            base.solution_from_phi(state.orbitals[static_cast<std::size_t>(iota)].values);
        Eigen::VectorXd r_vec = base.stiffness.multiply(sol_iota);
        for (int s = 0; s < n; ++s) {
            std::function<double(double)> ucoeff = [&, iota, s](double r) {
                double w = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        const double cc = spec.c(iota, s, a, b);
                        if (cc != 0.0) w += cc * state.u(a, b).eval(r);
                    }
                return (spec.dim == 3) ? w : w * r;
            };
            BandedSym cross = assemble_p2(mesh, nullptr, &ucoeff);
            r_vec += cross.multiply(
                base.solution_from_phi(state.orbitals[static_cast<std::size_t>(s)].values));
        }
        r_vec -= state.lambdas[static_cast<std::size_t>(iota)] * base.mass.multiply(sol_iota);
        // Dirichlet rows carry no equation
        if (base.drop_first) r_vec(0) = 0.0;
        r_vec(nd - 1) = 0.0;
        const Eigen::VectorXd rep = mass_ldlt.solve(r_vec);
        report.orbital.push_back(std::sqrt(std::max(0.0, omega * rep.dot(r_vec))));
    }

    // Poisson residuals in the phi-space weak form
    std::function<double(double)> rd = [d](double r) { return std::pow(r, d - 1.0); };
    BandedSym kp = assemble_p2(mesh, &rd, nullptr);
    BandedSym mp = assemble_p2(mesh, nullptr, &rd);
    const double rout = mesh.boundaries(mesh.boundaries.size() - 1);
    if (spec.dim == 3) kp.at(nd - 1, nd - 1) += rout;
    BandedLDLT mp_ldlt;
    mp_ldlt.factorize(mp);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const RadialField& u = state.u(a, b);
            Eigen::VectorXd f = assemble_load_p2(mesh, [&](double r) {
                return 4.0 * std::numbers::pi *
                       state.orbitals[static_cast<std::size_t>(a)].eval(r) *
                       state.orbitals[static_cast<std::size_t>(b)].eval(r) * std::pow(r, d - 1.0);
            });
            Eigen::VectorXd r_vec = kp.multiply(u.values) - f;
            if (spec.dim == 2) r_vec(nd - 1) = 0.0;  // pinned by the log matching
            const Eigen::VectorXd rep = mp_ldlt.solve(r_vec);
            report.poisson.push_back(std::sqrt(std::max(0.0, omega * rep.dot(r_vec))));
        }

    for (double r : report.orbital) report.max_orbital = std::max(report.max_orbital, r);
    for (double r : report.poisson) report.max_poisson = std::max(report.max_poisson, r);
    return report;
}

SCFState scf_solve(const SystemSpec& spec, const SCFConfig& config) {
    spec.validate();
    config.validate();
    const int n = spec.n_orbitals;
    const GradedRadialGrid grid = config.make_grid();

    SCFState state;
    // initial guess: the decoupled (c = 0) eigenfunctions
    {
        RadialSpectrum s0 = eigensolve_lowest(spec.potential.radial_profile, spec.t, spec.dim, grid, n);
        state.orbitals = std::move(s0.phis);
        state.lambdas = std::move(s0.lambdas);
    }

    if (spec.max_coupling() == 0.0) {
        state.aux_potentials = update_potentials(state.orbitals);
        ResidualReport rep = scf_residual(state, spec);
        state.orbital_residuals = rep.orbital;
        state.poisson_residuals = rep.poisson;
        state.residual_history.push_back(state.max_residual());
        state.iterations = 1;
        state.converged = state.max_residual() < config.tolerance;
        return state;
    }

    int rising = 0;
    for (int it = 1; it <= config.max_iterations; ++it) {
        state.aux_potentials = update_potentials(state.orbitals);
        LinearStep step = linear_eigenstep(spec, grid, state.aux_potentials);

        // damped mixing with sign alignment, then renormalization
        for (int i = 0; i < n; ++i) {
            RadialField& phi = state.orbitals[static_cast<std::size_t>(i)];
            RadialField& fresh = step.phis[static_cast<std::size_t>(i)];
            if (phi.inner(fresh) < 0.0) fresh.values = -fresh.values;
            phi.values = (1.0 - config.mixing) * phi.values + config.mixing * fresh.values;
            phi.values /= phi.l2_norm();
            state.lambdas[static_cast<std::size_t>(i)] = step.lambdas[static_cast<std::size_t>(i)];
        }
        state.aux_potentials = update_potentials(state.orbitals);

        ResidualReport rep = scf_residual(state, spec);
        state.orbital_residuals = rep.orbital;
        state.poisson_residuals = rep.poisson;
        const double res = state.max_residual();
        if (!state.residual_history.empty() && res > state.residual_history.back())
            ++rising;
        state.residual_history.push_back(res);
        state.iterations = it;
        if (res < config.tolerance) {
            state.converged = true;
            break;
        }
    }
    if (!state.converged) {
        state.note = (rising >= 2)
                         ? "not converged; residuals oscillate, consider a smaller mixing factor"
                         : "not converged within the iteration budget";
    }
    const std::size_t hist = state.residual_history.size();
    for (std::size_t i = hist > 5 ? hist - 5 : 1; i < hist; ++i)
        if (state.residual_history[i] > state.residual_history[i - 1]) state.monotone_tail = false;
    return state;
}

double uab_sup_norm(const SCFState& state) {
    double m = 0.0;
    for (const RadialField& u : state.aux_potentials) m = std::max(m, u.sup_norm());
    return m;
}

StateDerivatives state_axis_derivatives(const SCFState& state, const SystemSpec& spec, double r0,
                                        int m_max) {
    spec.validate();
    if (m_max < 1 || m_max > 64) throw std::domain_error("state_axis_derivatives: order limit is 64");
    using Q = __float128;
    const int n = spec.n_orbitals;
    const std::size_t nm = static_cast<std::size_t>(m_max) + 1;
    std::vector<std::vector<Q>> orb(static_cast<std::size_t>(n), std::vector<Q>(nm, Q(0)));
    std::vector<std::vector<Q>> aux(static_cast<std::size_t>(n) * n, std::vector<Q>(nm, Q(0)));

    for (int i = 0; i < n; ++i) {
        auto [v, dv] = state.orbitals[static_cast<std::size_t>(i)].interp_value_deriv(r0);
        orb[static_cast<std::size_t>(i)][0] = v;
        if (m_max >= 1) orb[static_cast<std::size_t>(i)][1] = dv;
    }
    for (int ab = 0; ab < n * n; ++ab) {
        auto [v, dv] = state.aux_potentials[static_cast<std::size_t>(ab)].interp_value_deriv(r0);
        aux[static_cast<std::size_t>(ab)][0] = v;
        if (m_max >= 1) aux[static_cast<std::size_t>(ab)][1] = dv;
    }

    std::vector<Q> rinv(nm);
    const Q r0q = r0;
    rinv[0] = Q(1) / r0q;
    for (int j = 1; j <= m_max; ++j) rinv[static_cast<std::size_t>(j)] = rinv[static_cast<std::size_t>(j - 1)] * Q(-j) / r0q;

    const Q dm1 = Q(spec.dim - 1);
    const Q tq = spec.t;
    const Q fourpi = Q(4) * Q(3.141592653589793238462643383279502884L);
    for (int m = 0; m + 2 <= m_max; ++m) {
        // orbital equations: t phi'' = (V - lambda) phi + sum c u phi_sigma - t (d-1)/r phi'
        for (int i = 0; i < n; ++i) {
            Q s_pot(0);
            for (int j = 0; j <= m; ++j) {
                const Q cb = Q(static_cast<double>(binom(static_cast<std::int64_t>(m), j)));
                Q wj = Q(spec.potential.radial_oracle(j, r0)) * orb[static_cast<std::size_t>(i)][static_cast<std::size_t>(m - j)];
                for (int s = 0; s < n; ++s) {
                    Q uj(0);
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) {
                            const double cc = spec.c(i, s, a, b);
                            if (cc != 0.0) uj += Q(cc) * aux[static_cast<std::size_t>(a * n + b)][static_cast<std::size_t>(j)];
                        }
                    wj += uj * orb[static_cast<std::size_t>(s)][static_cast<std::size_t>(m - j)];
                }
                s_pot += cb * wj;
            }
            Q s_r(0);
            for (int j = 0; j <= m; ++j) {
                const Q cb = Q(static_cast<double>(binom(static_cast<std::int64_t>(m), j)));
                s_r += cb * rinv[static_cast<std::size_t>(j)] * orb[static_cast<std::size_t>(i)][static_cast<std::size_t>(m + 1 - j)];
            }
            orb[static_cast<std::size_t>(i)][static_cast<std::size_t>(m + 2)] =
                s_pot / tq - (Q(state.lambdas[static_cast<std::size_t>(i)]) / tq) * orb[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] -
                dm1 * s_r;
        }
        // Poisson equations: u'' = -4 pi phi_a phi_b - (d-1)/r u'
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Q s_rho(0);
                for (int j = 0; j <= m; ++j) {
                    const Q cb = Q(static_cast<double>(binom(static_cast<std::int64_t>(m), j)));
                    s_rho += cb * orb[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] *
                             orb[static_cast<std::size_t>(b)][static_cast<std::size_t>(m - j)];
                }
                Q s_r(0);
                for (int j = 0; j <= m; ++j) {
                    const Q cb = Q(static_cast<double>(binom(static_cast<std::int64_t>(m), j)));
                    s_r += cb * rinv[static_cast<std::size_t>(j)] * aux[static_cast<std::size_t>(a * n + b)][static_cast<std::size_t>(m + 1 - j)];
                }
                aux[static_cast<std::size_t>(a * n + b)][static_cast<std::size_t>(m + 2)] =
                    -fourpi * s_rho - dm1 * s_r;
            }
    }
    StateDerivatives out;
    out.orbital.assign(static_cast<std::size_t>(n), std::vector<double>(nm, 0.0));
    out.aux.assign(static_cast<std::size_t>(n) * n, std::vector<double>(nm, 0.0));
    for (int i = 0; i < n; ++i)
        for (std::size_t m = 0; m < nm; ++m) {
            const double v = static_cast<double>(orb[static_cast<std::size_t>(i)][m]);
            if (!std::isfinite(v)) throw std::runtime_error("state_axis_derivatives: non-finite derivative");
            out.orbital[static_cast<std::size_t>(i)][m] = v;
        }
    for (int ab = 0; ab < n * n; ++ab)
        for (std::size_t m = 0; m < nm; ++m)
            out.aux[static_cast<std::size_t>(ab)][m] = static_cast<double>(aux[static_cast<std::size_t>(ab)][m]);
    return out;
}

}  // namespace hfreg
