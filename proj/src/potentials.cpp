#include "hfreg/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace hfreg {

namespace {

/// P_m(x) by the three-term recurrence.
double legendre(int m, double x) {
    if (m == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// Exact directional derivatives of a Coulomb sum along any ray:
/// 1/|w + s u| = (1/rho) sum_m P_m(-w.u/rho) (s/rho)^m, so the m-th
/// derivative at s = 0 is m! P_m(-cos) / rho^{m+1}.
double coulomb_directional(const PotentialSpec& spec, const Eigen::Vector3d& x,
                           const Eigen::Vector3d& u, int m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.centers.centers.size(); ++i) {
        const Eigen::Vector3d w = x - spec.centers.centers[i];
        const double rho = w.norm();
        if (rho <= 0.0) throw std::domain_error("coulomb potential sampled at a center");
        const double cosx = -w.dot(u) / rho;
        double fact_over_rho = 1.0 / rho;
        for (int k = 1; k <= m; ++k) fact_over_rho *= static_cast<double>(k) / rho;
        sum += -spec.charges[i] * fact_over_rho * legendre(m, cosx);
    }
    return sum;
}

}  // namespace

void PotentialSpec::validate() const {
    centers.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("PotentialSpec: epsilon must lie in (0, 1)");
    if (kind == Kind::coulomb) {
        if (charges.size() != centers.centers.size())
            throw std::domain_error("PotentialSpec: one charge per center required");
        for (double z : charges)
            if (!(z > 0.0)) throw std::domain_error("PotentialSpec: charges must be positive");
    } else {
        if (!eval || !directional)
            throw std::domain_error("PotentialSpec: non-Coulomb potentials need eval and directional oracles");
    }
}

PotentialSpec PotentialSpec::coulomb(std::vector<double> zs, SingularSet cs, double eps) {
    PotentialSpec spec;
    spec.kind = Kind::coulomb;
    spec.charges = std::move(zs);
    spec.centers = std::move(cs);
    spec.epsilon = eps;
    spec.validate();
    spec.eval = [spec](const Eigen::Vector3d& x) { return coulomb_eval(x, spec); };
    spec.directional = [spec](const Eigen::Vector3d& x, const Eigen::Vector3d& u, int m) {
        return coulomb_directional(spec, x, u, m);
    };
    spec.mixed_derivative = [spec](const MultiIndex& alpha, const Eigen::Vector3d& x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < spec.centers.centers.size(); ++i) {
            const double z = spec.charges[i];
            const RadialDerivOracle inv_r = [z](int m, double r) {
                double f = -z / r;
                for (int k = 1; k <= m; ++k) f *= -static_cast<double>(k) / r;
                return f;
            };
            sum += radial_cartesian_derivative(alpha, x - spec.centers.centers[i], inv_r);
        }
        return sum;
    };
    spec.mixed_order_limit = 4;
    if (spec.centers.centers.size() == 1) {
        const double z = spec.charges[0];
        spec.radial_profile = [z](double r) { return -z / r; };
        spec.radial_oracle = [z](int m, double r) { return coulomb_radial_derivative(r, m, z); };
    }
    return spec;
}

double coulomb_eval(const Eigen::Vector3d& x, const PotentialSpec& spec) {
    if (spec.kind != PotentialSpec::Kind::coulomb)
        throw std::domain_error("coulomb_eval: spec is not a Coulomb potential");
    double v = 0.0;
    for (std::size_t i = 0; i < spec.centers.centers.size(); ++i) {
        const double d = (x - spec.centers.centers[i]).norm();
        if (d <= 0.0) throw std::domain_error("coulomb_eval: x lies exactly at a center");
        v -= spec.charges[i] / d;
    }
    return v;
}

double coulomb_radial_derivative(double rdist, int m, double z) {
    if (!(rdist > 0.0)) throw std::domain_error("coulomb_radial_derivative: r must be positive");
    if (m < 0) throw std::domain_error("coulomb_radial_derivative: order must be nonnegative");
    double f = -z / rdist;
    for (int k = 1; k <= m; ++k) f *= -static_cast<double>(k) / rdist;
    return f;
}

std::vector<double> SamplePlan::radii(double separation) const {
    std::vector<double> rs;
    double r = separation * radius_factor;
    for (int i = 0; i < radii_count; ++i) {
        rs.push_back(r);
        r *= radius_factor;
    }
    return rs;
}

std::vector<Eigen::Vector3d> SamplePlan::directions(int dim) const {
    std::vector<Eigen::Vector3d> dirs;
    const int axes = dim;
    for (int i = 0; i < axes; ++i) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(i) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    if (include_diagonals) {
        if (dim == 3) {
            for (int sx : {-1, 1})
                for (int sy : {-1, 1}) {
                    dirs.push_back(Eigen::Vector3d(sx, sy, 0).normalized());
                    dirs.push_back(Eigen::Vector3d(sx, 0, sy).normalized());
                    dirs.push_back(Eigen::Vector3d(0, sx, sy).normalized());
                }
            for (int sx : {-1, 1})
                for (int sy : {-1, 1})
                    for (int sz : {-1, 1}) dirs.push_back(Eigen::Vector3d(sx, sy, sz).normalized());
        } else {
            for (int sx : {-1, 1})
                for (int sy : {-1, 1}) dirs.push_back(Eigen::Vector3d(sx, sy, 0).normalized());
        }
    }
    return dirs;
}

WeightedAnalyticCertificate certify_weighted_analytic(const PotentialSpec& spec,
                                                      const SingularSet& s, double epsilon,
                                                      int alpha_max, const SamplePlan& plan) {
    spec.validate();
    s.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("certify_weighted_analytic: epsilon must lie in (0, 1)");
    if (alpha_max < 1) throw std::domain_error("certify_weighted_analytic: alpha_max must be >= 1");

    WeightedAnalyticCertificate cert;
    cert.epsilon = epsilon;
    cert.alpha_max = alpha_max;
    cert.order_sup.assign(static_cast<std::size_t>(alpha_max) + 1, 0.0);

    const auto radii = plan.radii(s.separation);
    const auto dirs = plan.directions(s.dim);

    // weighted order-0 values per radius (largest over centers/directions),
    // ordered large radius -> small radius, for the unboundedness check
    std::vector<double> order0_by_radius(radii.size(), 0.0);

    for (const Eigen::Vector3d& c : s.centers) {
        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
            for (const Eigen::Vector3d& u : dirs) {
                const Eigen::Vector3d x = c + radii[ri] * u;
                const double w = s.weight(x);
                ++cert.sample_count;
                const double v0 = std::abs(spec.eval(x)) * std::pow(w, 2.0 - epsilon);
                cert.order_sup[0] = std::max(cert.order_sup[0], v0);
                order0_by_radius[ri] = std::max(order0_by_radius[ri], v0);
                for (int m = 1; m <= alpha_max; ++m) {
                    const double vm =
                        std::abs(spec.directional(x, u, m)) * std::pow(w, 2.0 - epsilon + m);
                    cert.order_sup[static_cast<std::size_t>(m)] =
                        std::max(cert.order_sup[static_cast<std::size_t>(m)], vm);
                }
            }
        }
        // mixed tensor derivatives near this center, capped order
        if (spec.mixed_derivative) {
            for (int k = 1; k <= std::min(alpha_max, spec.mixed_order_limit); ++k) {
                for (const auto& alpha : multi_indices_of_order(s.dim, k)) {
                    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
                        for (const Eigen::Vector3d& u : dirs) {
                            const Eigen::Vector3d x = c + radii[ri] * u;
                            const double w = s.weight(x);
                            const double vk = std::abs(spec.mixed_derivative(alpha, x)) *
                                              std::pow(w, 2.0 - epsilon + k);
                            cert.order_sup[static_cast<std::size_t>(k)] =
                                std::max(cert.order_sup[static_cast<std::size_t>(k)], vk);
                        }
                    }
                }
            }
        }
    }

    // unbounded if the weighted order-0 values keep growing toward the center
    if (radii.size() >= 4) {
        const double inner = std::max(order0_by_radius[radii.size() - 1],
                                      order0_by_radius[radii.size() - 2]);
        const double outer = std::max(order0_by_radius[0], order0_by_radius[1]);
        const double mid = order0_by_radius[radii.size() / 2];
        if (inner > 10.0 * std::max(outer, 1e-300) && inner > 2.0 * mid)
            throw std::runtime_error(
                "certify_weighted_analytic: weighted values grow without bound toward a center "
                "(potential violates the weighted-analytic hypothesis)");
    }

    cert.c_v = cert.order_sup[0];
    double a = 0.0;
    const double c_ref = std::max(cert.c_v, 1e-300);
    for (int m = 1; m <= alpha_max; ++m) {
        const double q = cert.order_sup[static_cast<std::size_t>(m)] /
                         (c_ref * std::tgamma(static_cast<double>(m) + 1.0));
        if (q > 0.0) a = std::max(a, std::pow(q, 1.0 / m));
    }
    cert.a_v = a;
    return cert;
}

}  // namespace hfreg
