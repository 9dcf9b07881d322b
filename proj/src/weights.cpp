#include "hfreg/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace hfreg {

void SingularSet::validate() const {
    if (centers.empty()) throw std::domain_error("SingularSet: needs at least one center");
    if (!(separation > 0.0)) throw std::domain_error("SingularSet: separation must be positive");
    if (dim != 2 && dim != 3) throw std::domain_error("SingularSet: dimension must be 2 or 3");
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            if ((centers[i] - centers[j]).norm() < 4.0 * separation)
                throw std::domain_error("SingularSet: centers violate the 4D separation condition");
}

int SingularSet::nearest_center(const Eigen::Vector3d& x) const {
    int best = 0;
    double bd = (x - centers[0]).norm();
    for (std::size_t i = 1; i < centers.size(); ++i) {
        const double d = (x - centers[i]).norm();
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double SingularSet::distance_to_nearest(const Eigen::Vector3d& x) const {
    return (x - centers[static_cast<std::size_t>(nearest_center(x))]).norm();
}

double SingularSet::weight(const Eigen::Vector3d& x) const {
    const double d = distance_to_nearest(x);
    const double dd = separation;
    if (d <= dd) return d;
    if (d >= 2.0 * dd) return 1.0;
    // C^2 quintic Hermite blend on t in [0,1]: value D, slope D (dr/dd = 1),
    // curvature 0 at t=0; value 1, slope 0, curvature 0 at t=1.
    const double t = (d - dd) / dd;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const double h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const double h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    return dd * h00 + dd * h10 + h01;
}

double weight_eval(const Eigen::Vector3d& x, const SingularSet& s) { return s.weight(x); }

void WeightSpec::validate() const {
    if (!(p >= 1.0)) throw std::domain_error("WeightSpec: p must lie in [1, infinity]");
    if (dim != 2 && dim != 3) throw std::domain_error("WeightSpec: dimension must be 2 or 3");
}

namespace {

struct BallRule {
    RadialQuadrature radial;
    AngularQuadrature angular;
};

BallRule make_rule(const Ball& ball, double r_lo, double r_hi, int dim,
                   const SeminormQuadrature& quad) {
    GradedRadialGrid grid = build_grid(ball.radius, quad.radial_cells, quad.radial_sigma);
    BallRule rule;
    rule.radial = radial_quadrature(grid, r_lo, r_hi, quad.radial_points);
    rule.angular = angular_quadrature(dim, quad.polar_points, quad.azimuth_points);
    return rule;
}

double alpha_norm_impl(const DerivativeField& f, const MultiIndex& alpha, double wexp, double p,
                       const Ball& ball, double r_lo, double r_hi, const SeminormQuadrature& quad) {
    if (!(p >= 1.0)) throw std::domain_error("weighted_alpha_norm: p must lie in [1, infinity]");
    if (f.dim != alpha.dim())
        throw std::domain_error("weighted_alpha_norm: field/index dimension mismatch");
    const int d = f.dim;
    if (std::isfinite(p) && r_lo == 0.0) {
        const double exponent = p * wexp + d - 1.0;
        if (exponent <= -1.0)
            throw std::domain_error(
                "weighted_alpha_norm: divergent weight integral, gamma outside the admissible range");
    }
    const BallRule rule = make_rule(ball, r_lo, r_hi, d, quad);

    if (!std::isfinite(p)) {
        double best = 0.0;
        auto scan_radius = [&](double r) {
            if (r <= 0.0) return;
            const double w = std::pow(r, wexp);
            for (std::size_t a = 0; a < rule.angular.directions.size(); ++a) {
                const Eigen::Vector3d x = ball.center + r * rule.angular.directions[a];
                best = std::max(best, w * std::abs(f.derivative(alpha, x)));
            }
        };
        for (int q = 0; q < rule.radial.points.size(); ++q) scan_radius(rule.radial.points(q));
        scan_radius(r_hi);
        scan_radius(std::max(r_lo, 1e-12 * ball.radius));
        return best;
    }

    double sum = 0.0;
    for (int q = 0; q < rule.radial.points.size(); ++q) {
        const double r = rule.radial.points(q);
        const double wq = rule.radial.weights(q) * std::pow(r, d - 1.0) * std::pow(r, p * wexp);
        double angular_sum = 0.0;
        for (std::size_t a = 0; a < rule.angular.directions.size(); ++a) {
            const Eigen::Vector3d x = ball.center + r * rule.angular.directions[a];
            angular_sum += rule.angular.weights(a) * std::pow(std::abs(f.derivative(alpha, x)), p);
        }
        sum += wq * angular_sum;
    }
    return std::pow(sum, 1.0 / p);
}

}  // namespace

double weighted_alpha_norm(const DerivativeField& f, const MultiIndex& alpha, double weight_exponent,
                           double p, const Ball& ball, const SeminormQuadrature& quad, double r_lo,
                           double r_hi) {
    if (r_hi < 0.0) r_hi = ball.radius;
    if (!(r_lo >= 0.0 && r_lo < r_hi && r_hi <= ball.radius * (1.0 + 1e-12)))
        throw std::domain_error("weighted_alpha_norm: bad radial range");
    return alpha_norm_impl(f, alpha, weight_exponent, p, ball, r_lo, r_hi, quad);
}

double alpha_group_sum(const DerivativeField& f, int k, double weight_exponent, double p,
                       const Ball& ball, const SeminormQuadrature& quad) {
    double sum = 0.0;
    for (const auto& alpha : multi_indices_of_order(f.dim, k))
        sum += weighted_alpha_norm(f, alpha, weight_exponent, p, ball, quad);
    return sum;
}

namespace {

double seminorm_impl(const DerivativeField& f, int k, const WeightSpec& spec, const Ball& ball,
                     double r_lo, double r_hi, const SeminormQuadrature& quad) {
    spec.validate();
    if (k < 0) throw std::domain_error("weighted_seminorm: order must be nonnegative");
    if (f.dim != spec.dim) throw std::domain_error("weighted_seminorm: field/spec dimension mismatch");
    const auto alphas = multi_indices_of_order(spec.dim, k);
    if (!spec.p_finite()) {
        double best = 0.0;
        for (const auto& alpha : alphas)
            best = std::max(best,
                            alpha_norm_impl(f, alpha, k - spec.gamma, spec.p, ball, r_lo, r_hi, quad));
        return best;
    }
    double sum = 0.0;
    for (const auto& alpha : alphas)
        sum += std::pow(alpha_norm_impl(f, alpha, k - spec.gamma, spec.p, ball, r_lo, r_hi, quad),
                        spec.p);
    return std::pow(sum, 1.0 / spec.p);
}

}  // namespace

double weighted_seminorm(const DerivativeField& f, int k, const WeightSpec& spec, const Ball& ball,
                         const SeminormQuadrature& quad) {
    return seminorm_impl(f, k, spec, ball, 0.0, ball.radius, quad);
}

double weighted_seminorm_annulus(const DerivativeField& f, int k, const WeightSpec& spec,
                                 const Ball& ball, double r_lo, double r_hi,
                                 const SeminormQuadrature& quad) {
    if (!(r_lo >= 0.0 && r_lo < r_hi && r_hi <= ball.radius * (1.0 + 1e-12)))
        throw std::domain_error("weighted_seminorm_annulus: bad radial range");
    return seminorm_impl(f, k, spec, ball, r_lo, r_hi, quad);
}

double weighted_norm(const DerivativeField& f, int k, const WeightSpec& spec, const Ball& ball,
                     const SeminormQuadrature& quad) {
    if (!spec.p_finite()) {
        double best = 0.0;
        for (int j = 0; j <= k; ++j)
            best = std::max(best, weighted_seminorm(f, j, spec, ball, quad));
        return best;
    }
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) sum += std::pow(weighted_seminorm(f, j, spec, ball, quad), spec.p);
    return std::pow(sum, 1.0 / spec.p);
}

SeminormSequence seminorm_sequence(const DerivativeField& f, int j_max, const WeightSpec& spec,
                                   const Ball& ball, const SeminormQuadrature& quad) {
    if (j_max < 0) throw std::domain_error("seminorm_sequence: j_max must be nonnegative");
    SeminormSequence seq;
    seq.spec = spec;
    seq.ball_radius = ball.radius;
    seq.center = ball.center;
    for (int j = 0; j <= j_max; ++j)
        seq.entries.push_back(weighted_seminorm(f, j, spec, ball, quad));
    return seq;
}

AnalyticEnvelope fit_envelope(const SeminormSequence& seq) {
    if (seq.entries.size() < 3) throw std::domain_error("fit_envelope: need orders 0..2 at least");
    AnalyticEnvelope env;
    env.eta_or_gamma = seq.spec.gamma;
    bool all_zero = true;
    double best = 0.0;
    for (std::size_t j = 0; j < seq.entries.size(); ++j) {
        const double m = seq.entries[j];
        if (m < 0.0) throw std::domain_error("fit_envelope: negative seminorm");
        if (m == 0.0) continue;
        all_zero = false;
        const double a = std::pow(m / std::tgamma(static_cast<double>(j) + 1.0),
                                  1.0 / (static_cast<double>(j) + 1.0));
        if (a > best) {
            best = a;
            env.argmax_order = static_cast<int>(j);
        }
    }
    if (all_zero) {
        env.a = 0.0;
        env.c = 0.0;
        return env;
    }
    env.a = best;
    env.c = 1.0;
    return env;
}

JClassReport j_class_check(const SeminormSequence& seq, double gamma, double a_envelope) {
    JClassReport report;
    const double threshold = gamma - seq.spec.dim / seq.spec.p;
    for (std::size_t k = 0; k < seq.entries.size(); ++k) {
        if (static_cast<double>(k) <= threshold) continue;  // low orders exempt
        const double bound =
            std::pow(a_envelope, static_cast<double>(k) + 1.0) * std::tgamma(static_cast<double>(k) + 1.0);
        const double margin = (bound > 0.0) ? seq.entries[k] / bound
                                            : (seq.entries[k] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        report.worst_margin = std::max(report.worst_margin, margin);
        if (margin > 1.0 + 1e-12 && report.first_violation < 0) {
            report.pass = false;
            report.first_violation = static_cast<int>(k);
        }
    }
    return report;
}

std::vector<Annulus> dyadic_decompose(double radius, int j_max) {
    if (!(radius > 0.0)) throw std::domain_error("dyadic_decompose: radius must be positive");
    if (j_max < 1) throw std::domain_error("dyadic_decompose: j_max must be at least 1");
    std::vector<Annulus> out;
    out.reserve(static_cast<std::size_t>(j_max));
    for (int j = 1; j <= j_max; ++j) {
        Annulus v;
        v.outer = radius * std::ldexp(1.0, -j + 1);
        v.inner = radius * std::ldexp(1.0, -j);
        v.homothety_ratio = std::ldexp(1.0, j - 1);
        out.push_back(v);
    }
    return out;
}

}  // namespace hfreg
