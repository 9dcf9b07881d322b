#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "hfreg/grid.hpp"
#include "hfreg/radial_calculus.hpp"

namespace hfreg {

/// Isolated singular centers with separation radius D:
/// |c_i - c_j| >= 4 D for distinct centers.
struct SingularSet {
    std::vector<Eigen::Vector3d> centers;
    double separation = 1.0;  // D
    int dim = 3;

    void validate() const;

    /// Regularized distance to the nearest center: |x - c| inside B_D(c),
    /// 1 outside all B_2D(c), and a monotone C^2 quintic blend between.
    double weight(const Eigen::Vector3d& x) const;

    double distance_to_nearest(const Eigen::Vector3d& x) const;
    int nearest_center(const Eigen::Vector3d& x) const;
};

/// Free-function form of the weight of a singular set.
double weight_eval(const Eigen::Vector3d& x, const SingularSet& s);

/// Summability and weight exponents of a weighted Sobolev (semi)norm.
struct WeightSpec {
    double p = 2.0;  // may be infinity
    double gamma = 0.0;
    int dim = 3;

    bool p_finite() const { return std::isfinite(p); }
    double theta() const { return p_finite() ? (2.0 / 3.0) * (dim / p) : 0.0; }
    double gamma_tilde() const { return (2.0 / 3.0) * (gamma - 2.0); }
    void validate() const;
};

struct Ball {
    Eigen::Vector3d center{0.0, 0.0, 0.0};
    double radius = 1.0;
};

/// Quadrature resolution for ball integrals: graded radial cells with
/// Gauss-Legendre points, product angular rule.
struct SeminormQuadrature {
    int radial_cells = 32;
    double radial_sigma = 0.6;
    int radial_points = 10;
    int polar_points = 10;
    int azimuth_points = 20;
};

/// || r^{w} d^alpha f ||_{L^p} over the annulus r_lo <= |x - center| <= r_hi
/// of the ball (defaults to the full ball), r = distance to the ball center.
/// p = infinity takes the max over all sample nodes (a lower bound of the
/// sup). Throws when the weight alone makes the integral divergent
/// (p w + d <= 0 with r_lo = 0).
double weighted_alpha_norm(const DerivativeField& f, const MultiIndex& alpha,
                           double weight_exponent, double p, const Ball& ball,
                           const SeminormQuadrature& quad = {}, double r_lo = 0.0,
                           double r_hi = -1.0);

/// sum over |alpha| = k of || r^{w} d^alpha f ||_p  (the plain norm sums of
/// the estimate chain).
double alpha_group_sum(const DerivativeField& f, int k, double weight_exponent, double p,
                       const Ball& ball, const SeminormQuadrature& quad = {});

/// ( sum_{|alpha| = k} || r^{k - gamma} d^alpha f ||_p^p )^{1/p} over the
/// ball, r = distance to the ball center. p = infinity takes the max of
/// r^{k-gamma} |d^alpha f| over all sample nodes (a lower bound of the sup).
/// Throws when the weight alone makes the integral divergent
/// (p (k - gamma) + d <= 0).
double weighted_seminorm(const DerivativeField& f, int k, const WeightSpec& spec, const Ball& ball,
                         const SeminormQuadrature& quad = {});

/// Same seminorm restricted to the annulus r_lo <= |x - center| <= r_hi.
double weighted_seminorm_annulus(const DerivativeField& f, int k, const WeightSpec& spec,
                                 const Ball& ball, double r_lo, double r_hi,
                                 const SeminormQuadrature& quad = {});

/// Full norm ( sum_{j<=k} seminorm_j^p )^{1/p} (max over j for p = infinity).
double weighted_norm(const DerivativeField& f, int k, const WeightSpec& spec, const Ball& ball,
                     const SeminormQuadrature& quad = {});

/// Map j -> |f|_{K^{j,p}_gamma(B_R)} for j = 0..j_max.
struct SeminormSequence {
    std::vector<double> entries;
    WeightSpec spec;
    double ball_radius = 1.0;
    Eigen::Vector3d center{0.0, 0.0, 0.0};

    int max_order() const { return static_cast<int>(entries.size()) - 1; }
};

SeminormSequence seminorm_sequence(const DerivativeField& f, int j_max, const WeightSpec& spec,
                                   const Ball& ball, const SeminormQuadrature& quad = {});

/// Geometric-factorial growth certificate m_j <= C A^{j+1} j! fitted with
/// C = 1: A = max_j (m_j / j!)^{1/(j+1)}.
struct AnalyticEnvelope {
    double c = 1.0;
    double a = 0.0;
    double eta_or_gamma = 0.0;
    enum class Kind { homogeneous_k, non_homogeneous_j, pointwise } kind = Kind::homogeneous_k;
    int argmax_order = 0;
};

AnalyticEnvelope fit_envelope(const SeminormSequence& seq);

/// Non-homogeneous analytic class check: m_k <= A^{k+1} k! for every stored
/// k with k > gamma - d/p (lower orders exempt).
struct JClassReport {
    bool pass = true;
    int first_violation = -1;
    double worst_margin = 0.0;  // max over checked k of m_k / (A^{k+1} k!)
};

JClassReport j_class_check(const SeminormSequence& seq, double gamma, double a_envelope);

/// Dyadic annulus 2^{-j} R <= |x| <= 2^{-j+1} R, mapped to the reference
/// annulus by a homothety of the recorded ratio.
struct Annulus {
    double inner = 0.0;
    double outer = 0.0;
    double homothety_ratio = 1.0;  // maps this annulus onto the outermost one
};

std::vector<Annulus> dyadic_decompose(double radius, int j_max);

}  // namespace hfreg
