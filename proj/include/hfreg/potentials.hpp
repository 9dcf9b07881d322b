#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "hfreg/radial_calculus.hpp"
#include "hfreg/weights.hpp"

namespace hfreg {

/// Directional derivative oracle: (x, unit u, m) -> d^m/ds^m V(x + s u) at s=0.
using DirectionalOracle = std::function<double(const Eigen::Vector3d&, const Eigen::Vector3d&, int)>;

struct PotentialSpec {
    enum class Kind { coulomb, smooth_analytic, user_supplied } kind = Kind::coulomb;
    std::vector<double> charges;  // Coulomb only, one per center
    SingularSet centers;
    double epsilon = 0.5;  // the (V-hyp) exponent parameter

    // user-supplied potentials provide these; Coulomb fills them itself
    std::function<double(const Eigen::Vector3d&)> eval;
    DirectionalOracle directional;
    /// mixed Cartesian derivative, available up to mixed_order_limit
    std::function<double(const MultiIndex&, const Eigen::Vector3d&)> mixed_derivative;
    int mixed_order_limit = 4;

    /// radial profile about a single center, used by the radial solvers
    std::function<double(double)> radial_profile;
    RadialDerivOracle radial_oracle;

    void validate() const;

    /// Radial profile of a single-center Coulomb potential on the positive
    /// half line (r > 0), derivative oracle of any order.
    static PotentialSpec coulomb(std::vector<double> charges, SingularSet centers, double epsilon);
};

/// -sum_i Z_i / |x - c_i|; throws at a center.
double coulomb_eval(const Eigen::Vector3d& x, const PotentialSpec& spec);

/// d^m/dr^m ( -Z / r ) = -Z (-1)^m m! r^{-1-m}; computed by the stable
/// first-order recurrence f^{(m+1)} = -(1+m)/r f^{(m)}.
double coulomb_radial_derivative(double rdist, int m, double z);

/// Geometric radii times coordinate/diagonal directions around each center.
struct SamplePlan {
    int radii_count = 20;        // radii separation * 2^{-1..-count}
    double radius_factor = 0.5;  // geometric ratio
    bool include_diagonals = true;

    std::vector<double> radii(double separation) const;
    std::vector<Eigen::Vector3d> directions(int dim) const;
};

struct WeightedAnalyticCertificate {
    double epsilon = 0.5;
    double c_v = 0.0;
    double a_v = 0.0;
    int alpha_max = 0;
    int sample_count = 0;
    /// largest weighted value seen per derivative order (diagnostics)
    std::vector<double> order_sup;
};

/// Numeric certificate for || r^{2 - eps + |alpha|} d^alpha V ||_inf
/// <= C_V A_V^{|alpha|} |alpha|! on the sample plan: C_V is the order-0
/// supremum, A_V the smallest geometric factor covering orders >= 1.
/// Directional derivatives along the plan's rays cover all orders; mixed
/// tensor derivatives are enumerated up to spec.mixed_order_limit.
/// Throws std::runtime_error when the weighted order-0 values grow without
/// bound toward a center.
WeightedAnalyticCertificate certify_weighted_analytic(const PotentialSpec& spec,
                                                      const SingularSet& s, double epsilon,
                                                      int alpha_max, const SamplePlan& plan = {});

}  // namespace hfreg
