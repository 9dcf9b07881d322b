#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <vector>

#include "hfreg/combinatorics.hpp"

namespace hfreg {

/// m-th radial derivative oracle: (m, r) -> f^(m)(r), r > 0.
using RadialDerivOracle = std::function<double(int, double)>;

/// One term of the Cartesian expansion of a derivative of f(|x|):
/// coeff * x^mono * |x|^rpow * f^(order)(|x|).
struct RadialTerm {
    std::array<int, 3> mono{0, 0, 0};
    int rpow = 0;
    int order = 0;
    bool operator<(const RadialTerm& o) const {
        if (mono != o.mono) return mono < o.mono;
        if (rpow != o.rpow) return rpow < o.rpow;
        return order < o.order;
    }
};

using RadialExpansion = std::vector<std::pair<RadialTerm, double>>;

/// Exact expansion of \partial^alpha [f(|x|)] as a sum of RadialTerms; the
/// coefficients are integers produced by the product/chain rule. Cached.
const RadialExpansion& radial_expansion(const MultiIndex& alpha);

/// Evaluate \partial^alpha f(|x|) at x != 0 given the radial oracle.
double radial_cartesian_derivative(const MultiIndex& alpha, const Eigen::Vector3d& x,
                                   const RadialDerivOracle& f);

/// Pointwise derivative field: alpha, x -> \partial^alpha f(x).
struct DerivativeField {
    int dim = 3;
    std::function<double(const MultiIndex&, const Eigen::Vector3d&)> derivative;
};

/// Wrap a radial profile (through its derivative oracle) as a full
/// Cartesian derivative field.
DerivativeField radial_derivative_field(int dim, RadialDerivOracle oracle);

/// Polynomial field with exact derivatives of all orders.
DerivativeField polynomial_field(int dim, std::map<MultiIndex, double> coefficients);

/// Radial derivative oracles for common profiles, exact to all orders.
/// r^s e^{-c r}: d^m/dr^m via the Leibniz rule with falling factorials.
RadialDerivOracle power_exp_oracle(double s, double c);
/// c0 * e^{a r} (a may be negative).
RadialDerivOracle exp_oracle(double c0, double a);
/// Gaussian c0 * e^{-a r^2} via the Hermite-type recurrence.
RadialDerivOracle gaussian_oracle(double c0, double a);

}  // namespace hfreg
