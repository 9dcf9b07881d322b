#include "hfreg/radial_calculus.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace hfreg {

namespace {

using TermMap = std::map<RadialTerm, double>;

// d/dx_i of coeff * x^a * r^e * f^(m)(r), with dr/dx_i = x_i / r:
//   a_i coeff x^{a - e_i} r^e f^(m)
// + e   coeff x^{a + e_i} r^{e-2} f^(m)
// +     coeff x^{a + e_i} r^{e-1} f^(m+1)
TermMap differentiate(const TermMap& in, int axis) {
    TermMap out;
    auto add = [&out](RadialTerm t, double c) {
        if (c == 0.0) return;
        auto [it, inserted] = out.emplace(t, c);
        if (!inserted) it->second += c;
    };
    for (const auto& [t, c] : in) {
        const auto ax = static_cast<std::size_t>(axis);
        if (t.mono[ax] > 0) {
            RadialTerm dt = t;
            dt.mono[ax] -= 1;
            add(dt, c * t.mono[ax]);
        }
        if (t.rpow != 0) {
            RadialTerm dt = t;
            dt.mono[ax] += 1;
            dt.rpow -= 2;
            add(dt, c * t.rpow);
        }
        RadialTerm dt = t;
        dt.mono[ax] += 1;
        dt.rpow -= 1;
        dt.order += 1;
        add(dt, c);
    }
    return out;
}

}  // namespace

const RadialExpansion& radial_expansion(const MultiIndex& alpha) {
    static std::map<MultiIndex, RadialExpansion> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;

    TermMap terms{{RadialTerm{}, 1.0}};
    for (int axis = 0; axis < alpha.dim(); ++axis)
        for (int rep = 0; rep < alpha[axis]; ++rep) terms = differentiate(terms, axis);

    RadialExpansion exp(terms.begin(), terms.end());
    return cache.emplace(alpha, std::move(exp)).first->second;
}

double radial_cartesian_derivative(const MultiIndex& alpha, const Eigen::Vector3d& x,
                                   const RadialDerivOracle& f) {
    const double r = x.norm();
    if (r <= 0.0) throw std::domain_error("radial_cartesian_derivative: x must be away from the center");
    double value = 0.0;
    // derivative orders present range over [0, |alpha|]; memoize per call
    std::array<double, 32> fcache;
    std::array<bool, 32> have{};
    auto fm = [&](int m) {
        if (m < 32) {
            if (!have[static_cast<std::size_t>(m)]) {
                fcache[static_cast<std::size_t>(m)] = f(m, r);
                have[static_cast<std::size_t>(m)] = true;
            }
            return fcache[static_cast<std::size_t>(m)];
        }
        return f(m, r);
    };
    for (const auto& [t, c] : radial_expansion(alpha)) {
        double mono = 1.0;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < t.mono[static_cast<std::size_t>(i)]; ++k) mono *= x(i);
        value += c * mono * std::pow(r, t.rpow) * fm(t.order);
    }
    return value;
}

DerivativeField radial_derivative_field(int dim, RadialDerivOracle oracle) {
    DerivativeField field;
    field.dim = dim;
    field.derivative = [oracle = std::move(oracle)](const MultiIndex& alpha, const Eigen::Vector3d& x) {
        return radial_cartesian_derivative(alpha, x, oracle);
    };
    return field;
}

DerivativeField polynomial_field(int dim, std::map<MultiIndex, double> coefficients) {
    DerivativeField field;
    field.dim = dim;
    field.derivative = [coeffs = std::move(coefficients)](const MultiIndex& alpha,
                                                          const Eigen::Vector3d& x) {
        double value = 0.0;
        for (const auto& [beta, c] : coeffs) {
            if (!alpha.leq(beta)) continue;
            const MultiIndex rem = beta - alpha;
            double term = c;
            // beta! / rem! falling factorial from differentiating x^beta
            for (int i = 0; i < beta.dim(); ++i)
                for (int k = rem[i] + 1; k <= beta[i]; ++k) term *= k;
            for (int i = 0; i < beta.dim(); ++i)
                for (int k = 0; k < rem[i]; ++k) term *= x(i);
            value += term;
        }
        return value;
    };
    return field;
}

RadialDerivOracle power_exp_oracle(double s, double c) {
    return [s, c](int m, double r) {
        // d^m/dr^m (r^s e^{-c r}) = sum_j C(m,j) s^(j)_falling r^{s-j} (-c)^{m-j} e^{-c r}
        double sum = 0.0;
        for (int j = 0; j <= m; ++j) {
            double falling = 1.0;
            for (int i = 0; i < j; ++i) falling *= (s - i);
            sum += static_cast<double>(binom(static_cast<std::int64_t>(m), j)) * falling *
                   std::pow(r, s - j) * std::pow(-c, m - j);
        }
        return sum * std::exp(-c * r);
    };
}

RadialDerivOracle exp_oracle(double c0, double a) {
    return [c0, a](int m, double r) { return c0 * std::pow(a, m) * std::exp(a * r); };
}

RadialDerivOracle gaussian_oracle(double c0, double a) {
    return [c0, a](int m, double r) {
        // g = e^{-a r^2}: g^(m+1) = -2a (r g^(m) + m g^(m-1))
        double prev = 0.0;
        double cur = std::exp(-a * r * r);
        for (int k = 0; k < m; ++k) {
            const double next = -2.0 * a * (r * cur + k * prev);
            prev = cur;
            cur = next;
        }
        return c0 * cur;
    };
}

}  // namespace hfreg
