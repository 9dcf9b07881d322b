#pragma once

#include <functional>
#include <vector>

namespace hfreg {

struct HpPoint {
    int dof = 0;
    double error = 0.0;
};

struct HpFit {
    double slope = 0.0;
    double intercept = 0.0;
    double correlation = 0.0;  // Pearson r of the fitted relation
};

struct HpResult {
    std::vector<HpPoint> table;
    HpFit fit_sqrt_dof;  // log(error) against sqrt(dof)
    HpFit fit_log_dof;   // log(error) against log(dof)
};

/// Best piecewise-polynomial L^2(B_R) approximation errors of a radial
/// profile on geometrically graded meshes with linearly increasing degree:
/// level L uses L+1 cells graded by sigma and degree 1 + degree_slope * j on
/// cell j counted from the origin.
HpResult hp_convergence_demo(const std::function<double(double)>& target, double radius, int dim,
                             double sigma, int levels, double degree_slope);

/// Control: uniform meshes with a fixed degree (algebraic convergence).
HpResult hp_uniform_control(const std::function<double(double)>& target, double radius, int dim,
                            int degree, int levels);

}  // namespace hfreg
