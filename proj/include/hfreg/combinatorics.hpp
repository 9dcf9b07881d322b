#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace hfreg {

/// Multi-index in dimension d = 2 or 3: nonnegative integer exponents of a
/// mixed partial derivative. Arithmetic is exact; overflow throws.
class MultiIndex {
public:
    MultiIndex(std::initializer_list<int> entries);
    explicit MultiIndex(std::span<const int> entries);
    static MultiIndex zero(int dim);
    static MultiIndex unit(int dim, int axis);

    int dim() const { return dim_; }
    int order() const;
    int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }

    bool operator==(const MultiIndex& o) const;
    bool operator!=(const MultiIndex& o) const { return !(*this == o); }
    /// componentwise partial order (the beta <= alpha of the Leibniz sums)
    bool leq(const MultiIndex& o) const;
    bool operator<(const MultiIndex& o) const;  // lexicographic; for map keys

    MultiIndex operator+(const MultiIndex& o) const;
    MultiIndex operator-(const MultiIndex& o) const;  // requires o.leq(*this)
    MultiIndex plus_unit(int axis) const;

    /// alpha! = alpha_1! ... alpha_d!
    std::int64_t factorial() const;

private:
    MultiIndex() = default;
    std::array<int, 3> e_{0, 0, 0};
    int dim_ = 3;
};

/// All multi-indices of a given total order, lexicographically sorted.
std::vector<MultiIndex> multi_indices_of_order(int dim, int order);

/// Exact scalar binomial coefficient; throws std::overflow_error beyond int64.
std::int64_t binom(std::int64_t n, std::int64_t k);

/// Multi-index binomial alpha! / (beta! (alpha-beta)!), exact.
/// Requires beta <= alpha componentwise and equal dimensions.
std::int64_t binom(const MultiIndex& alpha, const MultiIndex& beta);

/// Sum of binom(alpha, beta) over beta <= alpha with |beta| = n.
/// Equals binom(|alpha|, n) exactly.
std::int64_t kato_sum(const MultiIndex& alpha, int n);

/// Exact n! for n <= 20; throws std::overflow_error beyond.
std::int64_t factorial_exact(int n);

/// Stirling bracket sqrt(2 pi n) (n/e)^n <= n! <= e sqrt(n) (n/e)^n.
/// Representable as doubles up to n = 170; throws std::overflow_error beyond
/// (use stirling_log_bounds there).
std::pair<double, double> stirling_bounds(int n);

/// Same bracket in log space, valid for any n >= 1.
std::pair<double, double> stirling_log_bounds(std::int64_t n);

/// sum_{i=1}^{j-1} 1 / sqrt(i (j - i)); compensated summation, <= pi for all j.
double riemann_sqrt_sum(std::int64_t j);

/// Fibonacci numbers with the F_0 = F_1 = 1 convention, exact in int64.
/// value(i) is defined for i <= max_exact_index (F_92 would overflow).
class FibSequence {
public:
    static constexpr int max_exact_index = 91;

    std::int64_t value(int i);
    const std::vector<std::int64_t>& values() const { return values_; }

    /// Exact check F_i <= phi^i with phi = (1 + sqrt(5)) / 2, done in integer
    /// arithmetic through the Lucas-number identity phi^i = (L_i + G_i sqrt 5)/2,
    /// where G is the standard Fibonacci sequence. Valid for i <= 90.
    static bool below_golden_power(int i);

private:
    std::vector<std::int64_t> values_{1, 1};
};

/// Worst-case start value of a sequence obeying s_i <= t_i + s_{i+1} + s_{i+2}:
/// returns sum_i F_i t_i + F_{j-1} s_jm1 + F_{j-2} s_j with j = t.size() + 1.
/// All inputs must be nonnegative.
double fib_majorant(std::span<const double> t, double s_jm1, double s_j);

}  // namespace hfreg
