#include "hfreg/combinatorics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hfreg {

namespace {

void check_dim(int d) {
    if (d != 2 && d != 3) throw std::domain_error("MultiIndex: dimension must be 2 or 3");
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in exact combinatorics");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in exact combinatorics");
    return r;
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::span<const int>(entries.begin(), entries.size())) {}

MultiIndex::MultiIndex(std::span<const int> entries) {
    check_dim(static_cast<int>(entries.size()));
    dim_ = static_cast<int>(entries.size());
    for (int i = 0; i < dim_; ++i) {
        if (entries[static_cast<std::size_t>(i)] < 0)
            throw std::domain_error("MultiIndex: entries must be nonnegative");
        e_[static_cast<std::size_t>(i)] = entries[static_cast<std::size_t>(i)];
    }
}

MultiIndex MultiIndex::zero(int dim) {
    check_dim(dim);
    MultiIndex a;
    a.dim_ = dim;
    return a;
}

MultiIndex MultiIndex::unit(int dim, int axis) {
    check_dim(dim);
    if (axis < 0 || axis >= dim) throw std::domain_error("MultiIndex::unit: axis out of range");
    MultiIndex a;
    a.dim_ = dim;
    a.e_[static_cast<std::size_t>(axis)] = 1;
    return a;
}

int MultiIndex::order() const { return e_[0] + e_[1] + e_[2]; }

bool MultiIndex::operator==(const MultiIndex& o) const { return dim_ == o.dim_ && e_ == o.e_; }

bool MultiIndex::leq(const MultiIndex& o) const {
    if (dim_ != o.dim_) throw std::domain_error("MultiIndex: dimension mismatch");
    for (int i = 0; i < dim_; ++i)
        if (e_[static_cast<std::size_t>(i)] > o.e_[static_cast<std::size_t>(i)]) return false;
    return true;
}

bool MultiIndex::operator<(const MultiIndex& o) const {
    if (dim_ != o.dim_) return dim_ < o.dim_;
    return e_ < o.e_;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
    if (dim_ != o.dim_) throw std::domain_error("MultiIndex: dimension mismatch");
    MultiIndex r = *this;
    for (int i = 0; i < dim_; ++i) r.e_[static_cast<std::size_t>(i)] += o.e_[static_cast<std::size_t>(i)];
    return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
    if (dim_ != o.dim_) throw std::domain_error("MultiIndex: dimension mismatch");
    if (!o.leq(*this)) throw std::domain_error("MultiIndex: subtraction would be negative");
    MultiIndex r = *this;
    for (int i = 0; i < dim_; ++i) r.e_[static_cast<std::size_t>(i)] -= o.e_[static_cast<std::size_t>(i)];
    return r;
}

MultiIndex MultiIndex::plus_unit(int axis) const {
    if (axis < 0 || axis >= dim_) throw std::domain_error("MultiIndex::plus_unit: axis out of range");
    MultiIndex r = *this;
    r.e_[static_cast<std::size_t>(axis)] += 1;
    return r;
}

std::int64_t MultiIndex::factorial() const {
    std::int64_t f = 1;
    for (int i = 0; i < dim_; ++i) f = checked_mul(f, factorial_exact(e_[static_cast<std::size_t>(i)]));
    return f;
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
    check_dim(dim);
    if (order < 0) throw std::domain_error("multi_indices_of_order: order must be nonnegative");
    std::vector<MultiIndex> out;
    if (dim == 2) {
        for (int a = order; a >= 0; --a) out.push_back(MultiIndex{a, order - a});
    } else {
        for (int a = order; a >= 0; --a)
            for (int b = order - a; b >= 0; --b) out.push_back(MultiIndex{a, b, order - a - b});
    }
    return out;
}

std::int64_t factorial_exact(int n) {
    if (n < 0) throw std::domain_error("factorial_exact: negative argument");
    if (n > 20) throw std::overflow_error("factorial_exact: n! exceeds int64 for n > 20");
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::int64_t binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) throw std::domain_error("binom: requires 0 <= k <= n");
    if (k > n - k) k = n - k;
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < k; ++i) {
        // multiply before divide keeps the intermediate an exact integer:
        // r holds binom(n - k + i, i) so r * (n - k + i + 1) is divisible by i + 1
        r = checked_mul(r, n - k + i + 1);
        r /= (i + 1);
    }
    return r;
}

std::int64_t binom(const MultiIndex& alpha, const MultiIndex& beta) {
    if (alpha.dim() != beta.dim()) throw std::domain_error("binom: dimension mismatch");
    if (!beta.leq(alpha)) throw std::domain_error("binom: requires beta <= alpha componentwise");
    std::int64_t r = 1;
    for (int i = 0; i < alpha.dim(); ++i) r = checked_mul(r, binom(alpha[i], beta[i]));
    return r;
}

std::int64_t kato_sum(const MultiIndex& alpha, int n) {
    if (n < 0 || n > alpha.order()) throw std::domain_error("kato_sum: requires 0 <= n <= |alpha|");
    std::int64_t sum = 0;
    for (const MultiIndex& beta : multi_indices_of_order(alpha.dim(), n)) {
        if (beta.leq(alpha)) sum = checked_add(sum, binom(alpha, beta));
    }
    return sum;
}

std::pair<double, double> stirling_log_bounds(std::int64_t n) {
    if (n < 1) throw std::domain_error("stirling bounds require n >= 1");
    const double nd = static_cast<double>(n);
    const double core = nd * (std::log(nd) - 1.0);
    const double lo = 0.5 * std::log(2.0 * std::numbers::pi * nd) + core;
    const double hi = 1.0 + 0.5 * std::log(nd) + core;
    return {lo, hi};
}

std::pair<double, double> stirling_bounds(int n) {
    if (n < 1) throw std::domain_error("stirling_bounds: requires n >= 1");
    if (n > 170) throw std::overflow_error("stirling_bounds: not representable as double beyond n = 170");
    auto [lo, hi] = stirling_log_bounds(n);
    return {std::exp(lo), std::exp(hi)};
}

double riemann_sqrt_sum(std::int64_t j) {
    if (j < 2) throw std::domain_error("riemann_sqrt_sum: requires j >= 2");
    // By i <-> j-i symmetry only half the terms are computed. Terms are
    // buffered so the sqrt evaluation vectorizes; the buffer is folded with
    // Kahan compensation in a fixed order.
    const std::int64_t half = (j - 1) / 2;
    double sum = 0.0, comp = 0.0;
    auto kahan_add = [&](double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    constexpr std::int64_t block = 256;
    double buf[block];
    for (std::int64_t start = 1; start <= half; start += block) {
        const std::int64_t end = std::min(half, start + block - 1);
        for (std::int64_t i = start; i <= end; ++i)
            buf[i - start] = 1.0 / std::sqrt(static_cast<double>(i) * static_cast<double>(j - i));
        for (std::int64_t i = start; i <= end; ++i) kahan_add(2.0 * buf[i - start]);
    }
    if (j % 2 == 0) kahan_add(2.0 / static_cast<double>(j));
    return sum;
}

std::int64_t FibSequence::value(int i) {
    if (i < 0) throw std::domain_error("FibSequence: negative index");
    if (i > max_exact_index) throw std::overflow_error("FibSequence: exact values end at F_91");
    while (static_cast<int>(values_.size()) <= i)
        values_.push_back(values_[values_.size() - 1] + values_[values_.size() - 2]);
    return values_[static_cast<std::size_t>(i)];
}

bool FibSequence::below_golden_power(int i) {
    if (i < 0) throw std::domain_error("FibSequence: negative index");
    if (i > 90) throw std::overflow_error("below_golden_power: exact comparison limited to i <= 90");
    // With G the standard Fibonacci numbers (G_0 = 0) and L the Lucas numbers,
    // phi^i = (L_i + G_i sqrt 5) / 2, and our F_i = G_{i+1}. The claim
    // F_i <= phi^i becomes 2 G_{i+1} - L_i <= G_i sqrt 5, settled by squaring.
    __int128 g_prev = 1, g = 0;   // G_{-1}, G_0
    __int128 l_prev = -1, l = 2;  // L_{-1}, L_0
    for (int m = 0; m < i; ++m) {
        const __int128 gn = g_prev + g;
        g_prev = g;
        g = gn;
        const __int128 ln = l_prev + l;
        l_prev = l;
        l = ln;
    }
    const __int128 lhs = 2 * (g_prev + g) - l;  // 2 G_{i+1} - L_i
    if (lhs <= 0) return true;
    return lhs * lhs <= 5 * g * g;
}

double fib_majorant(std::span<const double> t, double s_jm1, double s_j) {
    if (t.empty()) throw std::domain_error("fib_majorant: needs at least one interior term");
    if (s_jm1 < 0.0 || s_j < 0.0) throw std::domain_error("fib_majorant: negative terminal value");
    FibSequence fib;
    const int j = static_cast<int>(t.size()) + 1;
    double sum = 0.0;
    for (int i = 0; i <= j - 2; ++i) {
        if (t[static_cast<std::size_t>(i)] < 0.0) throw std::domain_error("fib_majorant: negative term");
        sum += static_cast<double>(fib.value(i)) * t[static_cast<std::size_t>(i)];
    }
    sum += static_cast<double>(fib.value(j - 1)) * s_jm1;
    sum += static_cast<double>(fib.value(j - 2)) * s_j;
    return sum;
}

}  // namespace hfreg
