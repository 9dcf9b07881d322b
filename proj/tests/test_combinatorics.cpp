#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hfreg/combinatorics.hpp"

using namespace hfreg;

TEST_CASE("multi-index basics") {
    MultiIndex a{2, 1};
    CHECK(a.order() == 3);
    CHECK(a.dim() == 2);
    MultiIndex b{1, 1};
    CHECK(b.leq(a));
    CHECK(!a.leq(b));
    CHECK((a + b).order() == 5);
    CHECK((a - b) == MultiIndex{1, 0});
    CHECK(MultiIndex({3, 2, 1}).factorial() == 12);
    CHECK_THROWS_AS(MultiIndex({1, 1}) - MultiIndex({2, 0}), std::domain_error);
    CHECK_THROWS_AS(MultiIndex({-1, 0}), std::domain_error);
}

TEST_CASE("multi-index binomial, hand-checked values") {
    CHECK(binom(MultiIndex{2, 1}, MultiIndex{1, 1}) == 2);
    CHECK(binom(MultiIndex{3, 2, 1}, MultiIndex{0, 0, 0}) == 1);
    CHECK(binom(MultiIndex{4, 4}, MultiIndex{4, 4}) == 1);
    CHECK_THROWS_AS(binom(MultiIndex{1, 0}, MultiIndex{0, 2}), std::domain_error);
    CHECK_THROWS_AS(binom(MultiIndex{1, 0}, MultiIndex{0, 0, 0}), std::domain_error);
}

TEST_CASE("Kato sum identity, hand-checked values") {
    CHECK(kato_sum(MultiIndex{2, 1}, 1) == 3);
    CHECK(kato_sum(MultiIndex{1, 1, 1}, 2) == 3);
    CHECK(kato_sum(MultiIndex{5, 3, 2}, 0) == 1);
    CHECK_THROWS_AS(kato_sum(MultiIndex{1, 1}, 3), std::domain_error);
    CHECK_THROWS_AS(kato_sum(MultiIndex{1, 1}, -1), std::domain_error);
}

TEST_CASE("Kato sum equals the scalar binomial for all |alpha| <= 8, d <= 3") {
    for (int d : {2, 3}) {
        for (int order = 0; order <= 8; ++order) {
            for (const MultiIndex& alpha : multi_indices_of_order(d, order)) {
                for (int n = 0; n <= order; ++n)
                    REQUIRE(kato_sum(alpha, n) == binom(static_cast<std::int64_t>(order), n));
            }
        }
    }
}

TEST_CASE("binomial sum over all beta <= alpha is 2^|alpha|") {
    for (int d : {2, 3}) {
        for (int order = 0; order <= 8; ++order) {
            for (const MultiIndex& alpha : multi_indices_of_order(d, order)) {
                std::int64_t total = 0;
                for (int n = 0; n <= order; ++n) total += kato_sum(alpha, n);
                REQUIRE(total == (std::int64_t{1} << order));
            }
        }
    }
}

TEST_CASE("Stirling bounds bracket the exact factorial") {
    auto [lo1, hi1] = stirling_bounds(1);
    CHECK(lo1 == doctest::Approx(0.9221370088).epsilon(1e-9));
    CHECK(hi1 == doctest::Approx(1.0).epsilon(1e-14));  // e * sqrt(1) * (1/e)^1
    for (int n = 1; n <= 20; ++n) {
        auto [lo, hi] = stirling_bounds(n);
        const double exact = static_cast<double>(factorial_exact(n));
        CHECK(lo <= exact);
        CHECK(exact <= hi);
    }
    auto [lo5, hi5] = stirling_bounds(5);
    CHECK(lo5 < 120.0);
    CHECK(hi5 > 120.0);
    auto [lo2, hi2] = stirling_bounds(2);
    CHECK(lo2 < 2.0);
    CHECK(hi2 > 2.0);
    CHECK_THROWS_AS(stirling_bounds(0), std::domain_error);
    CHECK_THROWS_AS(stirling_bounds(200), std::overflow_error);
}

TEST_CASE("Stirling log bounds bracket lgamma up to 1e5") {
    for (std::int64_t n = 1; n <= 100000; n = (n < 100 ? n + 1 : n * 7 / 5)) {
        auto [lo, hi] = stirling_log_bounds(n);
        const double lg = std::lgamma(static_cast<double>(n) + 1.0);
        REQUIRE(lo <= lg * (1 + 1e-14) + 1e-12);
        REQUIRE(lg <= hi * (1 + 1e-14) + 1e-12);
    }
}

TEST_CASE("Riemann sqrt sum: values and the pi bound") {
    CHECK(riemann_sqrt_sum(2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(riemann_sqrt_sum(4) ==
          doctest::Approx(2.0 / std::sqrt(3.0) + 0.5).epsilon(1e-14));
    CHECK(riemann_sqrt_sum(10000) < std::numbers::pi);
    CHECK_THROWS_AS(riemann_sqrt_sum(1), std::domain_error);
}

TEST_CASE("Riemann sqrt sum is monotone increasing and bounded by pi") {
    double prev = 0.0;
    for (std::int64_t j = 2; j <= 2000; ++j) {
        const double s = riemann_sqrt_sum(j);
        REQUIRE(s > prev);
        REQUIRE(s < std::numbers::pi);
        prev = s;
    }
}

TEST_CASE("compensated summation stays near the long-double reference") {
    const std::int64_t j = 10000;
    long double ref = 0.0L;
    for (std::int64_t i = 1; i < j; ++i)
        ref += 1.0L / std::sqrt(static_cast<long double>(i) * static_cast<long double>(j - i));
    CHECK(std::abs(riemann_sqrt_sum(j) - static_cast<double>(ref)) < 1e-12);
}

TEST_CASE("Fibonacci sequence: convention and the golden-ratio bound") {
    FibSequence fib;
    CHECK(fib.value(0) == 1);
    CHECK(fib.value(1) == 1);
    CHECK(fib.value(2) == 2);
    CHECK(fib.value(10) == 89);
    for (int i = 2; i <= FibSequence::max_exact_index; ++i)
        REQUIRE(fib.value(i) == fib.value(i - 1) + fib.value(i - 2));
    for (int i = 0; i <= 90; ++i) REQUIRE(FibSequence::below_golden_power(i));
    CHECK_THROWS_AS(fib.value(92), std::overflow_error);
}

TEST_CASE("fib_majorant: homogeneous and hand-checked cases") {
    std::vector<double> zero{0.0, 0.0, 0.0};
    FibSequence fib;
    // homogeneous recursion: F_{j-1} a + F_{j-2} b with j = 4
    CHECK(fib_majorant(zero, 2.0, 3.0) ==
          doctest::Approx(2.0 * fib.value(3) + 3.0 * fib.value(2)));
    std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK(fib_majorant(ones, 0.0, 0.0) == doctest::Approx(4.0));
    CHECK_THROWS_AS(fib_majorant(ones, -1.0, 0.0), std::domain_error);
}

namespace {

// worst case of s_i <= t_i + s_{i+1} + s_{i+2} by backward iteration
double backward_worst_case(const std::vector<double>& t, double s_jm1, double s_j) {
    std::vector<double> s(t.size() + 2);
    s[t.size() + 1] = s_j;
    s[t.size()] = s_jm1;
    for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i)
        s[static_cast<std::size_t>(i)] =
            t[static_cast<std::size_t>(i)] + s[static_cast<std::size_t>(i) + 1] + s[static_cast<std::size_t>(i) + 2];
    return s[0];
}

}  // namespace

TEST_CASE("fib_majorant equals the brute-force worst case") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int len = 1 + static_cast<int>(rng() % 11);  // j <= 12
        std::vector<double> t(static_cast<std::size_t>(len));
        for (double& v : t) v = dist(rng);
        const double a = dist(rng), b = dist(rng);
        const double majorant = fib_majorant(t, a, b);
        const double brute = backward_worst_case(t, a, b);
        REQUIRE(majorant == doctest::Approx(brute).epsilon(1e-12));
        // any admissible sequence (scaled-down worst case) stays below
        REQUIRE(0.9 * brute <= majorant);
    }
}
