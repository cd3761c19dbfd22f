#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "wkbj/frobenius.hpp"
#include "wkbj/potential.hpp"

using namespace wkbj;
using Catch::Matchers::WithinAbs;

namespace {

// Order-by-order residual of y'' + Q y for y = z^f sum c_n z^n, computed by an
// independent convolution (no reuse of the recurrence solve): returns the
// coefficients of z^{n+f-2} for n = 0..N.
std::vector<cplx> ode_residual_series(const LaurentPotential& p, cplx f,
                                      const std::vector<cplx>& c, cplx K,
                                      const std::vector<cplx>& a_log, cplx f_log) {
    const int N = static_cast<int>(c.size()) - 1;
    std::vector<cplx> res(static_cast<size_t>(N) + 1, cplx{0.0, 0.0});
    for (int n = 0; n <= N; ++n) {
        cplx r = c[static_cast<size_t>(n)] * (static_cast<double>(n) + f) *
                 (static_cast<double>(n) + f - 1.0);
        for (int j = 0; j <= n; ++j)
            r += p.laurent_coefficient(j - 2) * c[static_cast<size_t>(n - j)];
        // contribution of K ln(z) y1: K (2 y1'/z - y1/z^2)
        if (K != cplx{0.0, 0.0}) {
            cplx gap = f_log - f; // nonnegative integer when K != 0
            int D = static_cast<int>(std::lround(gap.real()));
            int m = n - D;
            if (m >= 0 && m < static_cast<int>(a_log.size()))
                r += K * a_log[static_cast<size_t>(m)] *
                     (2.0 * (static_cast<double>(m) + f_log) - 1.0);
        }
        res[static_cast<size_t>(n)] = r;
    }
    return res;
}

// Five-point finite-difference second derivative along the real direction.
template <class F>
cplx fd_second(F&& f, cplx z, double h) {
    return (-f(z + 2.0 * h) + 16.0 * f(z + h) - 30.0 * f(z) + 16.0 * f(z - h) - f(z - 2.0 * h)) /
           (12.0 * h * h);
}

double residual_norm_fd(const LaurentPotential& p, const FrobeniusSolution& s, double r) {
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
        double th = 2.0 * std::numbers::pi * (k + 0.3) / 8.0;
        cplx z = r * cplx{std::cos(th), std::sin(th)};
        auto y = [&](cplx w) { return evaluate_frobenius(s, 1.0, 0.0, w, 0).y; };
        cplx resid = fd_second(y, z, 1e-3) + p.evaluate_unchecked(z) * y(z);
        worst = std::max(worst, std::abs(resid));
    }
    return worst;
}

} // namespace

TEST_CASE("indicial roots") {
    auto [a1, a2] = indicial_roots({0.0, 0.0});
    REQUIRE_THAT(std::abs(a1 - cplx{1.0, 0.0}), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(std::abs(a2), WithinAbs(0.0, 1e-15));

    auto [b1, b2] = indicial_roots({0.25, 0.0});
    REQUIRE_THAT(std::abs(b1 - cplx{0.5, 0.0}), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(std::abs(b2 - cplx{0.5, 0.0}), WithinAbs(0.0, 1e-15));

    auto [c1, c2] = indicial_roots({-2.0, 0.0});
    REQUIRE_THAT(std::abs(c1 - cplx{2.0, 0.0}), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(c2 - cplx{-1.0, 0.0}), WithinAbs(0.0, 1e-14));
}

TEST_CASE("indicial roots satisfy the quadratic on random inputs") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        cplx q2{u(rng), u(rng)};
        auto [f1, f2] = indicial_roots(q2);
        REQUIRE(std::abs(f1 * (f1 - 1.0) + q2) < 1e-12);
        REQUIRE(std::abs(f2 * (f2 - 1.0) + q2) < 1e-12);
        bool ordered = f1.real() > f2.real() + 1e-15 ||
                       (std::abs(f1.real() - f2.real()) <= 1e-15 && f1.imag() >= f2.imag());
        REQUIRE(ordered);
    }
}

TEST_CASE("rotation eigenvalues") {
    auto [l1, l2] = monodromy_eigenvalues({0.0, 0.0});
    REQUIRE_THAT(std::abs(l1 - cplx{1.0, 0.0}), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(l2 - cplx{1.0, 0.0}), WithinAbs(0.0, 1e-14));

    auto [m1, m2] = monodromy_eigenvalues({0.25, 0.0});
    REQUIRE_THAT(std::abs(m1 + cplx{1.0, 0.0}), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(std::abs(m2 + cplx{1.0, 0.0}), WithinAbs(0.0, 1e-12));

    auto [n1, n2] = monodromy_eigenvalues({-2.0, 0.0}); // f1 = 2
    REQUIRE_THAT(std::abs(n1 - cplx{1.0, 0.0}), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(std::abs(n2 - cplx{1.0, 0.0}), WithinAbs(0.0, 1e-12));
}

TEST_CASE("rotation eigenvalue identities on random inputs") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 1000; ++i) {
        cplx q2{u(rng), u(rng)};
        auto [l1, l2] = monodromy_eigenvalues(q2);
        REQUIRE(std::abs(l1 * l2 - cplx{1.0, 0.0}) < 1e-14);
        auto [f1, f2] = indicial_roots(q2);
        cplx twocos = 2.0 * std::cos(2.0 * std::numbers::pi * f1);
        REQUIRE(std::abs(l1 + l2 - twocos) < 1e-12 * std::max(1.0, std::abs(twocos)));
    }
}

TEST_CASE("series for an entire potential") {
    auto p = LaurentPotential::parse("1");
    auto s = build_series(p, 12);
    REQUIRE_THAT(std::abs(s.f1 - cplx{1.0, 0.0}), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(std::abs(s.f2), WithinAbs(0.0, 1e-14));
    REQUIRE(s.K == cplx{0.0, 0.0}); // resonance order 1 is empty for Q = 1
    REQUIRE_THAT(std::abs(s.a[1]), WithinAbs(0.0, 1e-15));
    // y1 = z - z^3/6 + ... so the coefficient of z^2 inside the series is -1/6
    REQUIRE_THAT(std::abs(s.a[2] + cplx{1.0 / 6.0, 0.0}), WithinAbs(0.0, 1e-14));

    auto res = ode_residual_series(p, s.f1, s.a, {0.0, 0.0}, {}, {0.0, 0.0});
    for (const auto& r : res) REQUIRE(std::abs(r) < 1e-12);
}

TEST_CASE("series for the budden potential") {
    auto p = LaurentPotential::budden(1.0);
    auto s = build_series(p, 24);
    // order-z^0 match of y = z + a1 z^2 in y'' + (1 + 1/z) y = 0: 2 a1 + 1 = 0
    REQUIRE_THAT(std::abs(s.a[1] + cplx{0.5, 0.0}), WithinAbs(0.0, 1e-14));
    REQUIRE(s.K != cplx{0.0, 0.0});
    REQUIRE(s.b[1] == cplx{0.0, 0.0}); // resonant-order gauge

    auto res_a = ode_residual_series(p, s.f1, s.a, {0.0, 0.0}, {}, {0.0, 0.0});
    for (const auto& r : res_a) REQUIRE(std::abs(r) < 1e-12);
    auto res_b = ode_residual_series(p, s.f2, s.b, s.K, s.a, s.f1);
    for (const auto& r : res_b) REQUIRE(std::abs(r) < 1e-12);
}

TEST_CASE("series for a pure inverse-square potential") {
    auto p = LaurentPotential::parse("-2*z^-2");
    auto s = build_series(p, 16);
    REQUIRE_THAT(std::abs(s.f1 - cplx{2.0, 0.0}), WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(std::abs(s.f2 + cplx{1.0, 0.0}), WithinAbs(0.0, 1e-13));
    REQUIRE(s.K == cplx{0.0, 0.0});
    for (size_t n = 1; n < s.a.size(); ++n) REQUIRE(std::abs(s.a[n]) < 1e-14);
    for (size_t n = 1; n < s.b.size(); ++n) REQUIRE(std::abs(s.b[n]) < 1e-14);

    // y2 = 1/z
    auto e = evaluate_frobenius(s, 0.0, 1.0, {2.0, 0.0}, 0);
    REQUIRE_THAT(std::abs(e.y - cplx{0.5, 0.0}), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(std::abs(e.dy + cplx{0.25, 0.0}), WithinAbs(0.0, 1e-12));
}

TEST_CASE("equal indices force the logarithm") {
    auto p = LaurentPotential::parse("0.25*z^-2 + 1");
    auto s = build_series(p, 24);
    REQUIRE_THAT(std::abs(s.f1 - s.f2), WithinAbs(0.0, 1e-13));
    REQUIRE(s.K == cplx{1.0, 0.0});
    auto res_a = ode_residual_series(p, s.f1, s.a, {0.0, 0.0}, {}, {0.0, 0.0});
    for (const auto& r : res_a) REQUIRE(std::abs(r) < 1e-12);
    auto res_b = ode_residual_series(p, s.f2, s.b, s.K, s.a, s.f1);
    for (const auto& r : res_b) REQUIRE(std::abs(r) < 1e-12);
}

TEST_CASE("non-integer index gap keeps the recurrences independent") {
    auto p = LaurentPotential::parse("-0.3*z^-2 + 1 + 0.5*z^-1");
    auto s = build_series(p, 24);
    REQUIRE(s.K == cplx{0.0, 0.0});
    auto res_b = ode_residual_series(p, s.f2, s.b, {0.0, 0.0}, {}, {0.0, 0.0});
    for (const auto& r : res_b) REQUIRE(std::abs(r) < 1e-12);
}

TEST_CASE("series construction rejects irregular singular points") {
    REQUIRE_THROWS_AS(build_series(LaurentPotential::parse("z^-3"), 8),
                      not_regular_singular_error);
    REQUIRE_THROWS_AS(build_series(LaurentPotential::budden(1.0), 0), argument_error);
}

TEST_CASE("truncated-series residual decays at the expected order") {
    auto p = LaurentPotential::budden(1.0);
    const int N = 6;
    auto s = build_series(p, N);
    s.tail_rtol = 1.0; // deliberately coarse truncation under study here
    double r_small = residual_norm_fd(p, s, 0.3);
    double r_large = residual_norm_fd(p, s, 0.6);
    // residual ~ r^{N + Re f1 - 1} = r^6, so doubling r scales it by ~2^6
    double ratio = r_large / r_small;
    REQUIRE(r_small < 1e-5);
    REQUIRE(ratio > std::pow(2.0, N - 2));
    REQUIRE(ratio < std::pow(2.0, N + 3));

    // higher truncation order pushes the residual down to finite-difference noise
    auto s2 = build_series(p, 24);
    REQUIRE(residual_norm_fd(p, s2, 0.6) < 1e-8);
}

TEST_CASE("frobenius evaluation") {
    auto p = LaurentPotential::parse("-2*z^-2");
    auto s = build_series(p, 8);
    auto e = evaluate_frobenius(s, 1.0, 0.0, {2.0, 0.0}, 0);
    REQUIRE_THAT(std::abs(e.y - cplx{4.0, 0.0}), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(std::abs(e.dy - cplx{4.0, 0.0}), WithinAbs(0.0, 1e-12));

    auto z = evaluate_frobenius(s, 0.0, 0.0, {1.0, 1.0}, 0);
    REQUIRE(z.y == cplx{0.0, 0.0});
    REQUIRE(z.dy == cplx{0.0, 0.0});

    REQUIRE_THROWS_AS(evaluate_frobenius(s, 1.0, 0.0, {0.0, 0.0}, 0), argument_error);

    // on the default cut (negative imaginary axis) the sheet is ambiguous
    REQUIRE_THROWS_AS(evaluate_frobenius(s, 1.0, 0.0, {0.0, -1.5}, 0), argument_error);
    // the polar form takes the unwrapped argument directly
    auto pol = evaluate_frobenius_polar(s, 1.0, 0.0, 1.5, -std::numbers::pi / 2.0);
    REQUIRE(std::isfinite(pol.y.real()));
}

TEST_CASE("budden series matches the small-z expansion") {
    auto p = LaurentPotential::budden(1.0);
    auto s = build_series(p, 32);
    cplx z{0.05, 0.0};
    auto e = evaluate_frobenius(s, 1.0, 0.0, z, 0);
    // y1 = z (1 - z/2 + O(z^2)), with the O(z^2) term bounded by ~|z|^2/10
    cplx lead = z * (1.0 - z / 2.0);
    REQUIRE(std::abs(e.y - lead) < 0.2 * std::abs(z) * std::abs(z) * std::abs(z));
}

TEST_CASE("sheet index advances the argument by full turns") {
    auto p = LaurentPotential::budden(1.0);
    auto s = build_series(p, 48);
    cplx z{0.4, 0.1};

    // pure y1: one extra turn multiplies by e^{2 pi i f1} = 1 for f1 = 1
    auto e0 = evaluate_frobenius(s, 1.0, 0.0, z, 0);
    auto e1 = evaluate_frobenius(s, 1.0, 0.0, z, 1);
    REQUIRE(std::abs(e0.y - e1.y) < 1e-12);

    // y2 picks up the log monodromy: y2 -> y2 + 2 pi i K y1
    auto f0 = evaluate_frobenius(s, 0.0, 1.0, z, 0);
    auto f1_ = evaluate_frobenius(s, 0.0, 1.0, z, 1);
    cplx expected = f0.y + cplx{0.0, 2.0 * std::numbers::pi} * s.K * e0.y;
    REQUIRE(std::abs(f1_.y - expected) < 1e-12);
}

TEST_CASE("evaluation rejects points the truncation cannot reach") {
    auto p = LaurentPotential::budden(1.0);
    auto s = build_series(p, 3);
    REQUIRE_THROWS_AS(evaluate_frobenius(s, 1.0, 0.0, {40.0, 0.0}, 0), truncation_error);
}
