#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "wkbj/errors.hpp"
#include "wkbj/potential.hpp"

namespace wkbj {

// Roots of f(f-1) + q2 = 0, ordered so Re f1 >= Re f2 (principal sqrt breaks
// the tie toward Im f1 >= Im f2).
inline std::pair<cplx, cplx> indicial_roots(cplx q2) {
    cplx disc = std::sqrt(cplx{1.0, 0.0} - 4.0 * q2);
    return {(1.0 + disc) / 2.0, (1.0 - disc) / 2.0};
}

// Eigenvalues (e^{2 pi i f1}, e^{-2 pi i f1}) of the full-turn rotation
// operator implied by the index f1; their product is 1.
inline std::pair<cplx, cplx> monodromy_eigenvalues(cplx q2) {
    auto [f1, f2] = indicial_roots(q2);
    const cplx ipi2{0.0, 2.0 * std::numbers::pi};
    cplx l1 = std::exp(ipi2 * f1);
    return {l1, 1.0 / l1};
}

// General solution data about the regular singular point at the origin:
//   y1 = z^{f1} sum a_n z^n,
//   y2 = z^{f2} sum b_n z^n + K ln(z) y1,     a0 = b0 = 1.
struct FrobeniusSolution {
    cplx f1{}, f2{};
    std::vector<cplx> a, b;
    cplx K{0.0, 0.0};
    int truncation_order = 0;
    double convergence_radius = std::numeric_limits<double>::infinity();
    cplx q_minus_2{};
    double tail_rtol = 1e-6; // evaluation refuses points whose tail estimate exceeds this
};

// Builds the coefficient recurrences by matching powers of z^{n+f-2} in
// y'' + Q y = 0. With I(x) = x(x-1) + Q_{-2} = (x - f1)(x - f2):
//
//   a_n I(n+f1) + sum_{j=1..n} Q_{j-2} a_{n-j} = 0,
//   b_m I(m+f2) + sum_{j=1..m} Q_{j-2} b_{m-j} + K (2(m-D) + 2f1 - 1) a_{m-D} = 0,
//
// where D = f1 - f2 and the K term enters only for m >= D. Three cases:
// D not a nonnegative integer (K = 0), D = 0 (K free and nonzero; fixed to 1),
// D a positive integer (K fixed at the resonant order m = D; b_D gauged to 0).
inline FrobeniusSolution build_series(const LaurentPotential& p, int N) {
    if (N < 1) throw argument_error("frobenius: truncation order must be >= 1");
    if (p.min_exponent() < -2)
        throw not_regular_singular_error(
            "pole order of Q at the origin exceeds 2; origin is not a regular singular point");

    FrobeniusSolution s;
    s.q_minus_2 = p.laurent_coefficient(-2);
    auto [f1, f2] = indicial_roots(s.q_minus_2);
    s.f1 = f1;
    s.f2 = f2;
    s.truncation_order = N;
    s.convergence_radius = std::numeric_limits<double>::infinity();

    const cplx delta = f1 - f2;
    const double dre = delta.real();
    const bool integer_gap = std::abs(delta.imag()) < 1e-12 &&
                             std::abs(dre - std::round(dre)) < 1e-12 && std::round(dre) >= 0.0;
    const int D = integer_gap ? static_cast<int>(std::round(dre)) : -1;

    auto qc = [&](int k) { return p.laurent_coefficient(k); };

    s.a.assign(static_cast<size_t>(N) + 1, cplx{0.0, 0.0});
    s.a[0] = cplx{1.0, 0.0};
    for (int n = 1; n <= N; ++n) {
        cplx rhs{0.0, 0.0};
        for (int j = 1; j <= n; ++j) rhs += qc(j - 2) * s.a[static_cast<size_t>(n - j)];
        // I(n + f1) = n (n + delta), never zero for n >= 1
        s.a[static_cast<size_t>(n)] = -rhs / (static_cast<double>(n) * (static_cast<double>(n) + delta));
    }

    s.b.assign(static_cast<size_t>(N) + 1, cplx{0.0, 0.0});
    s.b[0] = cplx{1.0, 0.0};

    auto log_weight = [&](int m) {
        // coefficient of K a_{m-D} coming from 2 y1'/z - y1/z^2
        return 2.0 * (static_cast<double>(m - D) + f1) - 1.0;
    };

    if (!integer_gap) {
        s.K = cplx{0.0, 0.0};
        for (int m = 1; m <= N; ++m) {
            cplx rhs{0.0, 0.0};
            for (int j = 1; j <= m; ++j) rhs += qc(j - 2) * s.b[static_cast<size_t>(m - j)];
            s.b[static_cast<size_t>(m)] = -rhs / (static_cast<double>(m) * (static_cast<double>(m) - delta));
        }
    } else if (D == 0) {
        // Equal indices: a logarithm is mandatory; K is a normalization.
        s.K = cplx{1.0, 0.0};
        for (int m = 1; m <= N; ++m) {
            cplx rhs{0.0, 0.0};
            for (int j = 1; j <= m; ++j) rhs += qc(j - 2) * s.b[static_cast<size_t>(m - j)];
            rhs += s.K * log_weight(m) * s.a[static_cast<size_t>(m)];
            s.b[static_cast<size_t>(m)] = -rhs / (static_cast<double>(m) * static_cast<double>(m));
        }
    } else {
        for (int m = 1; m < D && m <= N; ++m) {
            cplx rhs{0.0, 0.0};
            for (int j = 1; j <= m; ++j) rhs += qc(j - 2) * s.b[static_cast<size_t>(m - j)];
            s.b[static_cast<size_t>(m)] = -rhs / (static_cast<double>(m) * (static_cast<double>(m) - static_cast<double>(D)));
        }
        if (D <= N) {
            // Resonant order: the b_D equation instead determines K; the
            // leftover freedom in b_D is the y1 admixture, gauged to zero.
            cplx rhs{0.0, 0.0};
            for (int j = 1; j <= D; ++j) rhs += qc(j - 2) * s.b[static_cast<size_t>(D - j)];
            s.K = -rhs / (log_weight(D) * s.a[0]); // log_weight(D) = 2 f1 - 1 = D != 0
            s.b[static_cast<size_t>(D)] = cplx{0.0, 0.0};
            for (int m = D + 1; m <= N; ++m) {
                cplx rhsm{0.0, 0.0};
                for (int j = 1; j <= m; ++j) rhsm += qc(j - 2) * s.b[static_cast<size_t>(m - j)];
                rhsm += s.K * log_weight(m) * s.a[static_cast<size_t>(m - D)];
                s.b[static_cast<size_t>(m)] =
                    -rhsm / (static_cast<double>(m) * (static_cast<double>(m) - static_cast<double>(D)));
            }
        } else {
            s.K = cplx{0.0, 0.0};
        }
    }
    return s;
}

struct FrobeniusEval {
    cplx y, dy;
};

namespace detail {

inline void series_and_derivative(const std::vector<cplx>& c, cplx z, cplx& sum, cplx& dsum) {
    sum = cplx{0.0, 0.0};
    for (size_t idx = c.size(); idx-- > 0;) sum = sum * z + c[idx];
    dsum = cplx{0.0, 0.0};
    for (size_t idx = c.size(); idx-- > 1;) dsum = dsum * z + c[idx] * static_cast<double>(idx);
}

inline void check_truncation_tail(const std::vector<cplx>& c, double r, cplx sum, double rtol) {
    const size_t n = c.size();
    if (n < 2) return;
    double tail = std::abs(c[n - 1]) * std::pow(r, static_cast<double>(n - 1)) +
                  std::abs(c[n - 2]) * std::pow(r, static_cast<double>(n - 2));
    if (tail > rtol * (std::abs(sum) + 1e-300))
        throw truncation_error("series tail estimate too large at |z| = " + std::to_string(r) +
                               "; raise the truncation order or move the evaluation point inward");
}

} // namespace detail

// Argument of z measured against a branch cut along direction cut_angle,
// normalized into (cut_angle, cut_angle + 2 pi].
inline double arg_on_sheet(cplx z, int sheet, double cut_angle = -std::numbers::pi / 2.0) {
    double th = std::arg(z);
    while (th <= cut_angle) th += 2.0 * std::numbers::pi;
    while (th > cut_angle + 2.0 * std::numbers::pi) th -= 2.0 * std::numbers::pi;
    return th + 2.0 * std::numbers::pi * static_cast<double>(sheet);
}

// Evaluates A y1 + B y2 and its derivative at the point r e^{i theta} on the
// universal cover (theta unwrapped, so z^f and ln z are single-valued here).
inline FrobeniusEval evaluate_frobenius_polar(const FrobeniusSolution& s, cplx A, cplx B,
                                              double r, double theta) {
    if (r <= 0.0)
        throw argument_error("frobenius evaluation requires |z| > 0");
    if (r > 0.8 * s.convergence_radius)
        throw truncation_error("evaluation point outside 0.8 x convergence radius");

    const cplx L{std::log(r), theta};
    const cplx z = std::exp(L);

    cplx Sa, dSa, Sb, dSb;
    detail::series_and_derivative(s.a, z, Sa, dSa);
    detail::series_and_derivative(s.b, z, Sb, dSb);
    detail::check_truncation_tail(s.a, r, Sa, s.tail_rtol);
    detail::check_truncation_tail(s.b, r, Sb, s.tail_rtol);

    const cplx zf1 = std::exp(s.f1 * L);
    const cplx zf2 = std::exp(s.f2 * L);

    const cplx y1 = zf1 * Sa;
    const cplx dy1 = zf1 / z * (s.f1 * Sa + z * dSa);
    cplx y2 = zf2 * Sb;
    cplx dy2 = zf2 / z * (s.f2 * Sb + z * dSb);
    if (s.K != cplx{0.0, 0.0}) {
        y2 += s.K * L * y1;
        dy2 += s.K * (y1 / z + L * dy1);
    }
    return {A * y1 + B * y2, A * dy1 + B * dy2};
}

// Same with the sheet chosen by an integer winding count relative to the
// default cut (negative imaginary axis).  Points exactly on the cut ray are
// ambiguous between adjacent sheets and are rejected; rotate the cut or use
// the polar form for those.
inline FrobeniusEval evaluate_frobenius(const FrobeniusSolution& s, cplx A, cplx B, cplx z,
                                        int sheet = 0, double cut_angle = -std::numbers::pi / 2.0) {
    if (z == cplx{0.0, 0.0})
        throw argument_error("frobenius evaluation at the singular point");
    double off_cut = std::remainder(std::arg(z) - cut_angle, 2.0 * std::numbers::pi);
    if (std::abs(off_cut) < 1e-12)
        throw argument_error("evaluation point lies on the branch cut; move the cut or "
                             "evaluate in polar form with an explicit argument");
    return evaluate_frobenius_polar(s, A, B, std::abs(z), arg_on_sheet(z, sheet, cut_angle));
}

} // namespace wkbj
