#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "wkbj/branch.hpp"
#include "wkbj/errors.hpp"
#include "wkbj/path.hpp"

namespace wkbj {

namespace detail {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
inline constexpr std::array<double, 8> gk15_x = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr std::array<double, 8> gk15_wk = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr std::array<double, 4> gk15_wg = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

template <class F>
std::pair<cplx, double> gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    cplx kron{0.0, 0.0}, gauss{0.0, 0.0};
    for (size_t i = 0; i < 8; ++i) {
        cplx contrib;
        if (i == 7) {
            contrib = f(mid);
        } else {
            contrib = f(mid - hl * gk15_x[i]) + f(mid + hl * gk15_x[i]);
        }
        kron += gk15_wk[i] * contrib;
        if (i % 2 == 1) gauss += gk15_wg[i / 2] * contrib;
    }
    kron *= hl;
    gauss *= hl;
    return {kron, std::abs(kron - gauss)};
}

} // namespace detail

struct QuadResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    int intervals = 0;
};

// Globally adaptive bisection driven by the per-interval Kronrod/Gauss
// discrepancy; the worst interval is split first, so integrable endpoint
// singularities resolve geometrically.
template <class F>
QuadResult adaptive_gk15(F&& f, double a, double b, double tol_abs, int max_intervals = 100000) {
    struct Piece {
        double err;
        double a, b;
        cplx val;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    auto [v0, e0] = detail::gk15(f, a, b);
    heap.push({e0, a, b, v0});
    cplx total = v0;
    double err_total = e0;
    int count = 1;
    while (err_total > tol_abs && count < max_intervals) {
        Piece worst = heap.top();
        // Stop only when the endpoints become (nearly) adjacent doubles.
        double local = std::max(std::abs(worst.a), std::abs(worst.b));
        if (worst.b - worst.a < 8.0 * std::numeric_limits<double>::epsilon() * local + 1e-300)
            break;
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        auto [vl, el] = detail::gk15(f, worst.a, m);
        auto [vr, er] = detail::gk15(f, m, worst.b);
        total += vl + vr - worst.val;
        err_total += el + er - worst.err;
        heap.push({el, worst.a, m, vl});
        heap.push({er, m, worst.b, vr});
        ++count;
    }
    if (err_total > tol_abs * 100.0) {
        const Piece& worst = heap.top();
        throw quadrature_error("adaptive quadrature did not reach tolerance; worst subinterval [" +
                               std::to_string(worst.a) + ", " + std::to_string(worst.b) +
                               "] after " + std::to_string(count) + " intervals");
    }
    return {total, err_total, count};
}

// Integral of sqrt(Q) dz along the path, branch continued from the seed of q.
inline QuadResult phase_integral_ex(const PhaseIntegrand& q, const ContourPath& path,
                                    double tol_quad = 1e-10) {
    BranchWalk walk(q, path);
    const double total_len = std::max(path.length(), 1e-300);
    QuadResult out;
    for (size_t i = 0; i < path.size(); ++i) {
        double share = std::max(path.segment_length(i) / total_len, 1e-3);
        auto f = [&](double t) -> cplx {
            double s = static_cast<double>(i) + t;
            cplx q_val = walk.Q(s);
            double ph = walk.phi(s, q_val);
            cplx w = std::sqrt(std::abs(q_val)) * std::exp(cplx{0.0, ph / 2.0});
            return w * path.tangent(i, t);
        };
        QuadResult r = adaptive_gk15(f, 0.0, 1.0, tol_quad * share);
        out.value += r.value;
        out.error_estimate += r.error_estimate;
        out.intervals += r.intervals;
    }
    return out;
}

inline cplx phase_integral(const PhaseIntegrand& q, const ContourPath& path,
                           double tol_quad = 1e-10) {
    return phase_integral_ex(q, path, tol_quad).value;
}

// The two WKB basis functions anchored at `anchor` and their z-derivatives:
//   y_pm(z) = Q^{-1/4} exp(+- i integral_anchor^z sqrt(Q) dz'),
//   y_pm'   = (+- i sqrt(Q) - Q'/(4Q)) y_pm .
struct WkbBasis {
    cplx y_plus, y_minus;
    cplx dy_plus, dy_minus;
    cplx omega;  // the phase integral from anchor to z
    cplx sqrt_q; // branch-continued sqrt(Q) at z
};

inline WkbBasis wkb_basis_at(const PhaseIntegrand& q, cplx anchor, cplx z,
                             const ContourPath& path, double tol_quad = 1e-10) {
    double scale = std::max({1.0, std::abs(anchor), std::abs(z)});
    if (std::abs(path.start() - anchor) > 1e-6 * scale ||
        std::abs(path.end() - z) > 1e-6 * scale)
        throw contour_error("wkb basis path must run from the anchor to the evaluation point");

    BranchWalk walk(q, path);
    QuadResult om = phase_integral_ex(q, path, tol_quad);

    const double s_end = walk.s_end();
    cplx q_val = walk.Q(s_end);
    double ph = walk.phi(s_end, q_val);
    cplx w = std::sqrt(std::abs(q_val)) * std::exp(cplx{0.0, ph / 2.0});
    cplx q_m14 = std::pow(std::abs(q_val), -0.25) * std::exp(cplx{0.0, -ph / 4.0});
    cplx dq = q.potential().derivative(z, 1);

    const cplx iu{0.0, 1.0};
    WkbBasis b;
    b.omega = om.value;
    b.sqrt_q = w;
    b.y_plus = q_m14 * std::exp(iu * om.value);
    b.y_minus = q_m14 * std::exp(-iu * om.value);
    cplx amp_term = dq / (4.0 * q_val);
    b.dy_plus = (iu * w - amp_term) * b.y_plus;
    b.dy_minus = (-iu * w - amp_term) * b.y_minus;
    return b;
}

} // namespace wkbj
