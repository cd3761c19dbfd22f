#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "wkbj/errors.hpp"
#include "wkbj/path.hpp"
#include "wkbj/potential.hpp"

namespace wkbj {

struct OdeState {
    cplx y, dy;
};

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-13;
    double clearance = 1e-3; // required distance between path and poles of Q
    double initial_step = 1e-2;
    double min_step = 1e-14;
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
    static constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
    static constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
    static constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
    static constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
    static constexpr double e7 = -1.0 / 40.0;
};

// Integrates Y' = F(t, Y) for a fixed-size complex state over t in [0, 1]
// with embedded 5(4) step control.
template <size_t N, class F>
void dopri5_unit_interval(F&& rhs, std::array<cplx, N>& y, const OdeOptions& opt) {
    using D = Dopri5;
    double t = 0.0;
    double h = std::clamp(opt.initial_step, opt.min_step, 1.0);
    std::array<cplx, N> k1, k2, k3, k4, k5, k6, k7, yt, y5;

    rhs(t, y, k1);
    int rejected_in_a_row = 0;
    while (t < 1.0) {
        const bool last = (h >= 1.0 - t);
        if (last) h = 1.0 - t;
        for (size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (D::a21 * k1[i]);
        rhs(t + D::c2 * h, yt, k2);
        for (size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
        rhs(t + D::c3 * h, yt, k3);
        for (size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
        rhs(t + D::c4 * h, yt, k4);
        for (size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
        rhs(t + D::c5 * h, yt, k5);
        for (size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] +
                                D::a64 * k4[i] + D::a65 * k5[i]);
        rhs(t + h, yt, k6);
        for (size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] + D::b5 * k5[i] +
                                D::b6 * k6[i]);
        rhs(t + h, y5, k7);

        double err = 0.0;
        for (size_t i = 0; i < N; ++i) {
            cplx e = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] +
                          D::e6 * k6[i] + D::e7 * k7[i]);
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / sc);
        }

        const bool accepted = err <= 1.0;
        if (accepted) {
            t = last ? 1.0 : t + h;
            y = y5;
            k1 = k7; // first-same-as-last
            rejected_in_a_row = 0;
        } else if (++rejected_in_a_row > 60) {
            throw ode_error("step control failed to find an acceptable step at t = " +
                            std::to_string(t));
        }
        double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < opt.min_step) {
            if (!accepted)
                throw ode_error("step size underflow at t = " + std::to_string(t) +
                                " (singularity too close to the path?)");
            h = opt.min_step;
        }
    }
}

} // namespace detail

// Solves y'' = -Q(z) y along the path as a first-order complex system in the
// path parameter, one segment at a time.  Several independent initial
// conditions evolve jointly (same step sequence, shared Q evaluations).
template <size_t M>
std::array<OdeState, M> integrate_ode_multi(const LaurentPotential& p, const ContourPath& path,
                                            const std::array<OdeState, M>& initial,
                                            const OdeOptions& opt = {}) {
    if (path.empty()) throw contour_error("empty integration path");
    double clear = pole_clearance(p, path);
    if (clear < opt.clearance)
        throw contour_error("path comes within " + std::to_string(clear) +
                            " of a pole of Q (clearance " + std::to_string(opt.clearance) + ")");

    std::array<cplx, 2 * M> state;
    for (size_t m = 0; m < M; ++m) {
        state[2 * m] = initial[m].y;
        state[2 * m + 1] = initial[m].dy;
    }

    for (size_t i = 0; i < path.size(); ++i) {
        auto rhs = [&](double t, const std::array<cplx, 2 * M>& s, std::array<cplx, 2 * M>& out) {
            cplx z = path.point(i, t);
            cplx dz = path.tangent(i, t);
            cplx q = p.evaluate_unchecked(z);
            for (size_t m = 0; m < M; ++m) {
                out[2 * m] = s[2 * m + 1] * dz;
                out[2 * m + 1] = -q * s[2 * m] * dz;
            }
        };
        detail::dopri5_unit_interval<2 * M>(rhs, state, opt);
    }

    std::array<OdeState, M> out;
    for (size_t m = 0; m < M; ++m) out[m] = {state[2 * m], state[2 * m + 1]};
    return out;
}

inline OdeState integrate_ode(const LaurentPotential& p, const ContourPath& path, OdeState initial,
                              const OdeOptions& opt = {}) {
    return integrate_ode_multi<1>(p, path, {initial}, opt)[0];
}

} // namespace wkbj
