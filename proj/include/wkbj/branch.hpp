#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "wkbj/errors.hpp"
#include "wkbj/path.hpp"
#include "wkbj/potential.hpp"

namespace wkbj {

// Fixes the sign of sqrt(Q) at one anchor point; the branch elsewhere is
// obtained by continuity along paths.
struct BranchSeed {
    cplx z0;
    cplx value; // value^2 = Q(z0)
};

class PhaseIntegrand {
public:
    PhaseIntegrand(LaurentPotential pot, BranchSeed seed)
        : pot_(std::move(pot)), seed_(seed) {
        cplx q = pot_.evaluate(seed_.z0);
        double scale = std::max(std::abs(q), 1e-300);
        if (std::abs(seed_.value * seed_.value - q) > 1e-6 * scale)
            throw argument_error("branch seed does not square to Q at the anchor point");
    }

    static PhaseIntegrand principal(LaurentPotential pot, cplx z0) {
        cplx q = pot.evaluate(z0);
        return PhaseIntegrand(std::move(pot), BranchSeed{z0, std::sqrt(q)});
    }

    // Seed on a prescribed side of a cut lying on the real axis: the branch is
    // the limit from below (Im z -> -0) or above.  Probing a slightly
    // displaced point picks the correct sign without relying on signed zeros.
    static PhaseIntegrand on_side(LaurentPotential pot, cplx z0, CutSide side) {
        if (side == CutSide::none) return principal(std::move(pot), z0);
        double eta = 1e-7 * std::max(1.0, std::abs(z0));
        cplx probe_pt = z0 + cplx{0.0, side == CutSide::below ? -eta : eta};
        cplx w_probe = std::sqrt(pot.evaluate(probe_pt));
        cplx w = std::sqrt(pot.evaluate(z0));
        if (std::abs(-w - w_probe) < std::abs(w - w_probe)) w = -w;
        return PhaseIntegrand(std::move(pot), BranchSeed{z0, w});
    }

    const LaurentPotential& potential() const noexcept { return pot_; }
    const BranchSeed& seed() const noexcept { return seed_; }

private:
    LaurentPotential pot_;
    BranchSeed seed_;
};

namespace detail {

inline double wrap_pi(double x) {
    while (x > std::numbers::pi) x -= 2.0 * std::numbers::pi;
    while (x <= -std::numbers::pi) x += 2.0 * std::numbers::pi;
    return x;
}

inline double unwrap_near(double raw_arg, double reference) {
    return raw_arg + 2.0 * std::numbers::pi * std::round((reference - raw_arg) / (2.0 * std::numbers::pi));
}

// Steps from (z1, Q1) to (z2, Q2) without losing track of arg Q: the change of
// argument must stay well under pi and the magnitude must not jump so far that
// a loop of Q around zero could hide between samples.
inline bool branch_step_ok(cplx q1, cplx q2) {
    double m1 = std::abs(q1), m2 = std::abs(q2);
    if (m1 == 0.0 || m2 == 0.0 || !std::isfinite(m1) || !std::isfinite(m2)) return false;
    if (std::abs(wrap_pi(std::arg(q2) - std::arg(q1))) > 0.5) return false;
    double ratio = m1 > m2 ? m1 / m2 : m2 / m1;
    return ratio <= 4.0;
}

struct WalkAnchor {
    double s;   // global path parameter
    double phi; // unwrapped arg Q at that point
};

} // namespace detail

// Continues sqrt(Q) from (z_from, w_from) to z_to along the straight segment.
inline cplx continue_sqrt_straight(const LaurentPotential& pot, cplx z_from, cplx w_from,
                                   cplx z_to) {
    if (z_from == z_to) return w_from;
    double phi = 2.0 * std::arg(w_from);
    cplx q_prev = pot.evaluate_unchecked(z_from);
    double t = 0.0, h = 0.125;
    const double h_min = 1e-13;
    while (t < 1.0) {
        double t2 = std::min(1.0, t + h);
        cplx q2 = pot.evaluate_unchecked(z_from + t2 * (z_to - z_from));
        if (!detail::branch_step_ok(q_prev, q2)) {
            h *= 0.5;
            if (h < h_min) {
                if (std::min(std::abs(q_prev), std::abs(q2)) < 1e-8)
                    throw branch_point_error("seed propagation crosses a branch point of sqrt(Q)");
                throw quadrature_error("seed propagation stalled while tracking the branch");
            }
            continue;
        }
        phi = detail::unwrap_near(std::arg(q2), phi);
        q_prev = q2;
        t = t2;
        h = std::min(h * 1.5, 0.25);
    }
    return std::sqrt(std::abs(q_prev)) * std::exp(cplx{0.0, phi / 2.0});
}

// A branch-continuity record for sqrt(Q) along one path: a dense set of
// (parameter, unwrapped arg Q) anchors walked out from the seed.  Off-anchor
// queries unwrap arg Q against the interpolated anchor value, so any
// quadrature or sampling scheme sees one continuous branch.
class BranchWalk {
public:
    BranchWalk(const PhaseIntegrand& q, const ContourPath& path)
        : pot_(q.potential()), path_(path) {
        if (path_.empty()) throw contour_error("empty path");
        n_ = static_cast<double>(path_.size());

        // Locate the parameter closest to the seed.
        double s_star = 0.0, best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < path_.size(); ++i) {
            for (int k = 0; k <= 64; ++k) {
                double t = static_cast<double>(k) / 64.0;
                double d = std::abs(path_.point(i, t) - q.seed().z0);
                if (d < best) {
                    best = d;
                    s_star = static_cast<double>(i) + t;
                }
            }
        }
        s_star = std::clamp(s_star, 0.0, n_);

        cplx z_star = point(s_star);
        cplx w_dir = continue_sqrt_straight(pot_, q.seed().z0, q.seed().value, z_star);
        cplx q_star = pot_.evaluate_unchecked(z_star);
        if (!std::isfinite(std::abs(q_star)) || std::abs(q_star) == 0.0)
            throw branch_point_error("branch seed lands on a zero or pole of Q on the path");
        cplx w = std::sqrt(q_star);
        if (std::abs(-w - w_dir) < std::abs(w - w_dir)) w = -w;

        double phi_star = 2.0 * std::arg(w);
        anchors_.push_back({s_star, phi_star});

        double q_scale = 0.0;
        for (int k = 0; k <= 32; ++k) {
            cplx qq = pot_.evaluate_unchecked(point(n_ * k / 32.0));
            if (std::isfinite(std::abs(qq))) q_scale = std::max(q_scale, std::abs(qq));
        }
        q_scale_ = std::max(q_scale, 1e-300);

        walk(s_star, phi_star, q_star, n_, +1.0);
        walk(s_star, phi_star, q_star, 0.0, -1.0);
        std::sort(anchors_.begin(), anchors_.end(),
                  [](const auto& a, const auto& b) { return a.s < b.s; });
    }

    cplx point(double s) const {
        auto [i, t] = split(s);
        return path_.point(i, t);
    }

    cplx tangent(double s) const {
        auto [i, t] = split(s);
        return path_.tangent(i, t);
    }

    cplx Q(double s) const { return pot_.evaluate_unchecked(point(s)); }

    // Unwrapped arg Q at parameter s given the already-evaluated Q there.
    double phi(double s, cplx q_val) const {
        return detail::unwrap_near(std::arg(q_val), phi_reference(s));
    }

    cplx sqrtQ(double s) const {
        cplx q_val = Q(s);
        double ph = phi(s, q_val);
        return std::sqrt(std::abs(q_val)) * std::exp(cplx{0.0, ph / 2.0});
    }

    // Q^{-1/4} on the sheet pinned by the seed (arg Q = 2 arg(seed value) there).
    cplx quarter_root_inv(double s) const {
        cplx q_val = Q(s);
        double ph = phi(s, q_val);
        return std::pow(std::abs(q_val), -0.25) * std::exp(cplx{0.0, -ph / 4.0});
    }

    double s_end() const noexcept { return n_; }
    const ContourPath& path() const noexcept { return path_; }
    const LaurentPotential& potential() const noexcept { return pot_; }

private:
    std::pair<size_t, double> split(double s) const {
        s = std::clamp(s, 0.0, n_);
        auto i = static_cast<size_t>(std::min(std::floor(s), n_ - 1.0));
        return {i, s - static_cast<double>(i)};
    }

    double phi_reference(double s) const {
        const auto& a = anchors_;
        if (s <= a.front().s) return a.front().phi;
        if (s >= a.back().s) return a.back().phi;
        auto it = std::lower_bound(a.begin(), a.end(), s,
                                   [](const detail::WalkAnchor& w, double v) { return w.s < v; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        if (hi.s == lo.s) return lo.phi;
        double u = (s - lo.s) / (hi.s - lo.s);
        return lo.phi + u * (hi.phi - lo.phi);
    }

    void walk(double s0, double phi0, cplx q0, double s_stop, double dir) {
        double s = s0, phi = phi0;
        cplx q_prev = q0;
        double h = 1.0 / 64.0;
        const double h_min = 1e-14;
        while (dir * (s_stop - s) > 0.0) {
            double s2 = s + dir * h;
            if (dir * (s_stop - s2) < 0.0) s2 = s_stop;
            cplx q2 = pot_.evaluate_unchecked(point(s2));
            bool endpoint = (s2 == s_stop);
            if (!std::isfinite(std::abs(q2)) || std::abs(q2) == 0.0) {
                // Singular path endpoint (pole or zero of Q exactly at the
                // end): clip the walk just short of it; interior hits are
                // genuine branch-point crossings.
                if (endpoint && std::abs(s2 - s) <= 4.0 * h_min) return;
                if (!endpoint)
                    throw branch_point_error("path passes through a zero or pole of Q near z = (" +
                                             std::to_string(point(s2).real()) + ", " +
                                             std::to_string(point(s2).imag()) + ")");
                h *= 0.5;
                if (h < h_min) return;
                continue;
            }
            if (!detail::branch_step_ok(q_prev, q2)) {
                h *= 0.5;
                if (h < h_min) {
                    if (std::min(std::abs(q_prev), std::abs(q2)) < 1e-10 * q_scale_) {
                        // a zero at the very end of the path is an integrable
                        // endpoint; clip the walk there instead of failing
                        if (std::abs(s_stop - s) <= 64.0 * h_min) return;
                        throw branch_point_error(
                            "branch tracking bottomed out next to a zero of Q near z = (" +
                            std::to_string(point(s2).real()) + ", " +
                            std::to_string(point(s2).imag()) + ")");
                    }
                    throw quadrature_error("branch tracking stalled along the path");
                }
                continue;
            }
            double d_arg = std::abs(detail::wrap_pi(std::arg(q2) - std::arg(q_prev)));
            phi = detail::unwrap_near(std::arg(q2), phi);
            anchors_.push_back({s2, phi});
            q_prev = q2;
            s = s2;
            if (d_arg < 0.1) h = std::min(h * 1.5, 0.125);
        }
    }

    LaurentPotential pot_;
    ContourPath path_;
    double n_ = 0.0;
    double q_scale_ = 1.0;
    std::vector<detail::WalkAnchor> anchors_;
};

} // namespace wkbj
