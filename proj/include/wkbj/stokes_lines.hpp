#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "wkbj/errors.hpp"
#include "wkbj/potential.hpp"

namespace wkbj {

enum class LineKind { stokes, anti_stokes };
enum class Terminus { infinity, singularity, truncated };

inline const char* to_string(LineKind k) {
    return k == LineKind::stokes ? "stokes" : "anti_stokes";
}
inline const char* to_string(Terminus t) {
    switch (t) {
        case Terminus::infinity: return "infinity";
        case Terminus::singularity: return "singularity";
        default: return "truncated";
    }
}

// One curve traced from a turning point.  Along a stokes line
// Re int sqrt(Q) = 0 (one solution maximally dominant); along an anti_stokes
// line Im int sqrt(Q) = 0 (equal magnitudes).  A flag elsewhere may flip the
// *names* for readers used to the opposite convention; the geometry is fixed.
struct StokesLine {
    cplx origin;
    std::vector<cplx> points;
    LineKind kind;
    Terminus terminus = Terminus::truncated;
    double length = 0.0;
    double launch_angle = 0.0;
};

struct TraceOptions {
    double max_len = 60.0;
    double escape_radius = 25.0;
    double step_fraction = 1e-2;   // arclength step relative to the local scale
    double corrector_tol = 1e-8;   // on the defining phase condition
    double seed_radius = 1e-4;     // first point distance from the turning point
    double capture_radius = 1e-3;  // stop distance at another singular point
    bool trace_stokes = true;
    bool trace_anti = true;
};

namespace detail {

// sqrt of Q continued step to step; sign chosen nearest to the previous value.
inline cplx continue_sqrt_local(const LaurentPotential& p, cplx z, cplx w_prev, bool& ok) {
    cplx q = p.evaluate_unchecked(z);
    double m = std::abs(q);
    if (!std::isfinite(m) || m == 0.0) {
        ok = false;
        return w_prev;
    }
    cplx w = std::sqrt(q);
    if (std::abs(-w - w_prev) < std::abs(w - w_prev)) w = -w;
    // Ambiguous continuation means the step straddled a branch point.
    ok = std::abs(w - w_prev) < 0.8 * std::abs(w_prev) + 1e-300;
    return w;
}

struct SingularSet {
    std::vector<cplx> points; // zeros and poles of Q
    // Distance to the singular set.  The line's own origin is ignored until
    // the traced arclength shows the point has genuinely left it.
    double nearest(cplx z, cplx origin, double arclen, double capture_radius) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : points) {
            if (std::abs(s - origin) < 1e-12 && arclen < 20.0 * capture_radius) continue;
            d = std::min(d, std::abs(z - s));
        }
        return d;
    }
};

} // namespace detail

// Order of the zero of Q at z0 (smallest derivative order with a nonzero
// coefficient) and the leading Taylor coefficient there.
inline std::pair<int, cplx> turning_point_order(const LaurentPotential& p, cplx z0,
                                                int max_order = 8) {
    double scale = std::max(1.0, std::abs(p.laurent_coefficient(0)));
    double fac = 1.0;
    for (int m = 1; m <= max_order; ++m) {
        fac *= static_cast<double>(m);
        cplx c = p.derivative(z0, m) / fac;
        if (std::abs(c) > 1e-8 * scale) return {m, c};
    }
    throw tracing_error("could not determine the order of the turning point");
}

// Traces every line of the requested kinds leaving the turning point `from`.
// From an order-m zero exactly m+2 lines of each kind emanate, at the angles
// where the leading local phase integral is purely imaginary (stokes) or
// purely real (anti_stokes).
inline std::vector<StokesLine> trace_stokes_lines(const LaurentPotential& p, cplx from,
                                                  const TraceOptions& opt = {}) {
    cplx q_at = p.evaluate_unchecked(from);
    double q_scale = std::max(1.0, std::abs(p.laurent_coefficient(0)));
    if (std::abs(q_at) > 1e-6 * q_scale)
        throw argument_error("tracing must start at a turning point of Q");

    auto [m, lead] = turning_point_order(p, from);
    const double mu = 0.5 * static_cast<double>(m) + 1.0;
    const double phi_c = std::arg(lead);

    detail::SingularSet sing;
    for (const auto& tp : p.turning_points()) sing.points.push_back(tp);
    for (const auto& pole : p.poles()) sing.points.push_back(pole.location);

    std::vector<StokesLine> out;
    auto trace_family = [&](LineKind kind) {
        for (int k = 0; k < m + 2; ++k) {
            double target = (kind == LineKind::stokes)
                                ? (std::numbers::pi / 2.0 + std::numbers::pi * k - phi_c / 2.0)
                                : (std::numbers::pi * k - phi_c / 2.0);
            double theta = target / mu;
            while (theta < 0.0) theta += 2.0 * std::numbers::pi;
            while (theta >= 2.0 * std::numbers::pi) theta -= 2.0 * std::numbers::pi;

            StokesLine line;
            line.origin = from;
            line.kind = kind;
            line.launch_angle = theta;
            line.points.push_back(from);

            if (opt.max_len <= 0.0) {
                out.push_back(std::move(line));
                continue;
            }

            // Seed a short ray where the local expansion fixes the branch.
            cplx dir{std::cos(theta), std::sin(theta)};
            cplx z = from + opt.seed_radius * dir;
            cplx w_expect = std::sqrt(std::abs(lead) * std::pow(opt.seed_radius, m)) *
                            std::exp(cplx{0.0, (phi_c + m * theta) / 2.0});
            bool ok = true;
            cplx w = detail::continue_sqrt_local(p, z, w_expect, ok);
            // Phase from the turning point: leading-order closed form at the
            // seed (corrections are O(seed_radius) relative and the corrector
            // re-converges the condition immediately).
            cplx omega = w * (z - from) / mu;
            cplx tau = dir;
            line.points.push_back(z);
            line.length = opt.seed_radius;

            while (true) {
                if (std::abs(z) > opt.escape_radius) {
                    line.terminus = Terminus::infinity;
                    break;
                }
                if (line.length >= opt.max_len) {
                    line.terminus = Terminus::truncated;
                    break;
                }
                double near = sing.nearest(z, from, line.length, opt.capture_radius);
                if (near < opt.capture_radius) {
                    line.terminus = Terminus::singularity;
                    break;
                }

                double local = std::clamp(std::min(near, std::abs(z - from)), 10.0 * opt.seed_radius,
                                          opt.escape_radius);
                double ds = opt.step_fraction * local;

                bool stepped = false;
                for (int attempt = 0; attempt < 40 && !stepped; ++attempt, ds *= 0.5) {
                    // Tangent keeping the defining condition stationary.
                    cplx t0 = (kind == LineKind::stokes) ? cplx{0.0, 1.0} * std::conj(w) / std::abs(w)
                                                         : std::conj(w) / std::abs(w);
                    if ((t0 * std::conj(tau)).real() < 0.0) t0 = -t0;

                    bool ok_mid = true, ok_new = true, ok_c = true;
                    cplx zm = z + 0.5 * ds * t0;
                    cplx wm = detail::continue_sqrt_local(p, zm, w, ok_mid);
                    if (!ok_mid) continue;
                    cplx tm = (kind == LineKind::stokes) ? cplx{0.0, 1.0} * std::conj(wm) / std::abs(wm)
                                                         : std::conj(wm) / std::abs(wm);
                    if ((tm * std::conj(t0)).real() < 0.0) tm = -tm;

                    cplx z_new = z + ds * tm;
                    cplx w_new = detail::continue_sqrt_local(p, z_new, wm, ok_new);
                    if (!ok_new) continue;

                    // Simpson increment of the phase along the chord.
                    cplx zc = 0.5 * (z + z_new);
                    cplx wc = detail::continue_sqrt_local(p, zc, wm, ok_c);
                    if (!ok_c) continue;
                    cplx om_new = omega + (z_new - z) * (w + 4.0 * wc + w_new) / 6.0;

                    // Corrector: push the point back onto the line.
                    bool corr_failed = false;
                    for (int it = 0; it < 8; ++it) {
                        double g = (kind == LineKind::stokes) ? om_new.real() : om_new.imag();
                        if (std::abs(g) <= opt.corrector_tol * std::max(1.0, std::abs(om_new)))
                            break;
                        cplx nu = (kind == LineKind::stokes)
                                      ? std::conj(w_new) / std::abs(w_new)
                                      : cplx{0.0, 1.0} * std::conj(w_new) / std::abs(w_new);
                        cplx dzc = -(g / std::abs(w_new)) * nu;
                        if (std::abs(dzc) > 0.5 * ds) {
                            corr_failed = true;
                            break;
                        }
                        bool ok_corr = true;
                        cplx w_shift = detail::continue_sqrt_local(p, z_new + dzc, w_new, ok_corr);
                        if (!ok_corr) {
                            corr_failed = true;
                            break;
                        }
                        om_new += 0.5 * (w_new + w_shift) * dzc;
                        z_new += dzc;
                        w_new = w_shift;
                    }
                    if (corr_failed) continue;

                    line.length += std::abs(z_new - z);
                    tau = tm;
                    z = z_new;
                    w = w_new;
                    omega = om_new;
                    line.points.push_back(z);
                    stepped = true;
                }
                if (!stepped) {
                    if (sing.nearest(z, from, line.length, opt.capture_radius) <
                        10.0 * opt.capture_radius) {
                        line.terminus = Terminus::singularity;
                        break;
                    }
                    throw tracing_error("stokes-line tracing stalled at z = (" +
                                        std::to_string(z.real()) + ", " +
                                        std::to_string(z.imag()) + ")");
                }
            }
            out.push_back(std::move(line));
        }
    };

    if (opt.trace_stokes) trace_family(LineKind::stokes);
    if (opt.trace_anti) trace_family(LineKind::anti_stokes);
    return out;
}

} // namespace wkbj
