#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "wkbj/branch.hpp"
#include "wkbj/connection.hpp"
#include "wkbj/errors.hpp"
#include "wkbj/ode.hpp"
#include "wkbj/path.hpp"
#include "wkbj/potential.hpp"
#include "wkbj/quadrature.hpp"

namespace wkbj {

enum class ScatterMethod { exact_trace, isolated_singularities, numerical_oracle };

inline const char* to_string(ScatterMethod m) {
    switch (m) {
        case ScatterMethod::exact_trace: return "exact_trace";
        case ScatterMethod::isolated_singularities: return "isolated_singularities";
        default: return "numerical_oracle";
    }
}

// Scattering summary for Q = 1 + c/z: reflection, transmission, absorption.
// A = 1 - |R|^2 - |T|^2 by construction.  When phase_known is false only the
// magnitude of R is determined (the trace relation pins |s-| but not its
// phase) and the complex field is absent.
struct ScatteringResult {
    double c = 0.0;
    ScatterMethod method = ScatterMethod::exact_trace;
    double R_abs = 0.0, T_abs = 0.0;
    double A = 0.0;
    std::optional<cplx> R, T;
    bool phase_known = false;
    std::vector<std::string> warnings;
};

// exp(i integral_0^{-c} sqrt(1 + c/z) dz) evaluated just below the cut joining
// the pole to the turning point; analytically e^{pi c / 2}.
inline cplx budden_below_cut_factor(double c, double tol_quad = 1e-10) {
    if (c <= 0.0) throw argument_error("budden parameter c must be positive");
    LaurentPotential pot = LaurentPotential::budden(c);
    ContourPath path = ContourPath::line({0.0, 0.0}, {-c, 0.0});
    path.set_side(CutSide::below);
    PhaseIntegrand q = PhaseIntegrand::on_side(pot, cplx{-c / 2.0, 0.0}, CutSide::below);
    cplx integral = phase_integral(q, path, tol_quad);
    return std::exp(cplx{0.0, 1.0} * integral);
}

// The full-turn continuation about the origin as a seven-factor script: the
// two re-anchorings between the origin and the turning point (below the cut on
// the way in, above it on the way out) sandwich alternating anti-Stokes label
// swaps and the two Stokes crossings in the lower and upper half planes.
inline std::vector<ConnectionMatrix> budden_loop_script_with_phase(cplx below_cut_factor) {
    const cplx phi = below_cut_factor;
    std::vector<ConnectionMatrix> steps;
    steps.push_back(branch_cut_crossing(phi, /*swap_dominancy=*/true, Slot::plus, "1", "1"));
    steps.push_back(anti_stokes_swap(Slot::minus, "1", "2"));
    steps.push_back(elementary_stokes_crossing("s-", -1, Slot::plus, false, "2", "3"));
    steps.push_back(anti_stokes_swap(Slot::plus, "3", "4"));
    steps.push_back(elementary_stokes_crossing("s+", -1, Slot::minus, false, "4", "5"));
    steps.push_back(anti_stokes_swap(Slot::minus, "5", "6"));
    steps.push_back(branch_cut_crossing(phi, /*swap_dominancy=*/true, Slot::plus, "6", "1'"));
    return steps;
}

inline std::vector<ConnectionMatrix> budden_loop_script(double c) {
    if (c <= 0.0) throw argument_error("budden parameter c must be positive");
    return budden_loop_script_with_phase(std::exp(cplx{std::numbers::pi * c / 2.0, 0.0}));
}

// |s-| = 1 - e^{-pi c} from the trace relation plus the reality symmetry;
// T = e^{-pi c / 2} from the boundary continuation.
inline ScatteringResult exact_scattering(double c) {
    if (c <= 0.0) throw argument_error("budden parameter c must be positive");
    ScatteringResult r;
    r.c = c;
    r.method = ScatterMethod::exact_trace;
    const double u = std::exp(-std::numbers::pi * c);
    r.R_abs = 1.0 - u;
    r.T_abs = std::exp(-std::numbers::pi * c / 2.0);
    r.T = cplx{r.T_abs, 0.0};
    r.A = 1.0 - r.R_abs * r.R_abs - r.T_abs * r.T_abs;
    r.phase_known = false;
    return r;
}

// Treating the pole and the turning point as if each were alone gives
// R ~ -i (2 e^{pi c/2} - e^{-pi c/2}) / (2 e^{pi c/2} + e^{-pi c/2}) and
// T ~ -2i / (2 e^{pi c/2} + e^{-pi c/2}); accurate for c >~ 1, wrong as c -> 0.
inline ScatteringResult isolated_singularity_scattering(double c) {
    if (c <= 0.0) throw argument_error("budden parameter c must be positive");
    ScatteringResult r;
    r.c = c;
    r.method = ScatterMethod::isolated_singularities;
    const double u = std::exp(std::numbers::pi * c / 2.0);
    const double denom = 2.0 * u + 1.0 / u;
    const cplx mi{0.0, -1.0};
    r.R = mi * (2.0 * u - 1.0 / u) / denom;
    r.T = mi * 2.0 / denom;
    r.R_abs = std::abs(*r.R);
    r.T_abs = std::abs(*r.T);
    r.A = 1.0 - r.R_abs * r.R_abs - r.T_abs * r.T_abs;
    r.phase_known = true;
    return r;
}

// Direct numerical scattering: seed the transmitted WKB wave at z = +radius,
// integrate the exact equation along a rectangle dipping below both
// singularities, and project the terminal data onto the WKB pair at
// z = -radius.  Amplitudes are referenced to the phase factors e^{+-i omega}
// with omega anchored at the origin (limit below the cut), so the reported
// ratios converge to the asymptotic R and T as the radius grows.
inline ScatteringResult numerical_scattering(double c, double radius = 200.0, double tol = 1e-3,
                                             double tol_quad = 1e-10, double rtol_ode = 1e-10) {
    if (c <= 0.0) throw argument_error("budden parameter c must be positive");
    if (radius <= 2.0 * std::max(1.0, c))
        throw argument_error("radius too small for asymptotic matching");

    ScatteringResult r;
    r.c = c;
    r.method = ScatterMethod::numerical_oracle;
    r.phase_known = true;

    LaurentPotential pot = LaurentPotential::budden(c);
    const double d = std::max(1.0, c);
    const cplx zs{radius, 0.0};
    const cplx ze{-radius, 0.0};

    for (double endpoint : {radius, -radius}) {
        double eps = pot.wkb_validity(cplx{endpoint, 0.0});
        if (eps > tol)
            r.warnings.push_back("wkb validity measure " + std::to_string(eps) + " at z = " +
                                 std::to_string(endpoint) + " exceeds " + std::to_string(tol));
    }

    // Phase anchor: omega_0 = integral_0^{+radius} sqrt(Q), real and positive.
    ContourPath anchor_leg = ContourPath::line({0.0, 0.0}, zs);
    PhaseIntegrand q_anchor =
        PhaseIntegrand::on_side(pot, cplx{radius / 2.0, 0.0}, CutSide::below);
    cplx omega0 = phase_integral(q_anchor, anchor_leg, tol_quad);

    // The continuation path through the lower half plane.
    ContourPath path = ContourPath::polyline({zs, zs - cplx{0.0, d}, ze - cplx{0.0, d}, ze});
    path.set_side(CutSide::below);
    PhaseIntegrand q_path = PhaseIntegrand::principal(pot, zs);

    WkbBasis end_basis = wkb_basis_at(q_path, zs, ze, path, tol_quad);

    // WKB data at the start (sqrt(Q) is real positive there).
    const cplx qs = pot.evaluate(zs);
    const cplx ws = std::sqrt(qs);
    const cplx iu{0.0, 1.0};
    const cplx e0 = std::exp(iu * omega0);
    const cplx y_start = std::pow(std::abs(qs), -0.25) * e0;
    const cplx dy_start = (iu * ws - pot.derivative(zs) / (4.0 * qs)) * y_start;

    OdeOptions opt;
    opt.rtol = rtol_ode;
    OdeState fin = integrate_ode(pot, path, OdeState{y_start, dy_start}, opt);

    // 0-anchored basis at the end point.
    const cplx up = e0 * end_basis.y_plus;
    const cplx um = end_basis.y_minus / e0;
    const cplx dup = e0 * end_basis.dy_plus;
    const cplx dum = end_basis.dy_minus / e0;

    const cplx wr = up * dum - um * dup; // ~ -2i, basis Wronskian
    double wr_scale = std::max(std::abs(up * dum), std::abs(um * dup));
    if (std::abs(wr) < 1e-8 * std::max(1.0, wr_scale))
        throw conditioning_error("WKB projection basis is numerically degenerate");

    const cplx alpha = (fin.y * dum - fin.dy * um) / wr;
    const cplx beta = (fin.dy * up - fin.y * dup) / wr;

    const cplx omega_end = omega0 + end_basis.omega;
    const cplx amp_inc = alpha * std::exp(iu * omega_end);
    const cplx amp_ref = beta * std::exp(-iu * omega_end);
    const cplx amp_tr = std::exp(iu * omega0);

    r.R = amp_ref / amp_inc;
    r.T = amp_tr / amp_inc;
    r.R_abs = std::abs(*r.R);
    r.T_abs = std::abs(*r.T);
    r.A = 1.0 - r.R_abs * r.R_abs - r.T_abs * r.T_abs;
    return r;
}

struct SweepRow {
    double c = 0.0;
    double A_exact = 0.0;
    double A_isolated = 0.0;
    std::optional<double> A_numerical;
};

inline std::vector<SweepRow> comparison_sweep(double c_min, double c_max, int n,
                                              bool with_numerical = false, double radius = 200.0,
                                              double tol = 1e-3) {
    if (!(c_min > 0.0) || !(c_min < c_max))
        throw argument_error("sweep requires 0 < c_min < c_max");
    if (n < 2) throw argument_error("sweep requires n >= 2");
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double c = c_min + (c_max - c_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        SweepRow row;
        row.c = c;
        row.A_exact = exact_scattering(c).A;
        row.A_isolated = isolated_singularity_scattering(c).A;
        if (with_numerical) row.A_numerical = numerical_scattering(c, radius, tol).A;
        rows.push_back(row);
    }
    return rows;
}

} // namespace wkbj
