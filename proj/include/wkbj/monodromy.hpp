#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "wkbj/errors.hpp"
#include "wkbj/ode.hpp"
#include "wkbj/path.hpp"
#include "wkbj/potential.hpp"

namespace wkbj {

// Full-turn continuation matrix in the (y, y') basis at the base point:
// psi_after = R psi_before with psi = [y, y']^T.
struct RotationMatrix {
    std::array<std::array<cplx, 2>, 2> m{};
    std::string basis;
    ContourPath contour;

    cplx trace() const { return m[0][0] + m[1][1]; }
    cplx det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

// Evolves the canonical initial data (1,0) and (0,1) around the closed contour
// and assembles the matrix column by column.  Trace and determinant are basis
// invariants, so this (y, y') representation can be compared directly with any
// WKB-coefficient representation of the same loop.
inline RotationMatrix numerical_monodromy(const LaurentPotential& p, const ContourPath& contour,
                                          cplx base_point, const OdeOptions& opt = {}) {
    if (!contour.closed()) throw contour_error("monodromy contour must be closed");
    double scale = std::max(1.0, std::abs(base_point));
    if (std::abs(contour.start() - base_point) > 1e-9 * scale)
        throw contour_error("monodromy contour must start and end at the base point");

    std::array<OdeState, 2> init = {OdeState{cplx{1.0, 0.0}, cplx{0.0, 0.0}},
                                    OdeState{cplx{0.0, 0.0}, cplx{1.0, 0.0}}};
    auto fin = integrate_ode_multi<2>(p, contour, init, opt);

    RotationMatrix r;
    r.m[0][0] = fin[0].y;
    r.m[1][0] = fin[0].dy;
    r.m[0][1] = fin[1].y;
    r.m[1][1] = fin[1].dy;
    r.basis = "(y, y') at base point (" + std::to_string(base_point.real()) + ", " +
              std::to_string(base_point.imag()) + ")";
    r.contour = contour;
    return r;
}

// Tr R - 2 cos(2 pi f1); vanishes when the contour winds once around a single
// regular singular point of index f1.
inline cplx trace_relation_check(const RotationMatrix& r, cplx f1) {
    return r.trace() - 2.0 * std::cos(2.0 * std::numbers::pi * f1);
}

struct Eigenstructure {
    cplx lambda1, lambda2;
    bool diagonalizable = true;
    double defect = 0.0; // Schur off-diagonal size when the eigenvalues coincide
    bool tie = false;    // nearest-assignment ordering was ambiguous
};

namespace detail {

inline Eigenstructure eigen_2x2(const RotationMatrix& r) {
    Eigenstructure e;
    cplx tr = r.trace(), dt = r.det();
    cplx disc = std::sqrt(tr * tr - 4.0 * dt);
    e.lambda1 = 0.5 * (tr + disc);
    e.lambda2 = 0.5 * (tr - disc);

    double scale = 0.0;
    for (const auto& row : r.m)
        for (const auto& v : row) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1.0);

    // Distance from the scalar matrix (tr/2) I; for truly coincident
    // eigenvalues this is the Schur off-diagonal size.
    cplx mean = 0.5 * tr;
    double d = std::norm(r.m[0][0] - mean) + std::norm(r.m[0][1]) + std::norm(r.m[1][0]) +
               std::norm(r.m[1][1] - mean);
    double defect = std::sqrt(d);

    // An O(eps) error in a defective matrix splits the double eigenvalue by
    // O(sqrt(eps * defect)), so the coincidence window must scale with the
    // defect, not sit at a fixed absolute width.
    double gap = std::abs(e.lambda1 - e.lambda2);
    double window = std::max(1e-8 * scale, std::sqrt(1e-9 * scale * defect));
    if (gap <= window) {
        e.defect = defect;
        e.diagonalizable = defect <= 1e-6 * scale;
    }
    return e;
}

} // namespace detail

inline Eigenstructure eigenstructure(const RotationMatrix& r) {
    Eigenstructure e = detail::eigen_2x2(r);
    // Deterministic order without an index hint: larger modulus first, then
    // nonnegative imaginary part.
    bool swap = std::abs(e.lambda2) > std::abs(e.lambda1) + 1e-14 ||
                (std::abs(std::abs(e.lambda2) - std::abs(e.lambda1)) <= 1e-14 &&
                 e.lambda2.imag() > e.lambda1.imag());
    if (swap) std::swap(e.lambda1, e.lambda2);
    return e;
}

// Orders the pair so lambda1 is the one nearest exp(2 pi i f1).
inline Eigenstructure eigenstructure(const RotationMatrix& r, cplx f1) {
    Eigenstructure e = detail::eigen_2x2(r);
    cplx target = std::exp(cplx{0.0, 2.0 * std::numbers::pi} * f1);
    double d1 = std::abs(e.lambda1 - target);
    double d2 = std::abs(e.lambda2 - target);
    if (d2 < d1) std::swap(e.lambda1, e.lambda2);
    e.tie = std::abs(d1 - d2) <= 1e-12 * std::max(1.0, std::abs(target)) &&
            std::abs(e.lambda1 - e.lambda2) > 1e-12;
    return e;
}

// Transport matrix between two base points: columns are the canonical basis
// solutions integrated along the connecting path.
inline RotationMatrix transport_matrix(const LaurentPotential& p, const ContourPath& path,
                                       const OdeOptions& opt = {}) {
    std::array<OdeState, 2> init = {OdeState{cplx{1.0, 0.0}, cplx{0.0, 0.0}},
                                    OdeState{cplx{0.0, 0.0}, cplx{1.0, 0.0}}};
    auto fin = integrate_ode_multi<2>(p, path, init, opt);
    RotationMatrix t;
    t.m[0][0] = fin[0].y;
    t.m[1][0] = fin[0].dy;
    t.m[0][1] = fin[1].y;
    t.m[1][1] = fin[1].dy;
    t.basis = "transport";
    t.contour = path;
    return t;
}

inline RotationMatrix matmul(const RotationMatrix& a, const RotationMatrix& b) {
    RotationMatrix c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return c;
}

inline RotationMatrix inverse(const RotationMatrix& a) {
    cplx d = a.det();
    if (std::abs(d) < 1e-14) throw conditioning_error("matrix inverse of a singular matrix");
    RotationMatrix c;
    c.m[0][0] = a.m[1][1] / d;
    c.m[0][1] = -a.m[0][1] / d;
    c.m[1][0] = -a.m[1][0] / d;
    c.m[1][1] = a.m[0][0] / d;
    return c;
}

} // namespace wkbj
