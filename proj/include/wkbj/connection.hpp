#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wkbj/errors.hpp"
#include "wkbj/stokes_poly.hpp"

namespace wkbj {

// Which WKB coefficient slot currently holds the dominant solution.
enum class Slot { plus, minus };

inline Slot flip(Slot s) { return s == Slot::plus ? Slot::minus : Slot::plus; }

inline const char* to_string(Slot s) { return s == Slot::plus ? "plus" : "minus"; }

// 2x2 matrix over the Stokes-polynomial ring acting on coefficient pairs
// [c_plus, c_minus]^T, with region labels and dominancy bookkeeping carried
// alongside.  Dominancy is a label supplied by the script author, not inferred
// from geometry.
struct ConnectionMatrix {
    StokesPolynomial e[2][2];
    std::string domain_from, domain_to;
    std::optional<Slot> dominant_in, dominant_out;
    std::string note;

    static ConnectionMatrix identity(std::string from = "", std::string to = "") {
        ConnectionMatrix m;
        m.e[0][0] = StokesPolynomial::constant({1.0, 0.0});
        m.e[1][1] = StokesPolynomial::constant({1.0, 0.0});
        m.domain_from = std::move(from);
        m.domain_to = to.empty() ? m.domain_from : std::move(to);
        return m;
    }

    StokesPolynomial trace() const { return e[0][0] + e[1][1]; }
    StokesPolynomial det() const { return e[0][0] * e[1][1] - e[0][1] * e[1][0]; }

    ConnectionMatrix substituted(const std::map<std::string, cplx>& values) const {
        ConnectionMatrix m = *this;
        for (auto& row : m.e)
            for (auto& p : row) p = p.substitute(values);
        return m;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["entries"] = {{e[0][0].to_json(), e[0][1].to_json()},
                        {e[1][0].to_json(), e[1][1].to_json()}};
        j["domain_from"] = domain_from;
        j["domain_to"] = domain_to;
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

inline ConnectionMatrix matmul(const ConnectionMatrix& a, const ConnectionMatrix& b) {
    ConnectionMatrix c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c.e[i][j] = a.e[i][0] * b.e[0][j] + a.e[i][1] * b.e[1][j];
    c.domain_from = b.domain_from;
    c.domain_to = a.domain_to;
    c.dominant_in = b.dominant_in;
    c.dominant_out = a.dominant_out;
    return c;
}

// Crossing one Stokes line: the subdominant coefficient gains
// direction * s * (dominant coefficient); unit determinant by construction.
inline ConnectionMatrix elementary_stokes_crossing(const std::string& constant_name, int direction,
                                                   Slot dominant, bool conjugated = false,
                                                   std::string from = "", std::string to = "") {
    ConnectionMatrix m = ConnectionMatrix::identity(std::move(from), std::move(to));
    StokesPolynomial s = static_cast<double>(direction >= 0 ? 1 : -1) *
                         StokesPolynomial::variable(constant_name, conjugated);
    if (dominant == Slot::plus)
        m.e[1][0] = s; // c_minus += s * c_plus
    else
        m.e[0][1] = s; // c_plus += s * c_minus
    m.dominant_in = dominant;
    m.dominant_out = dominant;
    m.note = "stokes crossing " + constant_name;
    return m;
}

// Re-anchoring of the WKB basis between anchor points or across a cut:
// diag(phase_factor, 1/phase_factor).  When the move also crosses an
// anti-Stokes line the dominancy label swaps (bookkeeping only).
inline ConnectionMatrix branch_cut_crossing(cplx phase_factor, bool swap_dominancy = false,
                                            std::optional<Slot> dominant_in = std::nullopt,
                                            std::string from = "", std::string to = "") {
    if (phase_factor == cplx{0.0, 0.0})
        throw argument_error("re-anchoring phase factor must be nonzero");
    ConnectionMatrix m = ConnectionMatrix::identity(std::move(from), std::move(to));
    m.e[0][0] = StokesPolynomial::constant(phase_factor);
    m.e[1][1] = StokesPolynomial::constant(1.0 / phase_factor);
    m.dominant_in = dominant_in;
    if (dominant_in) m.dominant_out = swap_dominancy ? flip(*dominant_in) : *dominant_in;
    m.note = "re-anchor";
    return m;
}

// Pure anti-Stokes crossing: identity on coefficients, dominancy label swaps.
inline ConnectionMatrix anti_stokes_swap(Slot dominant_in, std::string from = "",
                                         std::string to = "") {
    ConnectionMatrix m = ConnectionMatrix::identity(std::move(from), std::move(to));
    m.dominant_in = dominant_in;
    m.dominant_out = flip(dominant_in);
    m.note = "anti-stokes swap";
    return m;
}

// Ordered product of elementary steps, applied first-to-last: the result maps
// coefficients in steps.front().domain_from to steps.back().domain_to.
// Adjacent region labels and dominancy labels must chain consistently.
inline ConnectionMatrix compose(const std::vector<ConnectionMatrix>& steps) {
    if (steps.empty()) return ConnectionMatrix::identity();
    ConnectionMatrix acc = steps.front();
    for (size_t i = 1; i < steps.size(); ++i) {
        const ConnectionMatrix& next = steps[i];
        if (!acc.domain_to.empty() && !next.domain_from.empty() &&
            acc.domain_to != next.domain_from)
            throw region_error("step " + std::to_string(i) + " starts in region \"" +
                               next.domain_from + "\" but the previous step ended in \"" +
                               acc.domain_to + "\"");
        if (acc.dominant_out && next.dominant_in && *acc.dominant_out != *next.dominant_in)
            throw region_error("step " + std::to_string(i) + " expects dominant slot " +
                               to_string(*next.dominant_in) + " but the previous step left " +
                               to_string(*acc.dominant_out));
        acc = matmul(next, acc);
    }
    return acc;
}

// Tr(m) - 2 cos(2 pi f1): the polynomial whose vanishing is the exact
// constraint on the Stokes constants for a full turn about the index-f1 point.
inline StokesPolynomial trace_equation(const ConnectionMatrix& m, cplx f1) {
    return m.trace() -
           StokesPolynomial::constant(2.0 * std::cos(2.0 * std::numbers::pi * f1));
}

// --- JSON script loading -----------------------------------------------------
//
// A script is a JSON list of elementary steps:
//   {"stokes":   {"constant":"s-","direction":-1,"dominant":"plus","conj":false}}
//   {"reanchor": {"phase":[re,im],"swap_dominancy":false}}
//   {"swap":     {"dominant":"plus"}}
// Each step may carry optional "from"/"to" region labels.

namespace detail {

inline Slot parse_slot(const nlohmann::json& j, const char* what) {
    std::string s = j.get<std::string>();
    if (s == "plus") return Slot::plus;
    if (s == "minus") return Slot::minus;
    throw argument_error(std::string("script: ") + what + " must be \"plus\" or \"minus\"");
}

} // namespace detail

inline std::vector<ConnectionMatrix> script_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw argument_error("script: expected a JSON array of steps");
    std::vector<ConnectionMatrix> steps;
    for (const auto& step : j) {
        std::string from = step.value("from", std::string{});
        std::string to = step.value("to", std::string{});
        if (step.contains("stokes")) {
            const auto& s = step["stokes"];
            if (!s.contains("constant")) throw argument_error("script: stokes step needs a constant name");
            steps.push_back(elementary_stokes_crossing(
                s["constant"].get<std::string>(), s.value("direction", 1),
                s.contains("dominant") ? detail::parse_slot(s["dominant"], "dominant") : Slot::plus,
                s.value("conj", false), from, to));
        } else if (step.contains("reanchor")) {
            const auto& s = step["reanchor"];
            if (!s.contains("phase") || !s["phase"].is_array() || s["phase"].size() != 2)
                throw argument_error("script: reanchor step needs \"phase\": [re,im]");
            cplx phase{s["phase"][0].get<double>(), s["phase"][1].get<double>()};
            std::optional<Slot> dom;
            if (s.contains("dominant")) dom = detail::parse_slot(s["dominant"], "dominant");
            steps.push_back(
                branch_cut_crossing(phase, s.value("swap_dominancy", false), dom, from, to));
        } else if (step.contains("swap")) {
            const auto& s = step["swap"];
            Slot dom = s.contains("dominant") ? detail::parse_slot(s["dominant"], "dominant")
                                              : Slot::plus;
            steps.push_back(anti_stokes_swap(dom, from, to));
        } else {
            throw argument_error("script: step must be \"stokes\", \"reanchor\" or \"swap\"");
        }
    }
    return steps;
}

} // namespace wkbj
