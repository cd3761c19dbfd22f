#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wkbj/errors.hpp"
#include "wkbj/potential.hpp"

namespace wkbj {

// A symbolic unknown: a named constant or its complex conjugate.
struct SymVar {
    std::string name;
    bool conj = false;
    auto operator<=>(const SymVar&) const = default;
};

// Product of symbolic variables with positive integer powers, kept sorted.
using SymMonomial = std::vector<std::pair<SymVar, int>>;

namespace detail {

inline SymMonomial monomial_mul(const SymMonomial& a, const SymMonomial& b) {
    SymMonomial out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace detail

// Sparse polynomial in the Stokes constants (and their conjugates) with
// complex coefficients.  The zero polynomial has an empty term map; exact
// zeros produced by ring arithmetic are erased eagerly.
class StokesPolynomial {
public:
    StokesPolynomial() = default;

    static StokesPolynomial zero() { return {}; }

    static StokesPolynomial constant(cplx c) {
        StokesPolynomial p;
        if (c != cplx{0.0, 0.0}) p.terms_[{}] = c;
        return p;
    }

    static StokesPolynomial variable(const std::string& name, bool conj = false) {
        StokesPolynomial p;
        p.terms_[SymMonomial{{SymVar{name, conj}, 1}}] = cplx{1.0, 0.0};
        return p;
    }

    const std::map<SymMonomial, cplx>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    bool is_constant() const noexcept {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }

    cplx constant_value() const {
        if (terms_.empty()) return {0.0, 0.0};
        if (!is_constant())
            throw argument_error("polynomial still contains symbolic variables");
        return terms_.begin()->second;
    }

    // Support is exactly the constant monomial and the coefficient is 1 to tol.
    bool is_one(double tol = 0.0) const {
        StokesPolynomial d = *this - constant(cplx{1.0, 0.0});
        return d.max_coefficient() <= tol;
    }

    double max_coefficient() const noexcept {
        double m = 0.0;
        for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    StokesPolynomial& operator+=(const StokesPolynomial& o) {
        for (const auto& [mono, c] : o.terms_) add_term(mono, c);
        return *this;
    }
    StokesPolynomial& operator-=(const StokesPolynomial& o) {
        for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
        return *this;
    }

    friend StokesPolynomial operator+(StokesPolynomial a, const StokesPolynomial& b) {
        a += b;
        return a;
    }
    friend StokesPolynomial operator-(StokesPolynomial a, const StokesPolynomial& b) {
        a -= b;
        return a;
    }
    StokesPolynomial operator-() const {
        StokesPolynomial p;
        for (const auto& [mono, c] : terms_) p.terms_[mono] = -c;
        return p;
    }

    friend StokesPolynomial operator*(const StokesPolynomial& a, const StokesPolynomial& b) {
        StokesPolynomial p;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                p.add_term(detail::monomial_mul(ma, mb), ca * cb);
        return p;
    }

    friend StokesPolynomial operator*(cplx s, const StokesPolynomial& a) {
        StokesPolynomial p;
        if (s == cplx{0.0, 0.0}) return p;
        for (const auto& [mono, c] : a.terms_) p.terms_[mono] = s * c;
        return p;
    }
    friend StokesPolynomial operator*(const StokesPolynomial& a, cplx s) { return s * a; }

    // Involution: conjugate the coefficients and swap each variable with its
    // conjugate partner.
    StokesPolynomial conjugated() const {
        StokesPolynomial p;
        for (const auto& [mono, c] : terms_) {
            SymMonomial m = mono;
            for (auto& [var, pow] : m) var.conj = !var.conj;
            std::sort(m.begin(), m.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            p.add_term(m, std::conj(c));
        }
        return p;
    }

    // Substitutes numeric values; a name bound to v also binds its conjugate
    // variable to conj(v).  Unbound variables stay symbolic.
    StokesPolynomial substitute(const std::map<std::string, cplx>& values) const {
        StokesPolynomial p;
        for (const auto& [mono, c] : terms_) {
            cplx coef = c;
            SymMonomial rest;
            for (const auto& [var, pow] : mono) {
                auto it = values.find(var.name);
                if (it == values.end()) {
                    rest.emplace_back(var, pow);
                    continue;
                }
                cplx v = var.conj ? std::conj(it->second) : it->second;
                for (int k = 0; k < pow; ++k) coef *= v;
            }
            p.add_term(rest, coef);
        }
        return p;
    }

    StokesPolynomial pruned(double tol) const {
        StokesPolynomial p;
        for (const auto& [mono, c] : terms_)
            if (std::abs(c) > tol) p.terms_[mono] = c;
        return p;
    }

    // Term-map comparison: every monomial coefficient of a - b within atol.
    bool equals_within(const StokesPolynomial& o, double atol) const {
        return (*this - o).max_coefficient() <= atol;
    }

    bool operator==(const StokesPolynomial& o) const noexcept { return terms_ == o.terms_; }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [mono, c] : terms_) {
            if (!first) out += " + ";
            first = false;
            out += "(" + format_c(c) + ")";
            for (const auto& [var, pow] : mono) {
                out += " " + var.name + (var.conj ? "*" : "");
                if (pow != 1) out += "^" + std::to_string(pow);
            }
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [mono, c] : terms_) {
            nlohmann::json vars = nlohmann::json::array();
            for (const auto& [var, pow] : mono)
                vars.push_back({{"name", var.name}, {"conj", var.conj}, {"power", pow}});
            terms.push_back({{"coef", {c.real(), c.imag()}}, {"monomial", vars}});
        }
        return terms;
    }

private:
    static std::string format_c(cplx c) {
        return std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") + std::to_string(c.imag()) +
               "i";
    }

    void add_term(const SymMonomial& mono, cplx c) {
        if (c == cplx{0.0, 0.0}) return;
        auto [it, inserted] = terms_.emplace(mono, c);
        if (!inserted) {
            it->second += c;
            if (it->second == cplx{0.0, 0.0}) terms_.erase(it);
        }
    }

    std::map<SymMonomial, cplx> terms_;
};

} // namespace wkbj
