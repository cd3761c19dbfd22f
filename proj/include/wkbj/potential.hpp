#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wkbj/errors.hpp"

namespace wkbj {

using cplx = std::complex<double>;

// Integer power of a complex number; negative exponents go through 1/z.
inline cplx cpow_int(cplx z, int k) {
    if (k == 0) return {1.0, 0.0};
    bool neg = k < 0;
    unsigned long long n = neg ? static_cast<unsigned long long>(-(long long)k)
                               : static_cast<unsigned long long>(k);
    cplx base = neg ? 1.0 / z : z;
    cplx acc{1.0, 0.0};
    while (n) {
        if (n & 1ull) acc *= base;
        base *= base;
        n >>= 1ull;
    }
    return acc;
}

struct Pole {
    cplx location;
    int order;
};

// A potential Q(z) given as a finite Laurent polynomial sum c_k z^k.
// Negative exponents place the single pole at the origin; the pole list and
// the zero set are derived from the term map.
class LaurentPotential {
public:
    LaurentPotential() = default;

    explicit LaurentPotential(std::map<int, cplx> terms, std::string description = "")
        : description_(std::move(description)) {
        for (const auto& [k, c] : terms)
            if (c != cplx{0.0, 0.0}) terms_.emplace(k, c);
    }

    // Q(z) = 1 + c/z
    static LaurentPotential budden(double c) {
        return LaurentPotential({{0, cplx{1.0, 0.0}}, {-1, cplx{c, 0.0}}},
                                "budden c=" + std::to_string(c));
    }

    // Grammar: sum of `coef*z^k` terms with integer k, e.g. "1 + 2.5*z^-1".
    // A term may omit the coefficient ("z^2", "-z") or the power part ("3").
    static LaurentPotential parse(std::string_view text);

    // {"terms":[{"c":[re,im],"k":int}, ...]}
    static LaurentPotential from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    const std::map<int, cplx>& terms() const noexcept { return terms_; }
    const std::string& description() const noexcept { return description_; }
    bool empty() const noexcept { return terms_.empty(); }

    int min_exponent() const noexcept { return terms_.empty() ? 0 : terms_.begin()->first; }
    int max_exponent() const noexcept { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    cplx laurent_coefficient(int k) const noexcept {
        auto it = terms_.find(k);
        return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
    }

    std::vector<Pole> poles() const {
        std::vector<Pole> p;
        if (min_exponent() < 0) p.push_back({cplx{0.0, 0.0}, -min_exponent()});
        return p;
    }

    // Distance below which z counts as sitting on a pole.
    double pole_tolerance(cplx z) const noexcept {
        return eps_pole_ * std::max(1.0, std::abs(z));
    }

    bool near_pole(cplx z) const noexcept {
        for (const auto& p : poles())
            if (std::abs(z - p.location) < pole_tolerance(z)) return true;
        return false;
    }

    cplx evaluate(cplx z) const {
        if (near_pole(z))
            throw pole_evaluation_error("evaluation point within eps_pole of a pole of Q");
        return evaluate_unchecked(z);
    }

    cplx evaluate_unchecked(cplx z) const noexcept {
        cplx sum{0.0, 0.0};
        for (const auto& [k, c] : terms_) sum += c * cpow_int(z, k);
        return sum;
    }

    // d-th derivative, term by term: sum c_k k(k-1)...(k-d+1) z^{k-d}.
    cplx derivative(cplx z, int order = 1) const {
        if (near_pole(z))
            throw pole_evaluation_error("derivative requested within eps_pole of a pole of Q");
        cplx sum{0.0, 0.0};
        for (const auto& [k, c] : terms_) {
            double fac = 1.0;
            for (int d = 0; d < order; ++d) fac *= static_cast<double>(k - d);
            if (fac != 0.0) sum += c * fac * cpow_int(z, k - order);
        }
        return sum;
    }

    // All roots of Q(z) = 0, each repeated with its multiplicity.
    std::vector<cplx> turning_points(double tol_root = 1e-9) const;

    // |eps| with eps = (5/16) Q'^2 / Q^3 - (1/4) Q'' / Q^2, the lowest-order
    // validity measure of the q = sqrt(Q) approximation. Computed from the
    // analytic term-wise derivatives.
    double wkb_validity(cplx z) const {
        if (near_pole(z))
            throw singular_point_error("validity measure undefined at a pole of Q");
        cplx q0 = evaluate_unchecked(z);
        if (q0 == cplx{0.0, 0.0})
            throw singular_point_error("validity measure undefined at a zero of Q");
        cplx q1 = derivative(z, 1);
        cplx q2 = derivative(z, 2);
        cplx eps = (5.0 / 16.0) * q1 * q1 / (q0 * q0 * q0) - 0.25 * q2 / (q0 * q0);
        return std::abs(eps);
    }

    void set_eps_pole(double e) noexcept { eps_pole_ = e; }
    double eps_pole() const noexcept { return eps_pole_; }

    bool operator==(const LaurentPotential& o) const noexcept { return terms_ == o.terms_; }

private:
    std::map<int, cplx> terms_;
    std::string description_;
    double eps_pole_ = 1e-9;
};

namespace detail {

// Durand-Kerner iteration for all roots of a dense polynomial with complex
// coefficients (ascending order, coeffs.back() != 0).
inline std::vector<cplx> all_roots(const std::vector<cplx>& coeffs, double tol) {
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (deg <= 0) return {};
    if (deg == 1) return {-coeffs[0] / coeffs[1]};

    auto eval = [&](cplx z) {
        cplx v{0.0, 0.0};
        for (int i = deg; i >= 0; --i) v = v * z + coeffs[i];
        return v;
    };

    // Cauchy-style bound on root magnitude.
    double bound = 0.0;
    for (int i = 0; i < deg; ++i)
        bound = std::max(bound, std::abs(coeffs[i] / coeffs[deg]));
    bound = 1.0 + bound;

    std::vector<cplx> r(deg);
    const cplx seed{0.4, 0.9}; // deliberately off the axes
    cplx p{1.0, 0.0};
    for (int i = 0; i < deg; ++i) {
        p *= seed;
        r[i] = p * bound;
    }

    const int max_iter = 500;
    for (int iter = 0; iter < max_iter; ++iter) {
        double shift = 0.0;
        for (int i = 0; i < deg; ++i) {
            cplx denom{1.0, 0.0};
            for (int j = 0; j < deg; ++j)
                if (j != i) denom *= (r[i] - r[j]);
            if (denom == cplx{0.0, 0.0}) {
                r[i] += cplx{1e-8, 1e-8} * bound;
                shift = 1.0;
                continue;
            }
            cplx d = eval(r[i]) / denom;
            r[i] -= d;
            shift = std::max(shift, std::abs(d));
        }
        if (shift < 1e-15 * bound) break;
        if (iter == max_iter - 1 && !(shift <= std::sqrt(tol) * bound))
            throw root_finding_error("root iteration failed to converge near |z| <= " +
                                     std::to_string(bound));
    }
    for (const auto& root : r)
        if (!std::isfinite(root.real()) || !std::isfinite(root.imag()))
            throw root_finding_error("root iteration diverged");
    return r;
}

} // namespace detail

inline std::vector<cplx> LaurentPotential::turning_points(double tol_root) const {
    if (terms_.empty())
        throw root_finding_error("zero potential has no isolated turning points");
    // Q(z) = z^{kmin} * P(z) with P(0) != 0; zeros of Q are the roots of P,
    // plus the origin itself (kmin-fold) when every exponent is positive.
    const int kmin = min_exponent();
    const int kmax = max_exponent();
    std::vector<cplx> coeffs(static_cast<size_t>(kmax - kmin) + 1, cplx{0.0, 0.0});
    for (const auto& [k, c] : terms_) coeffs[static_cast<size_t>(k - kmin)] = c;

    std::vector<cplx> roots = detail::all_roots(coeffs, tol_root);
    for (int m = 0; m < kmin; ++m) roots.push_back(cplx{0.0, 0.0});
    if (roots.empty()) return {};

    // Collapse clusters so multiple roots come out as repeated copies of the
    // cluster centroid.
    double scale = 1.0;
    for (const auto& z : roots) scale = std::max(scale, std::abs(z));
    const double cluster = 1e-6 * scale;

    std::vector<cplx> out;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        cplx sum = roots[i];
        int count = 1;
        used[i] = true;
        for (size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) < cluster) {
                sum += roots[j];
                ++count;
                used[j] = true;
            }
        }
        cplx center = sum / static_cast<double>(count);
        for (int m = 0; m < count; ++m) out.push_back(center);
    }

    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    for (const auto& root : out) {
        double local = std::max(1.0, std::abs(root));
        if (!(std::abs(evaluate_unchecked(root)) <= std::sqrt(tol_root) * local))
            throw root_finding_error("turning-point residual too large near z = (" +
                                     std::to_string(root.real()) + ", " +
                                     std::to_string(root.imag()) + ")");
    }
    return out;
}

// --- parsing ---------------------------------------------------------------

namespace detail {

struct PotentialParser {
    std::string_view s;
    size_t i = 0;

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eof() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }

    double number() {
        skip_ws();
        size_t start = i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        bool digits = false;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
            digits = true;
            ++i;
        }
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            size_t mark = i;
            ++i;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
            bool exp_digits = false;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                exp_digits = true;
                ++i;
            }
            if (!exp_digits) i = mark;
        }
        if (!digits) throw argument_error("potential: expected a number at position " +
                                          std::to_string(start));
        return std::stod(std::string(s.substr(start, i - start)));
    }

    int integer() {
        skip_ws();
        size_t start = i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        bool digits = false;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            digits = true;
            ++i;
        }
        if (!digits) throw argument_error("potential: expected an integer exponent at position " +
                                          std::to_string(start));
        return std::stoi(std::string(s.substr(start, i - start)));
    }

    // term := number ['*' zpow] | [sign] zpow ; zpow := 'z' ['^' int]
    void term(std::map<int, cplx>& acc, double sign) {
        skip_ws();
        double coef = 1.0;
        bool have_coef = false;
        if (peek() != 'z') {
            coef = number();
            have_coef = true;
        }
        int k = 0;
        skip_ws();
        if (i < s.size() && s[i] == '*') {
            ++i;
            skip_ws();
            if (peek() != 'z') throw argument_error("potential: expected z after '*'");
        }
        if (peek() == 'z') {
            ++i;
            k = 1;
            skip_ws();
            if (i < s.size() && s[i] == '^') {
                ++i;
                k = integer();
            }
        } else if (!have_coef) {
            throw argument_error("potential: empty term");
        }
        acc[k] += sign * coef;
    }
};

} // namespace detail

inline LaurentPotential LaurentPotential::parse(std::string_view text) {
    detail::PotentialParser p{text};
    std::map<int, cplx> acc;
    double sign = 1.0;
    if (p.peek() == '+' || p.peek() == '-') {
        sign = (p.s[p.i] == '-') ? -1.0 : 1.0;
        ++p.i;
    }
    if (p.eof()) throw argument_error("potential: empty expression");
    p.term(acc, sign);
    while (!p.eof()) {
        char c = p.peek();
        if (c == '+' || c == '-') {
            ++p.i;
            p.term(acc, c == '-' ? -1.0 : 1.0);
        } else {
            throw argument_error(std::string("potential: unexpected character '") + c + "'");
        }
    }
    return LaurentPotential(std::move(acc), std::string(text));
}

inline LaurentPotential LaurentPotential::from_json(const nlohmann::json& j) {
    if (!j.contains("terms") || !j["terms"].is_array())
        throw argument_error("potential json: missing \"terms\" array");
    std::map<int, cplx> acc;
    for (const auto& t : j["terms"]) {
        if (!t.contains("c") || !t.contains("k"))
            throw argument_error("potential json: each term needs \"c\" and \"k\"");
        const auto& c = t["c"];
        cplx coef;
        if (c.is_array() && c.size() == 2)
            coef = cplx{c[0].get<double>(), c[1].get<double>()};
        else if (c.is_number())
            coef = cplx{c.get<double>(), 0.0};
        else
            throw argument_error("potential json: \"c\" must be [re,im] or a number");
        acc[t["k"].get<int>()] += coef;
    }
    std::string desc = j.value("description", std::string{});
    return LaurentPotential(std::move(acc), std::move(desc));
}

inline nlohmann::json LaurentPotential::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, c] : terms_)
        terms.push_back({{"c", {c.real(), c.imag()}}, {"k", k}});
    nlohmann::json j{{"terms", terms}};
    if (!description_.empty()) j["description"] = description_;
    return j;
}

} // namespace wkbj
