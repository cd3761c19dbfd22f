#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wkbj/errors.hpp"
#include "wkbj/potential.hpp"

namespace wkbj {

enum class CutSide { none, below, above };

inline const char* to_string(CutSide s) {
    switch (s) {
        case CutSide::below: return "below";
        case CutSide::above: return "above";
        default: return "none";
    }
}

struct LineSeg {
    cplx a, b;
};

struct ArcSeg {
    cplx center;
    double radius;
    double theta_from, theta_to; // radians; counterclockwise when theta_to > theta_from
};

using Segment = std::variant<LineSeg, ArcSeg>;

namespace detail {

inline cplx seg_point(const Segment& s, double t) {
    if (const auto* l = std::get_if<LineSeg>(&s)) return l->a + t * (l->b - l->a);
    const auto& a = std::get<ArcSeg>(s);
    double th = a.theta_from + t * (a.theta_to - a.theta_from);
    return a.center + a.radius * cplx{std::cos(th), std::sin(th)};
}

inline cplx seg_tangent(const Segment& s, double t) {
    if (const auto* l = std::get_if<LineSeg>(&s)) return l->b - l->a;
    const auto& a = std::get<ArcSeg>(s);
    double th = a.theta_from + t * (a.theta_to - a.theta_from);
    double dth = a.theta_to - a.theta_from;
    return a.radius * dth * cplx{-std::sin(th), std::cos(th)};
}

inline double seg_length(const Segment& s) {
    if (const auto* l = std::get_if<LineSeg>(&s)) return std::abs(l->b - l->a);
    const auto& a = std::get<ArcSeg>(s);
    return a.radius * std::abs(a.theta_to - a.theta_from);
}

inline double seg_distance(const Segment& s, cplx p) {
    if (const auto* l = std::get_if<LineSeg>(&s)) {
        cplx d = l->b - l->a;
        double len2 = std::norm(d);
        if (len2 == 0.0) return std::abs(p - l->a);
        double t = std::clamp(((p - l->a) * std::conj(d)).real() / len2, 0.0, 1.0);
        return std::abs(p - (l->a + t * d));
    }
    const auto& a = std::get<ArcSeg>(s);
    cplx rel = p - a.center;
    double r = std::abs(rel);
    if (r == 0.0) return a.radius;
    // Angle of p relative to the swept range.
    double lo = std::min(a.theta_from, a.theta_to);
    double hi = std::max(a.theta_from, a.theta_to);
    double th = std::atan2(rel.imag(), rel.real());
    for (double cand = th - 4.0 * std::numbers::pi; cand <= th + 4.0 * std::numbers::pi + 1e-12;
         cand += 2.0 * std::numbers::pi) {
        if (cand >= lo - 1e-15 && cand <= hi + 1e-15) return std::abs(r - a.radius);
    }
    cplx e1 = a.center + a.radius * cplx{std::cos(a.theta_from), std::sin(a.theta_from)};
    cplx e2 = a.center + a.radius * cplx{std::cos(a.theta_to), std::sin(a.theta_to)};
    return std::min(std::abs(p - e1), std::abs(p - e2));
}

} // namespace detail

// A piecewise path of line and arc segments.  Consecutive segments share
// endpoints exactly: appends snap the incoming start to the current end and
// reject gaps larger than the snap tolerance.
class ContourPath {
public:
    ContourPath() = default;

    static ContourPath line(cplx a, cplx b) {
        ContourPath p;
        p.append(LineSeg{a, b});
        return p;
    }

    static ContourPath polyline(const std::vector<cplx>& pts) {
        if (pts.size() < 2) throw contour_error("polyline needs at least two points");
        ContourPath p;
        for (size_t i = 0; i + 1 < pts.size(); ++i) p.append(LineSeg{pts[i], pts[i + 1]});
        return p;
    }

    // Full counterclockwise circle starting (and ending) at angle theta0.
    static ContourPath circle(cplx center, double radius, double theta0 = 0.0) {
        ContourPath p;
        p.append(ArcSeg{center, radius, theta0, theta0 + 2.0 * std::numbers::pi});
        return p;
    }

    void append(Segment s) {
        if (!segments_.empty()) {
            cplx prev_end = end();
            cplx next_start = detail::seg_point(s, 0.0);
            double scale = std::max({1.0, std::abs(prev_end), std::abs(next_start)});
            if (std::abs(next_start - prev_end) > 1e-9 * scale)
                throw contour_error("segment start does not continue the previous endpoint");
            // Snap so the shared endpoint is bit-identical.
            if (auto* l = std::get_if<LineSeg>(&s)) l->a = prev_end;
        }
        segments_.push_back(std::move(s));
    }

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    size_t size() const noexcept { return segments_.size(); }
    bool empty() const noexcept { return segments_.empty(); }

    CutSide side() const noexcept { return side_; }
    void set_side(CutSide s) noexcept { side_ = s; }

    cplx start() const { return detail::seg_point(segments_.front(), 0.0); }
    cplx end() const { return detail::seg_point(segments_.back(), 1.0); }

    cplx point(size_t i, double t) const { return detail::seg_point(segments_.at(i), t); }
    cplx tangent(size_t i, double t) const { return detail::seg_tangent(segments_.at(i), t); }
    double segment_length(size_t i) const { return detail::seg_length(segments_.at(i)); }

    double length() const {
        double sum = 0.0;
        for (const auto& s : segments_) sum += detail::seg_length(s);
        return sum;
    }

    bool closed() const {
        if (segments_.empty()) return false;
        double scale = std::max(1.0, std::abs(start()));
        return std::abs(start() - end()) <= 1e-9 * scale;
    }

    double distance_to(cplx p) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : segments_) d = std::min(d, detail::seg_distance(s, p));
        return d;
    }

    ContourPath reversed() const {
        ContourPath p;
        p.side_ = side_;
        for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
            if (const auto* l = std::get_if<LineSeg>(&*it))
                p.segments_.push_back(LineSeg{l->b, l->a});
            else {
                const auto& a = std::get<ArcSeg>(*it);
                p.segments_.push_back(ArcSeg{a.center, a.radius, a.theta_to, a.theta_from});
            }
        }
        return p;
    }

    // [{"line": [[re,im],[re,im]]}, {"arc": {"center":[re,im],"r":R,"from":t1,"to":t2}}]
    static ContourPath from_json(const nlohmann::json& j) {
        if (!j.is_array()) throw argument_error("path json: expected an array of segments");
        ContourPath p;
        auto pt = [](const nlohmann::json& v) -> cplx {
            if (!v.is_array() || v.size() != 2)
                throw argument_error("path json: points are [re,im] pairs");
            return {v[0].get<double>(), v[1].get<double>()};
        };
        for (const auto& seg : j) {
            if (seg.contains("line")) {
                const auto& l = seg["line"];
                if (!l.is_array() || l.size() != 2)
                    throw argument_error("path json: \"line\" is [[re,im],[re,im]]");
                p.append(LineSeg{pt(l[0]), pt(l[1])});
            } else if (seg.contains("arc")) {
                const auto& a = seg["arc"];
                p.append(ArcSeg{pt(a.at("center")), a.at("r").get<double>(),
                                a.at("from").get<double>(), a.at("to").get<double>()});
            } else {
                throw argument_error("path json: segment must be \"line\" or \"arc\"");
            }
        }
        if (p.empty()) throw argument_error("path json: empty path");
        return p;
    }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& s : segments_) {
            if (const auto* l = std::get_if<LineSeg>(&s)) {
                j.push_back({{"line", {{l->a.real(), l->a.imag()}, {l->b.real(), l->b.imag()}}}});
            } else {
                const auto& a = std::get<ArcSeg>(s);
                j.push_back({{"arc",
                              {{"center", {a.center.real(), a.center.imag()}},
                               {"r", a.radius},
                               {"from", a.theta_from},
                               {"to", a.theta_to}}}});
            }
        }
        return j;
    }

private:
    std::vector<Segment> segments_;
    CutSide side_ = CutSide::none;
};

// Smallest distance from the path to any pole of Q.
inline double pole_clearance(const LaurentPotential& p, const ContourPath& path) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& pole : p.poles()) d = std::min(d, path.distance_to(pole.location));
    return d;
}

} // namespace wkbj
