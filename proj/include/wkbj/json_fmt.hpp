#pragma once

#include <complex>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wkbj/potential.hpp"

namespace wkbj {

using ojson = nlohmann::ordered_json;

// Fixed 17-significant-digit rendering so identical inputs produce
// byte-identical output and every double survives a parse round trip.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void emit_json(const ojson& j, std::ostream& out) {
    switch (j.type()) {
        case ojson::value_t::object: {
            out << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ',';
                first = false;
                out << nlohmann::json(it.key()).dump() << ':';
                emit_json(it.value(), out);
            }
            out << '}';
            break;
        }
        case ojson::value_t::array: {
            out << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out << ',';
                first = false;
                emit_json(v, out);
            }
            out << ']';
            break;
        }
        case ojson::value_t::number_float:
            out << format_double(j.get<double>());
            break;
        default:
            out << j.dump();
            break;
    }
}

inline std::string emit_json(const ojson& j) {
    std::ostringstream os;
    emit_json(j, os);
    return os.str();
}

inline ojson json_complex(cplx z) { return ojson::array({z.real(), z.imag()}); }

// RFC-style CSV quoting: fields containing separators, quotes or newlines are
// wrapped in double quotes with inner quotes doubled.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

} // namespace wkbj
