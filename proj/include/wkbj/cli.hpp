#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wkbj/budden.hpp"
#include "wkbj/config.hpp"
#include "wkbj/connection.hpp"
#include "wkbj/errors.hpp"
#include "wkbj/frobenius.hpp"
#include "wkbj/json_fmt.hpp"
#include "wkbj/monodromy.hpp"
#include "wkbj/ode.hpp"
#include "wkbj/path.hpp"
#include "wkbj/potential.hpp"
#include "wkbj/quadrature.hpp"
#include "wkbj/stokes_lines.hpp"

namespace wkbj::cli {

inline cplx parse_complex(const std::string& s) {
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            parts.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw argument_error("cannot parse '" + s + "' as a complex number (use re or re,im)");
        }
    }
    if (parts.size() == 1) return {parts[0], 0.0};
    if (parts.size() == 2) return {parts[0], parts[1]};
    throw argument_error("cannot parse '" + s + "' as a complex number (use re or re,im)");
}

inline std::pair<cplx, cplx> parse_weights(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw argument_error("cannot parse weights '" + s + "'");
        }
    }
    if (v.size() == 2) return {cplx{v[0], 0.0}, cplx{v[1], 0.0}};
    if (v.size() == 4) return {cplx{v[0], v[1]}, cplx{v[2], v[3]}};
    throw argument_error("weights must be A,B (real) or Are,Aim,Bre,Bim");
}

inline LaurentPotential load_potential(const std::string& spec) {
    std::string trimmed = spec;
    size_t b = trimmed.find_first_not_of(" \t");
    if (b == std::string::npos) throw argument_error("empty potential specification");
    if (trimmed[b] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(trimmed);
        } catch (const nlohmann::json::exception& e) {
            throw argument_error("potential JSON parse failure: " + std::string(e.what()));
        }
        return LaurentPotential::from_json(j);
    }
    return LaurentPotential::parse(trimmed);
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open file: " + path);
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw argument_error("JSON parse failure in " + path + ": " + std::string(e.what()));
    }
}

inline void print_error_record(std::ostream& err, const std::string& category,
                               const std::string& message) {
    ojson rec;
    rec["error"] = category;
    rec["message"] = message;
    emit_json(rec, err);
    err << '\n';
}

struct CliState {
    RunConfig cfg;
    std::ostream& out;
    std::ostream& err;
};

namespace detail {

inline void emit_result(const ojson& j, std::ostream& out) {
    emit_json(j, out);
    out << '\n';
}

inline void run_frobenius(CliState& st, const std::string& pot_spec, int order,
                          const std::string& at, const std::string& weights, int sheet) {
    LaurentPotential p = load_potential(pot_spec);
    FrobeniusSolution s = build_series(p, order);
    ojson j;
    j["f1"] = json_complex(s.f1);
    j["f2"] = json_complex(s.f2);
    j["K"] = json_complex(s.K);
    if (!at.empty()) {
        auto [A, B] = parse_weights(weights.empty() ? "1,0" : weights);
        FrobeniusEval e = evaluate_frobenius(s, A, B, parse_complex(at), sheet);
        j["y"] = json_complex(e.y);
        j["dy"] = json_complex(e.dy);
    }
    if (st.cfg.format == "csv") {
        st.out << "f1_re,f1_im,f2_re,f2_im,K_re,K_im";
        if (j.contains("y")) st.out << ",y_re,y_im,dy_re,dy_im";
        st.out << '\n'
               << format_double(s.f1.real()) << ',' << format_double(s.f1.imag()) << ','
               << format_double(s.f2.real()) << ',' << format_double(s.f2.imag()) << ','
               << format_double(s.K.real()) << ',' << format_double(s.K.imag());
        if (j.contains("y")) {
            st.out << ',' << format_double(j["y"][0].get<double>()) << ','
                   << format_double(j["y"][1].get<double>()) << ','
                   << format_double(j["dy"][0].get<double>()) << ','
                   << format_double(j["dy"][1].get<double>());
        }
        st.out << '\n';
        return;
    }
    emit_result(j, st.out);
}

inline void run_phase_integral(CliState& st, const std::string& pot_spec,
                               const std::string& path_file, const std::string& side,
                               const std::string& seed) {
    LaurentPotential p = load_potential(pot_spec);
    ContourPath path = ContourPath::from_json(load_json_file(path_file));
    CutSide cs = CutSide::none;
    if (side == "below") cs = CutSide::below;
    else if (side == "above") cs = CutSide::above;
    else if (side != "none") throw argument_error("--side must be below, above or none");
    path.set_side(cs);

    std::optional<PhaseIntegrand> q;
    if (!seed.empty()) {
        cplx z0 = parse_complex(seed);
        q = PhaseIntegrand::on_side(p, z0, cs);
    } else {
        // Pick the first path sample where Q is comfortably regular.
        for (size_t i = 0; i < path.size() && !q; ++i) {
            for (int k = 1; k < 64 && !q; ++k) {
                cplx z0 = path.point(i, static_cast<double>(k) / 64.0);
                try {
                    cplx qv = p.evaluate(z0);
                    if (std::abs(qv) > 1e-10) q = PhaseIntegrand::on_side(p, z0, cs);
                } catch (const numeric_error&) {
                }
            }
        }
        if (!q) throw branch_point_error("no regular point found on the path to seed the branch");
    }

    QuadResult res = phase_integral_ex(*q, path, st.cfg.tol_quad);
    cplx e = std::exp(cplx{0.0, 1.0} * res.value);
    ojson j;
    j["integral"] = json_complex(res.value);
    j["exp_i_integral"] = json_complex(e);
    j["error_estimate"] = res.error_estimate;
    j["intervals"] = res.intervals;
    if (st.cfg.format == "csv") {
        st.out << "integral_re,integral_im,exp_re,exp_im\n"
               << format_double(res.value.real()) << ',' << format_double(res.value.imag()) << ','
               << format_double(e.real()) << ',' << format_double(e.imag()) << '\n';
        return;
    }
    emit_result(j, st.out);
}

inline void run_monodromy(CliState& st, const std::string& pot_spec, double radius,
                          const std::string& base, const std::string& center_s,
                          const std::string& report) {
    if (report != "json") throw argument_error("--report supports only json");
    LaurentPotential p = load_potential(pot_spec);
    cplx center = center_s.empty() ? cplx{0.0, 0.0} : parse_complex(center_s);
    cplx base_pt;
    if (!base.empty()) {
        base_pt = parse_complex(base);
        double rb = std::abs(base_pt - center);
        if (radius > 0.0 && std::abs(rb - radius) > 1e-9 * std::max(1.0, radius))
            throw argument_error("--base is not at --radius from the contour center");
        radius = rb;
    } else {
        if (radius <= 0.0) throw argument_error("--radius must be positive");
        base_pt = center + cplx{radius, 0.0};
    }
    double theta0 = std::arg(base_pt - center);
    ContourPath contour = ContourPath::circle(center, radius, theta0);

    OdeOptions opt;
    opt.rtol = st.cfg.tol_ode;
    RotationMatrix m = numerical_monodromy(p, contour, base_pt, opt);
    cplx q2 = p.laurent_coefficient(-2);
    auto [f1, f2] = indicial_roots(q2);
    Eigenstructure es = eigenstructure(m, f1);

    double max_eps = -1.0;
    for (int k = 0; k < 256; ++k) {
        try {
            double e = p.wkb_validity(contour.point(0, (k + 0.5) / 256.0));
            if (std::isfinite(e)) max_eps = std::max(max_eps, e);
        } catch (const numeric_error&) {
        }
    }

    ojson j;
    j["matrix"] = {{json_complex(m.m[0][0]), json_complex(m.m[0][1])},
                   {json_complex(m.m[1][0]), json_complex(m.m[1][1])}};
    j["trace"] = json_complex(m.trace());
    j["det"] = json_complex(m.det());
    j["eigenvalues"] = {json_complex(es.lambda1), json_complex(es.lambda2)};
    j["diagonalizable"] = es.diagonalizable;
    j["f1_prediction"] = json_complex(f1);
    j["residual"] = json_complex(trace_relation_check(m, f1));
    if (max_eps >= 0.0)
        j["max_wkb_validity_on_contour"] = max_eps;
    else
        j["max_wkb_validity_on_contour"] = nullptr;
    emit_result(j, st.out);
}

inline void run_stokes_diagram(CliState& st, const std::string& pot_spec, const std::string& out_file,
                               const std::string& from_s, double max_len, double escape,
                               const std::string& naming) {
    LaurentPotential p = load_potential(pot_spec);
    TraceOptions opt;
    opt.max_len = max_len;
    opt.escape_radius = escape;

    std::vector<cplx> origins;
    if (!from_s.empty()) {
        origins.push_back(parse_complex(from_s));
    } else {
        auto tps = p.turning_points(st.cfg.tol_root);
        for (size_t i = 0; i < tps.size(); ++i)
            if (i == 0 || std::abs(tps[i] - tps[i - 1]) > 1e-9) origins.push_back(tps[i]);
    }
    if (origins.empty()) throw argument_error("potential has no turning points to trace from");

    const bool flip_names = naming == "oscillatory";
    auto kind_name = [&](LineKind k) {
        bool is_stokes = (k == LineKind::stokes) != flip_names;
        return is_stokes ? "stokes" : "anti_stokes";
    };

    std::ostringstream csv;
    csv << "line_id,kind,re,im\n";
    int line_id = 0;
    int n_lines = 0;
    for (cplx origin : origins) {
        auto lines = trace_stokes_lines(p, origin, opt);
        for (const auto& line : lines) {
            for (const auto& pt : line.points)
                csv << line_id << ',' << csv_field(kind_name(line.kind)) << ','
                    << format_double(pt.real()) << ',' << format_double(pt.imag()) << '\n';
            ++line_id;
            ++n_lines;
        }
    }

    if (out_file.empty() || out_file == "-") {
        st.out << csv.str();
        return;
    }
    std::ofstream f(out_file);
    if (!f) throw argument_error("cannot open output file: " + out_file);
    f << csv.str();
    ojson j;
    j["lines"] = n_lines;
    j["file"] = out_file;
    emit_result(j, st.out);
}

inline void run_connection(CliState& st, const std::string& script_file, const std::string& f1_s) {
    auto steps = script_from_json(load_json_file(script_file));
    ConnectionMatrix m = compose(steps);
    ojson j;
    j["entries"] = {{ojson(m.e[0][0].to_json()), ojson(m.e[0][1].to_json())},
                    {ojson(m.e[1][0].to_json()), ojson(m.e[1][1].to_json())}};
    j["trace"] = ojson(m.trace().to_json());
    j["det"] = ojson(m.det().to_json());
    j["domain_from"] = m.domain_from;
    j["domain_to"] = m.domain_to;
    if (!f1_s.empty()) {
        cplx f1 = parse_complex(f1_s);
        j["trace_equation"] = ojson(trace_equation(m, f1).to_json());
    }
    emit_result(j, st.out);
}

inline ojson scattering_json(const ScatteringResult& r) {
    ojson j;
    j["c"] = r.c;
    j["method"] = to_string(r.method);
    j["R_abs"] = r.R_abs;
    j["T_abs"] = r.T_abs;
    j["A"] = r.A;
    j["phase_known"] = r.phase_known;
    if (r.R) j["R"] = json_complex(*r.R);
    if (r.T) j["T"] = json_complex(*r.T);
    return j;
}

inline void run_budden(CliState& st, double c, const std::string& method, double radius,
                       double tol) {
    std::vector<ScatteringResult> results;
    if (method == "exact" || method == "all") results.push_back(exact_scattering(c));
    if (method == "isolated" || method == "all")
        results.push_back(isolated_singularity_scattering(c));
    if (method == "numerical" || method == "all")
        results.push_back(numerical_scattering(c, radius, tol, st.cfg.tol_quad, st.cfg.tol_ode));
    if (results.empty())
        throw argument_error("--method must be exact, isolated, numerical or all");

    for (const auto& r : results)
        for (const auto& w : r.warnings) print_error_record(st.err, "warning", w);

    if (st.cfg.format == "csv") {
        st.out << "c,method,R_abs,T_abs,A\n";
        for (const auto& r : results)
            st.out << format_double(r.c) << ',' << csv_field(to_string(r.method)) << ','
                   << format_double(r.R_abs) << ',' << format_double(r.T_abs) << ','
                   << format_double(r.A) << '\n';
        return;
    }
    if (results.size() == 1) {
        emit_result(scattering_json(results[0]), st.out);
    } else {
        ojson j;
        j["results"] = ojson::array();
        for (const auto& r : results) j["results"].push_back(scattering_json(r));
        emit_result(j, st.out);
    }
}

inline void run_budden_sweep(CliState& st, double from, double to, int n, bool numerical,
                             double radius, double tol, const std::string& out_file) {
    auto rows = comparison_sweep(from, to, n, numerical, radius, tol);
    std::ostringstream csv;
    csv << "c,A_exact,A_isolated";
    if (numerical) csv << ",A_numerical";
    csv << '\n';
    for (const auto& r : rows) {
        csv << format_double(r.c) << ',' << format_double(r.A_exact) << ','
            << format_double(r.A_isolated);
        if (numerical) csv << ',' << format_double(r.A_numerical.value());
        csv << '\n';
    }

    if (st.cfg.format == "json" && out_file.empty()) {
        ojson j;
        j["rows"] = ojson::array();
        for (const auto& r : rows) {
            ojson row;
            row["c"] = r.c;
            row["A_exact"] = r.A_exact;
            row["A_isolated"] = r.A_isolated;
            if (r.A_numerical) row["A_numerical"] = *r.A_numerical;
            j["rows"].push_back(row);
        }
        emit_result(j, st.out);
        return;
    }
    if (out_file.empty() || out_file == "-") {
        st.out << csv.str();
        return;
    }
    std::ofstream f(out_file);
    if (!f) throw argument_error("cannot open output file: " + out_file);
    f << csv.str();
    ojson j;
    j["rows"] = static_cast<int>(rows.size());
    j["file"] = out_file;
    emit_result(j, st.out);
}

} // namespace detail

// Parses argv (without the program name) and runs one subcommand.
// Returns the process exit code: 0 success, 1 numerical failure, 2 bad usage.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase-integral toolkit for y'' + Q(z) y = 0 with a regular singular point"};
    app.name("wkbj");
    app.require_subcommand(0, 1);

    RunConfig cfg;
    if (const char* env = std::getenv("WKBJ_CONFIG"); env && *env) {
        try {
            cfg.merge_file(env);
        } catch (const argument_error& e) {
            print_error_record(err, "argument", e.what());
            return 2;
        }
    }

    std::string config_file;
    double tol_quad = cfg.tol_quad, tol_ode = cfg.tol_ode, tol_root = cfg.tol_root;
    std::string format = cfg.format;
    int verbosity = cfg.verbosity;
    app.add_option("--config", config_file, "JSON config file (flags win over file values)");
    auto* o_tq = app.add_option("--tol-quad", tol_quad, "quadrature tolerance");
    auto* o_to = app.add_option("--tol-ode", tol_ode, "ODE integrator relative tolerance");
    auto* o_tr = app.add_option("--tol-root", tol_root, "root-finding tolerance");
    auto* o_fmt = app.add_option("--format", format, "output format: json or csv");
    auto* o_vb = app.add_option("-v,--verbosity", verbosity, "diagnostic verbosity");
    app.fallthrough(true);

    // frobenius
    std::string fr_pot, fr_at, fr_weights;
    int fr_order = 64, fr_sheet = 0;
    auto* fr = app.add_subcommand("frobenius", "series solution about the origin");
    fr->add_option("--potential", fr_pot, "potential Q(z)")->required();
    fr->add_option("--order", fr_order, "truncation order N");
    fr->add_option("--at", fr_at, "evaluation point (re or re,im)");
    fr->add_option("--weights", fr_weights, "A,B weights of y1, y2");
    fr->add_option("--sheet", fr_sheet, "winding count for z^f and ln z");

    // phase-integral
    std::string pi_pot, pi_path, pi_side = "none", pi_seed;
    auto* pi = app.add_subcommand("phase-integral", "integral of sqrt(Q) along a path");
    pi->add_option("--potential", pi_pot, "potential Q(z)")->required();
    pi->add_option("--path", pi_path, "path JSON file")->required();
    pi->add_option("--side", pi_side, "branch side for cut-hugging paths: below|above|none");
    pi->add_option("--seed", pi_seed, "branch seed point on the path (re or re,im)");

    // monodromy
    std::string mo_pot, mo_base, mo_center, mo_report = "json";
    double mo_radius = 0.0;
    auto* mo = app.add_subcommand("monodromy", "numerical full-turn matrix on a circle");
    mo->add_option("--potential", mo_pot, "potential Q(z)")->required();
    mo->add_option("--radius", mo_radius, "circle radius");
    mo->add_option("--base", mo_base, "base point on the circle (re or re,im)");
    mo->add_option("--center", mo_center, "circle center, default origin");
    mo->add_option("--report", mo_report, "report format (json)");

    // stokes-diagram
    std::string sd_pot, sd_out, sd_from, sd_naming = "dominant";
    double sd_maxlen = 60.0, sd_escape = 25.0;
    auto* sd = app.add_subcommand("stokes-diagram", "trace lines from turning points");
    sd->add_option("--potential", sd_pot, "potential Q(z)")->required();
    sd->add_option("--out", sd_out, "CSV output file ('-' for stdout)");
    sd->add_option("--from", sd_from, "trace only from this turning point");
    sd->add_option("--max-len", sd_maxlen, "maximum arclength per line");
    sd->add_option("--escape", sd_escape, "radius treated as infinity");
    sd->add_option("--naming", sd_naming,
                   "'dominant' names the maximal-dominancy curves stokes (default); "
                   "'oscillatory' flips the two names");

    // connection
    std::string cn_script, cn_f1;
    auto* cn = app.add_subcommand("connection", "compose a symbolic continuation script");
    cn->add_option("--script", cn_script, "JSON script of elementary steps")->required();
    cn->add_option("--f1", cn_f1, "emit the trace equation for this index");

    // budden
    double bd_c = 0.0, bd_radius = cfg.radius, bd_tol = 1e-3;
    std::string bd_method = "exact";
    auto* bd = app.add_subcommand("budden", "penetration and absorption for Q = 1 + c/z");
    auto* bd_c_opt = bd->add_option("--c", bd_c, "potential parameter c > 0");
    bd->add_option("--method", bd_method, "exact | isolated | numerical | all");
    auto* bd_r_opt = bd->add_option("--radius", bd_radius, "matching radius for the oracle");
    bd->add_option("--tol", bd_tol, "target tolerance of the oracle");

    double sw_from = 0.0, sw_to = 0.0;
    int sw_n = 0;
    bool sw_numerical = false;
    std::string sw_out;
    auto* sw = bd->add_subcommand("sweep", "absorption comparison over a c grid");
    sw->add_option("--from", sw_from, "lower end of the c grid")->required();
    sw->add_option("--to", sw_to, "upper end of the c grid")->required();
    sw->add_option("--n", sw_n, "number of grid points")->required();
    sw->add_flag("--numerical", sw_numerical, "add the numerical-oracle column");
    sw->add_option("--out", sw_out, "CSV output file ('-' for stdout)");

    std::vector<const char*> argv;
    argv.push_back("wkbj");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        print_error_record(err, "argument", e.what());
        err << app.help();
        return 2;
    }

    if (app.get_subcommands().empty()) {
        print_error_record(err, "argument", "a subcommand is required");
        err << app.help();
        return 2;
    }

    try {
        if (!config_file.empty()) cfg.merge_file(config_file);
        if (o_tq->count()) cfg.tol_quad = tol_quad;
        if (o_to->count()) cfg.tol_ode = tol_ode;
        if (o_tr->count()) cfg.tol_root = tol_root;
        if (o_fmt->count()) cfg.format = format;
        if (o_vb->count()) cfg.verbosity = verbosity;
        cfg.validate();

        CliState st{cfg, out, err};
        if (fr->parsed()) {
            detail::run_frobenius(st, fr_pot, fr_order, fr_at, fr_weights, fr_sheet);
        } else if (pi->parsed()) {
            detail::run_phase_integral(st, pi_pot, pi_path, pi_side, pi_seed);
        } else if (mo->parsed()) {
            detail::run_monodromy(st, mo_pot, mo_radius, mo_base, mo_center, mo_report);
        } else if (sd->parsed()) {
            detail::run_stokes_diagram(st, sd_pot, sd_out, sd_from, sd_maxlen, sd_escape,
                                       sd_naming);
        } else if (cn->parsed()) {
            detail::run_connection(st, cn_script, cn_f1);
        } else if (bd->parsed()) {
            if (sw->parsed()) {
                detail::run_budden_sweep(st, sw_from, sw_to, sw_n, sw_numerical, bd_radius,
                                         bd_tol, sw_out);
            } else {
                if (!bd_c_opt->count())
                    throw argument_error("budden requires --c (or the sweep subcommand)");
                if (bd_c <= 0.0) throw argument_error("budden parameter c must be positive");
                if (bd_r_opt->count() == 0) bd_radius = cfg.radius;
                detail::run_budden(st, bd_c, bd_method, bd_radius, bd_tol);
            }
        }
    } catch (const argument_error& e) {
        print_error_record(err, "argument", e.what());
        return 2;
    } catch (const numeric_error& e) {
        print_error_record(err, e.category(), e.what());
        return 1;
    } catch (const nlohmann::json::exception& e) {
        print_error_record(err, "argument", e.what());
        return 2;
    }
    return 0;
}

} // namespace wkbj::cli
