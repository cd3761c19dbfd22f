#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "wkbj/errors.hpp"

namespace wkbj {

// Run-wide numerical settings.  Values merge in order: defaults, then the
// config file (--config flag or WKBJ_CONFIG environment variable), then
// explicit command-line flags.
struct RunConfig {
    double tol_quad = 1e-10;
    double tol_ode = 1e-10;
    double tol_root = 1e-9;
    double radius = 200.0;
    std::string format = "json"; // json | csv
    int verbosity = 0;

    void validate() const {
        if (!(tol_quad > 0.0) || !(tol_ode > 0.0) || !(tol_root > 0.0))
            throw argument_error("all tolerances must be strictly positive");
        if (format != "json" && format != "csv")
            throw argument_error("format must be \"json\" or \"csv\"");
    }

    void merge_json(const nlohmann::json& j) {
        if (j.contains("tol_quad")) tol_quad = j["tol_quad"].get<double>();
        if (j.contains("tol_ode")) tol_ode = j["tol_ode"].get<double>();
        if (j.contains("tol_root")) tol_root = j["tol_root"].get<double>();
        if (j.contains("radius")) radius = j["radius"].get<double>();
        if (j.contains("format")) format = j["format"].get<std::string>();
        if (j.contains("verbosity")) verbosity = j["verbosity"].get<int>();
    }

    void merge_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw argument_error("cannot open config file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw argument_error("config file is not valid JSON: " + std::string(e.what()));
        }
        merge_json(j);
    }
};

} // namespace wkbj
