#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wkbj {

// Base for numerical failures. The CLI maps these to exit code 1 and prints a
// one-line machine-parsable record {"error": category, "message": what}.
class numeric_error : public std::runtime_error {
public:
    numeric_error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Bad user input (malformed potential strings, out-of-domain parameters,
// unusable option combinations). The CLI maps these to exit code 2.
class argument_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct pole_evaluation_error : numeric_error {
    explicit pole_evaluation_error(const std::string& w) : numeric_error("pole_evaluation", w) {}
};

struct root_finding_error : numeric_error {
    explicit root_finding_error(const std::string& w) : numeric_error("root_finding", w) {}
};

struct singular_point_error : numeric_error {
    explicit singular_point_error(const std::string& w) : numeric_error("singular_point", w) {}
};

struct not_regular_singular_error : numeric_error {
    explicit not_regular_singular_error(const std::string& w) : numeric_error("not_regular_singular", w) {}
};

struct truncation_error : numeric_error {
    explicit truncation_error(const std::string& w) : numeric_error("truncation", w) {}
};

struct branch_point_error : numeric_error {
    explicit branch_point_error(const std::string& w) : numeric_error("branch_point", w) {}
};

struct quadrature_error : numeric_error {
    explicit quadrature_error(const std::string& w) : numeric_error("quadrature", w) {}
};

struct ode_error : numeric_error {
    explicit ode_error(const std::string& w) : numeric_error("ode", w) {}
};

struct contour_error : numeric_error {
    explicit contour_error(const std::string& w) : numeric_error("contour", w) {}
};

struct region_error : numeric_error {
    explicit region_error(const std::string& w) : numeric_error("region_mismatch", w) {}
};

struct conditioning_error : numeric_error {
    explicit conditioning_error(const std::string& w) : numeric_error("conditioning", w) {}
};

struct tracing_error : numeric_error {
    explicit tracing_error(const std::string& w) : numeric_error("tracing", w) {}
};

} // namespace wkbj
