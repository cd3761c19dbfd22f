#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "wkbj/budden.hpp"
#include "wkbj/connection.hpp"
#include "wkbj/monodromy.hpp"

using namespace wkbj;

namespace {

// The continuation matrix the six-step chain must produce, written with a
// given below-cut phase factor phi (= e^{pi c / 2} analytically):
//   [ phi^2 (1 + s+ s-)   -s+   ]
//   [ -s-                 phi^-2 ]
ConnectionMatrix expected_budden_matrix(cplx phi) {
    auto sp = StokesPolynomial::variable("s+");
    auto sm = StokesPolynomial::variable("s-");
    ConnectionMatrix m;
    m.e[0][0] = (StokesPolynomial::constant({1.0, 0.0}) + sp * sm) * (phi * phi);
    m.e[0][1] = -sp;
    m.e[1][0] = -sm;
    m.e[1][1] = StokesPolynomial::constant(1.0 / (phi * phi));
    return m;
}

} // namespace

TEST_CASE("elementary stokes crossing") {
    auto m = elementary_stokes_crossing("s", +1, Slot::plus);
    REQUIRE(m.e[0][0].is_one(0.0));
    REQUIRE(m.e[1][1].is_one(0.0));
    REQUIRE(m.e[0][1].is_zero());
    REQUIRE(m.e[1][0] == StokesPolynomial::variable("s"));
    REQUIRE(m.det().is_one(0.0));

    auto md = elementary_stokes_crossing("s", -1, Slot::minus);
    REQUIRE(md.e[0][1] == cplx{-1.0, 0.0} * StokesPolynomial::variable("s"));
    REQUIRE(md.e[1][0].is_zero());
    REQUIRE(md.det().is_one(0.0));

    // substituting s = 0 gives the identity
    auto sub = m.substituted({{"s", {0.0, 0.0}}});
    REQUIRE(sub.e[1][0].is_zero());
    REQUIRE(sub.e[0][0].is_one(0.0));
}

TEST_CASE("re-anchoring factor") {
    cplx phi{2.5, 0.5};
    auto m = branch_cut_crossing(phi);
    REQUIRE(std::abs(m.e[0][0].constant_value() - phi) < 1e-15);
    REQUIRE(std::abs(m.e[1][1].constant_value() - 1.0 / phi) < 1e-15);
    REQUIRE(m.det().is_one(1e-15));

    auto id = branch_cut_crossing({1.0, 0.0});
    REQUIRE(id.e[0][0].is_one(0.0));
    REQUIRE(id.e[1][1].is_one(0.0));

    REQUIRE_THROWS_AS(branch_cut_crossing({0.0, 0.0}), argument_error);

    // dominancy bookkeeping
    auto sw = branch_cut_crossing(phi, true, Slot::plus);
    REQUIRE(sw.dominant_out == Slot::minus);
}

TEST_CASE("compose basics") {
    REQUIRE(compose({}).e[0][0].is_one(0.0));

    auto single = elementary_stokes_crossing("s", +1, Slot::plus);
    auto c1 = compose({single});
    REQUIRE(c1.e[1][0] == StokesPolynomial::variable("s"));

    // region chain mismatch
    auto a = elementary_stokes_crossing("s1", +1, Slot::plus, false, "1", "2");
    auto b = elementary_stokes_crossing("s2", +1, Slot::plus, false, "3", "4");
    REQUIRE_THROWS_AS(compose({a, b}), region_error);

    // dominancy chain mismatch
    auto c = anti_stokes_swap(Slot::plus, "1", "2");               // leaves minus dominant
    auto d = elementary_stokes_crossing("s", +1, Slot::plus, false, "2", "3");
    REQUIRE_THROWS_AS(compose({c, d}), region_error);

    // consistent chain composes
    auto d2 = elementary_stokes_crossing("s", +1, Slot::minus, false, "2", "3");
    auto ok = compose({c, d2});
    REQUIRE(ok.domain_from == "1");
    REQUIRE(ok.domain_to == "3");
    REQUIRE(ok.det().is_one(1e-15));
}

TEST_CASE("six-step budden loop reproduces the closed-form matrix") {
    for (double c : {0.5, 1.0, 2.0}) {
        auto steps = budden_loop_script(c);
        auto m = compose(steps);
        cplx phi = std::exp(cplx{std::numbers::pi * c / 2.0, 0.0});
        auto want = expected_budden_matrix(phi);
        double scale = std::exp(std::numbers::pi * c);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                REQUIRE(m.e[i][j].equals_within(want.e[i][j], 1e-12 * scale));
        REQUIRE(m.det().is_one(1e-12));
    }
}

TEST_CASE("trace equation reduces to the product constraint") {
    for (double c : {0.5, 1.0, 2.0}) {
        auto m = compose(budden_loop_script(c));
        auto eq = trace_equation(m, {1.0, 0.0});

        double epc = std::exp(std::numbers::pi * c);
        double emc = std::exp(-std::numbers::pi * c);
        // e^{pi c} (s+ s- + (1 - e^{-pi c})^2)
        auto expect = (StokesPolynomial::variable("s+") * StokesPolynomial::variable("s-") +
                       StokesPolynomial::constant({(1.0 - emc) * (1.0 - emc), 0.0})) *
                      cplx{epc, 0.0};
        REQUIRE((eq - expect).max_coefficient() < 1e-12 * epc);
    }
}

TEST_CASE("solved constants close the trace relation for any phase choice") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (double c : {0.5, 1.0, 2.0}) {
        auto m = compose(budden_loop_script(c));
        double mag = 1.0 - std::exp(-std::numbers::pi * c);
        for (int k = 0; k < 5; ++k) {
            cplx sm = mag * std::exp(cplx{0.0, angle(rng)});
            cplx sp = -std::conj(sm);
            auto sub = m.substituted({{"s-", sm}, {"s+", sp}});
            cplx tr = sub.trace().constant_value();
            REQUIRE(std::abs(tr - cplx{2.0, 0.0}) < 1e-12);
            REQUIRE(std::abs(sub.det().constant_value() - cplx{1.0, 0.0}) < 1e-12);
        }
    }
}

TEST_CASE("substituted symbolic trace matches the numerical monodromy") {
    double c = 1.0;
    auto m = compose(budden_loop_script(c));
    cplx sm{-(1.0 - std::exp(-std::numbers::pi * c)), 0.0};
    cplx sp = -std::conj(sm);
    cplx symbolic_trace = m.substituted({{"s-", sm}, {"s+", sp}}).trace().constant_value();

    auto p = LaurentPotential::budden(c);
    auto num = numerical_monodromy(p, ContourPath::circle({0.0, 0.0}, 0.5), {0.5, 0.0});
    REQUIRE(std::abs(symbolic_trace - num.trace()) < 1e-6);
}

TEST_CASE("script json mirrors the built-in loop") {
    double c = 1.0;
    double phi = std::exp(std::numbers::pi * c / 2.0);
    nlohmann::json script = nlohmann::json::array();
    script.push_back({{"reanchor", {{"phase", {phi, 0.0}}, {"swap_dominancy", true}, {"dominant", "plus"}}},
                      {"from", "1"},
                      {"to", "1"}});
    script.push_back({{"swap", {{"dominant", "minus"}}}, {"from", "1"}, {"to", "2"}});
    script.push_back({{"stokes", {{"constant", "s-"}, {"direction", -1}, {"dominant", "plus"}}},
                      {"from", "2"},
                      {"to", "3"}});
    script.push_back({{"swap", {{"dominant", "plus"}}}, {"from", "3"}, {"to", "4"}});
    script.push_back({{"stokes", {{"constant", "s+"}, {"direction", -1}, {"dominant", "minus"}}},
                      {"from", "4"},
                      {"to", "5"}});
    script.push_back({{"swap", {{"dominant", "minus"}}}, {"from", "5"}, {"to", "6"}});
    script.push_back({{"reanchor", {{"phase", {phi, 0.0}}, {"swap_dominancy", true}, {"dominant", "plus"}}},
                      {"from", "6"},
                      {"to", "1'"}});

    auto from_file = compose(script_from_json(script));
    auto builtin = compose(budden_loop_script(c));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            REQUIRE(from_file.e[i][j].equals_within(builtin.e[i][j], 1e-12 * std::exp(std::numbers::pi)));

    REQUIRE_THROWS_AS(script_from_json(nlohmann::json::parse(R"([{"bogus": {}}])")),
                      argument_error);
}

TEST_CASE("trace equation for the trivial loop") {
    auto id = ConnectionMatrix::identity();
    auto eq = trace_equation(id, {0.0, 0.0});
    REQUIRE(eq.is_zero());
}
