#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "wkbj/potential.hpp"

using namespace wkbj;
using Catch::Matchers::WithinAbs;

namespace {

// Independent straightforward evaluator: naive powers, no Horner, no shared
// code with the implementation.
cplx naive_eval(const LaurentPotential& p, cplx z) {
    cplx sum{0.0, 0.0};
    for (const auto& [k, c] : p.terms()) {
        cplx zp{1.0, 0.0};
        for (int i = 0; i < std::abs(k); ++i) zp *= z;
        sum += (k >= 0) ? c * zp : c / zp;
    }
    return sum;
}

// Finite-difference second derivative of f along the real direction.
template <class F>
cplx fd_second(F&& f, cplx z, double h) {
    return (-f(z + 2.0 * h) + 16.0 * f(z + h) - 30.0 * f(z) + 16.0 * f(z - h) - f(z - 2.0 * h)) /
           (12.0 * h * h);
}

} // namespace

TEST_CASE("potential parsing") {
    auto p = LaurentPotential::parse("1 + 2.5*z^-1");
    REQUIRE(p.laurent_coefficient(0) == cplx{1.0, 0.0});
    REQUIRE(p.laurent_coefficient(-1) == cplx{2.5, 0.0});

    auto q = LaurentPotential::parse("z^2 - 1");
    REQUIRE(q.laurent_coefficient(2) == cplx{1.0, 0.0});
    REQUIRE(q.laurent_coefficient(0) == cplx{-1.0, 0.0});

    auto r = LaurentPotential::parse("-z + 3");
    REQUIRE(r.laurent_coefficient(1) == cplx{-1.0, 0.0});

    // duplicate exponents accumulate into one entry
    auto d = LaurentPotential::parse("1 + 2 + 3*z^-1 - 1*z^-1");
    REQUIRE(d.laurent_coefficient(0) == cplx{3.0, 0.0});
    REQUIRE(d.laurent_coefficient(-1) == cplx{2.0, 0.0});
    REQUIRE(d.terms().size() == 2);

    REQUIRE_THROWS_AS(LaurentPotential::parse(""), argument_error);
    REQUIRE_THROWS_AS(LaurentPotential::parse("1 + *"), argument_error);
    REQUIRE_THROWS_AS(LaurentPotential::parse("z^x"), argument_error);
}

TEST_CASE("potential json round trip") {
    auto p = LaurentPotential::from_json(nlohmann::json::parse(
        R"({"terms":[{"c":[1,0],"k":0},{"c":[0,2],"k":-1}]})"));
    REQUIRE(p.laurent_coefficient(-1) == cplx{0.0, 2.0});
    auto j = p.to_json();
    auto p2 = LaurentPotential::from_json(j);
    REQUIRE(p.terms() == p2.terms());
}

TEST_CASE("evaluate") {
    auto budden1 = LaurentPotential::budden(1.0);
    REQUIRE_THAT(std::abs(budden1.evaluate({1.0, 0.0}) - cplx{2.0, 0.0}), WithinAbs(0.0, 1e-15));

    // turning point of the Budden potential at z = -c
    auto budden2 = LaurentPotential::budden(2.0);
    REQUIRE_THAT(std::abs(budden2.evaluate({-2.0, 0.0})), WithinAbs(0.0, 1e-15));

    auto zsq = LaurentPotential::parse("z^2");
    REQUIRE_THAT(std::abs(zsq.evaluate({0.0, 3.0}) - cplx{-9.0, 0.0}), WithinAbs(0.0, 1e-12));

    REQUIRE_THROWS_AS(budden1.evaluate({0.0, 0.0}), pole_evaluation_error);
    REQUIRE_THROWS_AS(budden1.evaluate({1e-12, 0.0}), pole_evaluation_error);
}

TEST_CASE("evaluate matches an independent evaluator on random inputs") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_int_distribution<int> expo(-3, 4);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);

    int checked = 0;
    for (int trial = 0; trial < 1400 && checked < 1000; ++trial) {
        std::map<int, cplx> terms;
        int nt = 1 + trial % 5;
        for (int t = 0; t < nt; ++t) terms[expo(rng)] += cplx{coef(rng), coef(rng)};
        LaurentPotential p(terms);
        cplx z{pos(rng), pos(rng)};
        if (p.empty() || std::abs(z) < 0.1) continue;
        cplx a = p.evaluate(z);
        cplx b = naive_eval(p, z);
        REQUIRE(std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b)));
        ++checked;
    }
    REQUIRE(checked == 1000);
}

TEST_CASE("laurent coefficients") {
    REQUIRE(LaurentPotential::budden(1.0).laurent_coefficient(-2) == cplx{0.0, 0.0});
    REQUIRE(LaurentPotential::parse("1 + 2.5*z^-1").laurent_coefficient(-1) == cplx{2.5, 0.0});
    REQUIRE(LaurentPotential::parse("-2*z^-2 + 1").laurent_coefficient(-2) == cplx{-2.0, 0.0});
    REQUIRE(LaurentPotential::parse("1").laurent_coefficient(7) == cplx{0.0, 0.0});
}

TEST_CASE("turning points") {
    auto b1 = LaurentPotential::budden(1.0);
    auto tp1 = b1.turning_points();
    REQUIRE(tp1.size() == 1);
    REQUIRE_THAT(std::abs(tp1[0] - cplx{-1.0, 0.0}), WithinAbs(0.0, 1e-9));
    REQUIRE(std::abs(b1.evaluate(tp1[0])) < 1e-9);

    auto p2 = LaurentPotential::parse("z^2 - 1");
    auto tp2 = p2.turning_points();
    REQUIRE(tp2.size() == 2);
    REQUIRE_THAT(std::abs(tp2[0] - cplx{-1.0, 0.0}), WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(std::abs(tp2[1] - cplx{1.0, 0.0}), WithinAbs(0.0, 1e-9));
    for (const auto& r : tp2) REQUIRE(std::abs(p2.evaluate(r)) < 1e-9);

    // 1 + 2/z = 0  =>  z = -2
    auto tp3 = LaurentPotential::parse("1 + 2*z^-1").turning_points();
    REQUIRE(tp3.size() == 1);
    REQUIRE_THAT(std::abs(tp3[0] - cplx{-2.0, 0.0}), WithinAbs(0.0, 1e-9));

    // double zero reported with multiplicity
    auto tp4 = LaurentPotential::parse("z^2").turning_points();
    REQUIRE(tp4.size() == 2);
    REQUIRE_THAT(std::abs(tp4[0]), WithinAbs(0.0, 1e-7));
    REQUIRE_THAT(std::abs(tp4[1]), WithinAbs(0.0, 1e-7));

    REQUIRE(LaurentPotential::parse("1").turning_points().empty());
}

TEST_CASE("turning point residuals stay small on random potentials") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<int, cplx> terms;
        for (int k = -1; k <= 3; ++k)
            if (rng() % 2) terms[k] = cplx{coef(rng), coef(rng)};
        LaurentPotential p(terms);
        if (p.empty() || p.max_exponent() == p.min_exponent()) continue;
        std::vector<cplx> roots;
        try {
            roots = p.turning_points();
        } catch (const root_finding_error&) {
            continue; // the residual guard rejected an ill-conditioned draw
        }
        for (const auto& r : roots) {
            double local = std::max(1.0, std::abs(r));
            REQUIRE(std::abs(p.evaluate_unchecked(r)) < 1e-4 * local);
        }
    }
}

TEST_CASE("wkb validity measure") {
    auto c1 = LaurentPotential::parse("1");
    for (cplx z : {cplx{1.0, 0.0}, cplx{-3.0, 2.0}, cplx{0.1, -7.0}})
        REQUIRE(c1.wkb_validity(z) == 0.0);

    auto b = LaurentPotential::budden(1.0);
    double v10 = b.wkb_validity({10.0, 0.0});
    double v100 = b.wkb_validity({100.0, 0.0});
    double v1000 = b.wkb_validity({1000.0, 0.0});
    REQUIRE(v10 > v100);
    REQUIRE(v100 > v1000);
    REQUIRE(v1000 < 1e-8);

    // huge right next to the turning point
    REQUIRE(b.wkb_validity({-1.0 + 1e-3, 0.0}) > 1e2);

    REQUIRE_THROWS_AS(b.wkb_validity({0.0, 0.0}), numeric_error);
    REQUIRE_THROWS_AS(LaurentPotential::parse("z^2").wkb_validity({0.0, 0.0}),
                      singular_point_error);
}

TEST_CASE("wkb validity agrees with a finite-difference oracle") {
    // eps = q^{-3/2} d^2(q^{-1/2})/dz^2 with q = sqrt(Q): both factors built
    // from principal powers of Q, differentiated numerically.
    auto b = LaurentPotential::budden(1.3);
    auto qm14 = [&](cplx z) { return std::pow(b.evaluate_unchecked(z), -0.25); };
    for (cplx z : {cplx{3.0, 1.0}, cplx{5.0, -2.0}, cplx{1.5, 0.5}, cplx{-4.0, 3.0}}) {
        cplx d2 = fd_second(qm14, z, 1e-4);
        cplx eps_fd = std::pow(b.evaluate_unchecked(z), -0.75) * d2;
        double got = b.wkb_validity(z);
        REQUIRE_THAT(got, WithinAbs(std::abs(eps_fd), 1e-6 * std::max(1.0, std::abs(eps_fd))));
    }
}

TEST_CASE("poles derived from the term map") {
    auto b = LaurentPotential::budden(1.0);
    auto poles = b.poles();
    REQUIRE(poles.size() == 1);
    REQUIRE(poles[0].order == 1);
    REQUIRE(poles[0].location == cplx{0.0, 0.0});

    REQUIRE(LaurentPotential::parse("z^2").poles().empty());
    REQUIRE(LaurentPotential::parse("-2*z^-2 + 1").poles()[0].order == 2);
}
