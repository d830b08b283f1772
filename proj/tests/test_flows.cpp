#include "doctest.h"
#include "maf/flows.hpp"

#include <cmath>
#include <random>

using namespace maf;

namespace {

// (1/sqrt g) d_i (sqrt g v^i)
double divergence(const FlowJets& f) {
    double s = 0;
    for (int i = 0; i < f.dim; ++i) s += (f.sqrt_det * f.v_upper[i]).derivative(i).value();
    return s / f.sqrt_det.value();
}

std::vector<double> random_point(std::mt19937_64& rng, int dim, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    std::vector<double> p(dim);
    for (auto& v : p) v = U(rng);
    return p;
}

}  // namespace

TEST_CASE("catalog velocities") {
    auto abc = catalog("abc", {{"A", 1.5}, {"B", 1}});
    auto f = eval_flow(abc, {0, 0, 0}, 1);
    CHECK(f.v_upper[0].value() == doctest::Approx(0).scale(1));
    CHECK(f.v_upper[1].value() == doctest::Approx(1));
    CHECK(f.v_upper[2].value() == doctest::Approx(1.5));

    auto mof = catalog("moffatt", {}, 0);
    auto m = eval_flow(mof, {1, 0}, 1);
    CHECK(m.v_upper[0].value() == doctest::Approx(0).scale(1));
    CHECK(m.v_upper[1].value() == doctest::Approx(-2));

    auto hill = catalog("hill-interior");
    auto h = eval_reduced(hill, {0.5, 0.5}, 1);
    CHECK(h.v_lower[0].value() == doctest::Approx(-0.375));
    CHECK(h.v_lower[1].value() == doctest::Approx(-0.375));
    CHECK(h.v3.value() == 0);
    auto h3 = eval_flow(hill, {0.5, 0.5, 2.0}, 1);
    CHECK(h3.v_upper[1].value() == doctest::Approx(-0.375));

    auto tg = catalog("taylor-green", {{"a", 1}, {"b", 1}, {"F", 1}});
    CHECK(print_expression(tg.psi) == "((-F*cos((a*x)))*cos((b*y)))");
    auto jt = eval_flow(tg, {0.3, 0.2}, 1);
    CHECK(jt.psi.value() == doctest::Approx(-std::cos(0.3) * std::cos(0.2)));

    CHECK(same_expression(hill.psi, parse_expression("0.75*r^2*(r^2 + z^2 - 1)")));
    CHECK(same_expression(abc.v3, abc.psi));
}

TEST_CASE("catalog errors") {
    CHECK_THROWS_AS(catalog("nope"), UnknownFlow);
    CHECK_THROWS_AS(catalog("taylor-green", {{"a", 1}}), MissingParameter);
    CHECK_THROWS_AS(catalog("hicks-interior"), MissingParameter);
    auto mof = catalog("moffatt");
    CHECK_THROWS_AS(eval_flow(mof, {1, 2, 3}, 1), DimensionError);
    auto hill = catalog("hill-interior");
    CHECK_THROWS_AS(eval_flow(hill, {-0.5, 0.1, 0}, 1), DomainError);
}

TEST_CASE("divergence free") {
    std::mt19937_64 rng(3);
    std::vector<FlowSpec> flows = {
        catalog("larcheveque", {{"a", 1.3}, {"b", -0.4}}, 0),
        catalog("moffatt", {}, -1),
        catalog("taylor-green", {{"a", 1.2}, {"b", 0.7}, {"F", 2}}),
        catalog("burgers", {{"alpha", 0.3}, {"beta", -1.1}, {"sigma3", 0.4}, {"zeta3", 0.9}}),
        catalog("abc", {{"A", 1.5}, {"B", 1}}),
        catalog("hill-interior"),
        catalog("hicks-interior", {{"kappa", 10}}),
        catalog("hicks-exterior", {{"kappa", 10}}),
        stream_flow("sphere-test", "sin(x)*cos(y) + 0.3*x*y", sphere_geometry()),
        stream_flow("curved-test", "x^2*y - exp(0.3*y)", curved2d_geometry()),
    };
    for (const auto& s : flows) {
        for (int n = 0; n < 100; ++n) {
            auto p = random_point(rng, s.dim, 0.2, 0.9);
            auto f = eval_flow(s, p, 2);
            CHECK_MESSAGE(std::abs(divergence(f)) < 1e-10, s.name);
        }
    }
}

TEST_CASE("hicks interior matches exterior on the sphere") {
    for (double kappa : {5.0, 10.0}) {
        auto in = catalog("hicks-interior", {{"kappa", kappa}});
        auto out = catalog("hicks-exterior", {{"kappa", kappa}});
        for (int n = 0; n < 20; ++n) {
            double th = 0.05 + 3.0 * n / 20;
            double r = std::sin(th), z = std::cos(th);
            double a = eval_reduced(in, {r, z}, 1).psi.value();
            double b = eval_reduced(out, {r, z}, 1).psi.value();
            CHECK(std::abs(a - b) < 1e-9);
        }
    }
    CHECK(bessel_j32(1.0) == doctest::Approx(0.2402978391234270));
    CHECK(bessel_j52(1.0) == doctest::Approx(0.04949681022847794));
}

TEST_CASE("abc is Beltrami") {
    auto abc = catalog("abc", {{"A", 1.5}, {"B", 1}});
    std::mt19937_64 rng(11);
    for (int n = 0; n < 50; ++n) {
        auto p = random_point(rng, 3, -3, 3);
        auto f = eval_flow(abc, p, 1);
        const auto& v = f.v_lower;
        double curl[3] = {v[2].derivative(1).value() - v[1].derivative(2).value(),
                          v[0].derivative(2).value() - v[2].derivative(0).value(),
                          v[1].derivative(0).value() - v[0].derivative(1).value()};
        for (int i = 0; i < 3; ++i) CHECK(std::abs(curl[i] + v[i].value()) < 1e-10);
    }
}
