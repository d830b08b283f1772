#include "doctest.h"
#include "maf/jet.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace maf;

TEST_CASE("seed variable") {
    Jet x = Jet::variable(0, 2.0, 2, 2);
    CHECK(x.value() == 2.0);
    CHECK(x.coeff(MultiIndex{1, 0}) == 1.0);
    CHECK(x.coeff(MultiIndex{0, 1}) == 0.0);
    CHECK(x.coeff(MultiIndex{2, 0}) == 0.0);
    Jet y = Jet::variable(1, 0.0, 2, 4);
    CHECK(y.coeff(MultiIndex{0, 1}) == 1.0);
    CHECK(x.partial({1, 0}) == 1.0);
    CHECK_THROWS_AS(Jet::variable(2, 0.0, 2, 2), JetError);
}

TEST_CASE("square and quotient") {
    Jet x = Jet::variable(0, 1.0, 1, 2);
    Jet s = x * x;
    CHECK(s.coeff(0) == doctest::Approx(1));
    CHECK(s.coeff(1) == doctest::Approx(2));
    CHECK(s.coeff(2) == doctest::Approx(1));

    Jet a = sin(Jet::variable(0, 0.7, 3, 4)) + Jet::variable(2, 1.3, 3, 4);
    Jet one = a / a;
    CHECK(one.value() == doctest::Approx(1.0));
    for (int s2 = 1; s2 < one.size(); ++s2) CHECK(std::abs(one.coeff(s2)) < 1e-13);
    CHECK_THROWS_AS(a / Jet(3, 4, 0.0), DivisionBySingularJet);
    CHECK_THROWS_AS(a + Jet(3, 3, 0.0), JetError);
}

TEST_CASE("elementary functions") {
    Jet x = Jet::variable(0, 0.0, 1, 4);
    Jet s = sin(x);
    const double want[] = {0, 1, 0, -1, 0};
    for (int k = 0; k <= 4; ++k) CHECK(s.partial({k}) == doctest::Approx(want[k]).epsilon(1e-14));

    Jet a = Jet::variable(0, 0.8, 2, 4) * Jet::variable(1, 1.7, 2, 4) + 0.3;
    Jet back = exp(log(a));
    for (int k = 0; k < a.size(); ++k) CHECK(std::abs(back.coeff(k) - a.coeff(k)) < 1e-12);
    Jet one = sin(a) * sin(a) + cos(a) * cos(a);
    CHECK(std::abs(one.value() - 1) < 1e-12);
    for (int k = 1; k < a.size(); ++k) CHECK(std::abs(one.coeff(k)) < 1e-12);

    Jet b = a - 1.2;
    Jet at = atan(tan(b));
    for (int k = 0; k < b.size(); ++k) CHECK(at.coeff(k) == doctest::Approx(b.coeff(k)).epsilon(1e-12));
    Jet sq = sqrt(a);
    Jet sq2 = sq * sq;
    for (int k = 0; k < a.size(); ++k) CHECK(std::abs(sq2.coeff(k) - a.coeff(k)) < 1e-12);
    Jet ch = cosh(a) * cosh(a) - sinh(a) * sinh(a);
    CHECK(std::abs(ch.value() - 1) < 1e-12);
    for (int k = 1; k < a.size(); ++k) CHECK(std::abs(ch.coeff(k)) < 1e-11);
    Jet p = pow(a, 2.5), p2 = pow(a, 5.0), pp = p * p;
    for (int k = 0; k < a.size(); ++k) CHECK(pp.coeff(k) == doctest::Approx(p2.coeff(k)).epsilon(1e-12));

    CHECK_THROWS_AS(log(Jet(1, 2, -1.0)), DomainError);
    CHECK_THROWS_AS(sqrt(Jet(1, 2, 0.0)), DomainError);
}

TEST_CASE("extract partial") {
    Jet x = Jet::variable(0, 1.0, 2, 3), y = Jet::variable(1, 1.0, 2, 3);
    Jet f = x * x * y;
    CHECK(f.partial({}) == doctest::Approx(1));
    CHECK(f.partial({2, 1}) == doctest::Approx(2));
    CHECK(f.partial({1, 1}) == doctest::Approx(2));
    CHECK_THROWS_AS(f.partial({3, 1}), OrderExceeded);
}

namespace {

// central finite differences for first and second partials of a 2-variable function
double fd_partial(const std::function<double(double, double)>& f, double x, double y, int i, int j) {
    const double h = 1e-4;
    auto e = [&](int ax, double s) { return ax == 0 ? std::pair{x + s, y} : std::pair{x, y + s}; };
    if (j < 0) {
        auto [a1, b1] = e(i, h);
        auto [a0, b0] = e(i, -h);
        return (f(a1, b1) - f(a0, b0)) / (2 * h);
    }
    auto g = [&](double px, double py) {
        auto [a1, b1] = j == 0 ? std::pair{px + h, py} : std::pair{px, py + h};
        auto [a0, b0] = j == 0 ? std::pair{px - h, py} : std::pair{px, py - h};
        return (f(a1, b1) - f(a0, b0)) / (2 * h);
    };
    auto [a1, b1] = e(i, h);
    auto [a0, b0] = e(i, -h);
    return (g(a1, b1) - g(a0, b0)) / (2 * h);
}

}  // namespace

TEST_CASE("product and composite agree with finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    auto scalar = [](double x, double y) { return std::sin(x * y) * std::exp(0.3 * x) + y * y * y / (2 + x * x); };
    for (int n = 0; n < 7; ++n) {
        double px = U(rng), py = U(rng);
        Jet x = Jet::variable(0, px, 2, 3), y = Jet::variable(1, py, 2, 3);
        Jet f = sin(x * y) * exp(0.3 * x) + y * y * y / (2 + x * x);
        for (int i = 0; i < 2; ++i) {
            MultiIndex k{};
            k[i] = 1;
            double fd = fd_partial(scalar, px, py, i, -1);
            CHECK(f.partial(k) == doctest::Approx(fd).epsilon(1e-7));
            for (int j = 0; j < 2; ++j) {
                MultiIndex k2{};
                k2[i] += 1;
                k2[j] += 1;
                double fd2 = fd_partial(scalar, px, py, i, j);
                CHECK(f.partial(k2) == doctest::Approx(fd2).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("chain rule on random smooth pairs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int n = 0; n < 100; ++n) {
        double p = U(rng), c = U(rng);
        // f(g(x)) with g = c*x + x^2, f = exp∘sin composed through jets vs direct expansion
        Jet x = Jet::variable(0, p, 1, 4);
        Jet g = c * x + x * x;
        Jet direct = exp(sin(g));
        Jet gv = Jet::variable(0, g.value(), 1, 4);
        Jet outer = exp(sin(gv));
        Jet h = g - g.value();
        Jet composed(1, 4, 0.0);
        Jet hp(1, 4, 1.0);
        for (int k = 0; k <= 4; ++k) {
            composed += outer.coeff(k) * hp;
            hp = hp * h;
        }
        for (int k = 0; k <= 4; ++k)
            CHECK(composed.coeff(k) == doctest::Approx(direct.coeff(k)).epsilon(1e-10).scale(1));
    }
}

TEST_CASE("polynomials are reproduced exactly") {
    Jet x = Jet::variable(0, 0.0, 3, 4), y = Jet::variable(1, 0.0, 3, 4), z = Jet::variable(2, 0.0, 3, 4);
    Jet p = 3.0 * x * x * y * z - 2.0 * powi(z, 4) + 0.5 * y + 7.0;
    CHECK(p.coeff(MultiIndex{2, 1, 1}) == 3.0);
    CHECK(p.coeff(MultiIndex{0, 0, 4}) == -2.0);
    CHECK(p.coeff(MultiIndex{0, 1, 0}) == 0.5);
    CHECK(p.value() == 7.0);
    Jet q = x * y + z;
    Jet r = y * x + z;
    for (int k = 0; k < q.size(); ++k) CHECK(q.coeff(k) == r.coeff(k));
    Jet a = (x + 1.0) * ((y + 2.0) * (z + 3.0));
    Jet b = ((x + 1.0) * (y + 2.0)) * (z + 3.0);
    for (int k = 0; k < a.size(); ++k) CHECK(std::abs(a.coeff(k) - b.coeff(k)) < 1e-14);
}

TEST_CASE("derivative, truncate and embed") {
    Jet x = Jet::variable(0, 0.5, 2, 4), y = Jet::variable(1, -0.3, 2, 4);
    Jet f = sin(x) * y * y;
    Jet fx = f.derivative(0);
    CHECK(fx.order() == 3);
    CHECK(fx.value() == doctest::Approx(std::cos(0.5) * 0.09));
    CHECK(fx.partial({0, 2}) == doctest::Approx(f.partial({1, 2})));
    CHECK(fx.partial({2, 1}) == doctest::Approx(f.partial({3, 1})));
    Jet t = f.truncate(2);
    CHECK(t.partial({1, 1}) == doctest::Approx(f.partial({1, 1})));
    Jet e = f.embed(4);
    CHECK(e.dim() == 4);
    CHECK(e.partial({2, 2, 0, 0}) == doctest::Approx(f.partial({2, 2})));
}
