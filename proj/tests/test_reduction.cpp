#include "doctest.h"
#include "maf/exterior.hpp"
#include "maf/expr.hpp"
#include "maf/reduction.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace maf;

namespace {

const double pi = std::numbers::pi;

std::vector<double> rand_pt(std::mt19937_64& rng, double lo0, double hi0, double lo1, double hi1) {
    std::uniform_real_distribution<double> U0(lo0, hi0), U1(lo1, hi1);
    double a = U0(rng);
    return {a, U1(rng)};
}

// generic curvature of a closed-form 2x2 metric given as expressions in (x, y)
double expr_curvature(const std::vector<std::string>& g, const std::vector<double>& x,
                      const std::map<std::string, double>& params, const std::vector<std::string>& names) {
    auto xs = coordinate_jets(x, 2, 2);
    Bindings b;
    b.vars[names[0]] = xs[0];
    b.vars[names[1]] = xs[1];
    b.params = params;
    std::set<std::string> pn;
    for (const auto& [k, v] : params) pn.insert(k);
    JetMat m(2, Jet(2, 2));
    for (int i = 0; i < 4; ++i) m.a[i] = evaluate(parse_expression(g[i], pn), b);
    return curvature_values(m).scalar;
}

}  // namespace

TEST_CASE("ABC reduction") {
    auto abc = catalog("abc", {{"A", 1.5}, {"B", 1}});
    std::mt19937_64 rng(1);
    for (int n = 0; n < 20; ++n) {
        auto x = rand_pt(rng, -3, 3, -3, 3);
        auto h = h_plus_minus(abc, x);
        CHECK(h.plus == 0);
        CHECK(h.minus == 0);
        auto r = reduced_constraint_residuals(abc, x);
        CHECK(std::abs(r.divergence) < 1e-10);
        CHECK(std::abs(r.pressure) < 1e-10);
        auto m = moment_maps(abc, x);
        CHECK(m.symplectic == doctest::Approx(1.5 * std::cos(x[1]) + std::sin(x[0])));
        CHECK(m.level_residual.norm() < 1e-10);
        CHECK(reduced_F(abc, x) == doctest::Approx(1.5 * std::sin(x[0]) * std::cos(x[1])).epsilon(1e-12));
        if (std::abs(reduced_F(abc, x)) > 1e-3) {
            auto rm = reduced_metrics(abc, x);
            CHECK(rm.cross_check < 1e-10);
        }
    }
    std::vector<double> x{pi / 2, 0};
    auto rm = reduced_metrics(abc, x);
    CHECK((rm.g2.matrix - 2.5 * Eigen::Vector2d(1, 1.5).asDiagonal().toDenseMatrix()).norm() < 1e-12);
    CHECK(rm.ghat2.signature == Signature::Riemannian);
    auto rc = reduced_curvatures(abc, x);
    CHECK(rc.Rhat2 == doctest::Approx(4.0 / 3).epsilon(1e-12));
    CHECK(rc.R2 == doctest::Approx(0.32).epsilon(1e-10));

    // closed-form ABC expressions at random points
    const std::map<std::string, double> P{{"A", 1.5}, {"B", 1}};
    for (int n = 0; n < 10; ++n) {
        auto y = rand_pt(rng, 0.2, 2.9, -1.3, 1.3);
        double s = std::sin(y[0]), c = std::cos(y[1]);
        double A = 1.5, B = 1;
        auto cv = reduced_curvatures(abc, y);
        CHECK(cv.Rhat2 == doctest::Approx((s * s + c * c) / (A * B * s * s * s * c * c * c)).epsilon(1e-10));
        double R2 = (B * s * (s * s + 3 * c * c) + A * c * (c * c + 3 * s * s)) /
                    (2 * s * s * c * c * std::pow(B * s + A * c, 3));
        CHECK(cv.R2 == doctest::Approx(R2).epsilon(1e-9));
        double oracle = expr_curvature({"(A*cos(y) + B*sin(x))*B*sin(x)", "0", "0", "(A*cos(y) + B*sin(x))*A*cos(y)"},
                                       y, P, {"x", "y"});
        CHECK(std::abs(cv.R2 - oracle) < 1e-6 * std::abs(oracle));
    }
}

TEST_CASE("Hill reduction") {
    auto hill = catalog("hill-interior");
    std::vector<double> x{0.5, 0.0};
    auto h = h_plus_minus(hill, x);
    // h+ = (1/2r) d_r p with p = 9/8 (r^4 - r^2 - z^4 + 2 z^2)
    CHECK(h.plus == doctest::Approx(9.0 / 8 * (4 * 0.125 - 1) / 1.0).epsilon(1e-14));
    CHECK(reduced_F(hill, x) == doctest::Approx(9.0 / 4).epsilon(1e-14));
    CHECK(reduced_F(hill, x, FSource::Kinematic) == doctest::Approx(9.0 / 4).epsilon(1e-14));
    auto rm = reduced_metrics(hill, x);
    CHECK((rm.g2.matrix - 9.0 / 4 * Eigen::Vector2d(5, 1.25).asDiagonal().toDenseMatrix()).norm() < 1e-12);
    CHECK(rm.cross_check < 1e-12);
    auto rc = reduced_curvatures(hill, x);
    CHECK(rc.Rhat2 == doctest::Approx(56.0 / 9).epsilon(1e-12));
    auto E = reduced_eigenvalues(hill, x);
    CHECK(E[0] == doctest::Approx(45.0 / 4).epsilon(1e-13));
    CHECK(E[1] == doctest::Approx(45.0 / 16).epsilon(1e-13));

    std::mt19937_64 rng(3);
    for (int n = 0; n < 20; ++n) {
        auto y = rand_pt(rng, 0.1, 0.9, -0.4, 0.4);
        auto r = reduced_constraint_residuals(hill, y);
        CHECK(std::abs(r.divergence) < 1e-9);
        CHECK(std::abs(r.pressure) < 1e-9);
        double rr = y[0], z = y[1];
        CHECK(reduced_F(hill, y) == doctest::Approx(9.0 / 4 * (4 * rr * rr - 3 * z * z)).epsilon(1e-12));
        CHECK(reduced_F(hill, y, FSource::Kinematic) == doctest::Approx(reduced_F(hill, y)).epsilon(1e-12));
        // h+ - h- with arbitrary fibre values
        double q0 = 0.3 * n - 2, q1 = 1.1, q3 = 0.2 * n;
        auto hq = h_plus_minus(hill, y, std::array<double, 2>{q0, q1}, q3);
        CHECK(hq.plus - hq.minus == doctest::Approx(-(q0 / rr) * (q0 / rr) - q3 * q3 / (rr * rr) / (rr * rr)).epsilon(1e-12));
        // R2: generic curvature of the displayed closed-form g2
        if (std::abs(4 * rr * rr - 3 * z * z) < 0.05) continue;
        auto cv = reduced_curvatures(hill, y);
        double oracle = expr_curvature({"9/4*(20*r^2 - 2*z^2)", "9/4*9*r*z", "9/4*9*r*z", "9/4*(5*r^2 + z^2)"}, y, {},
                                       {"r", "z"});
        CHECK(std::abs(cv.R2 - oracle) < 1e-6 * std::abs(oracle));
        CHECK(reduced_metrics(hill, y).cross_check < 1e-10);
        double sg = std::hypot(rr, z), w = std::sqrt(25 * rr * rr + z * z);
        auto Ey = reduced_eigenvalues(hill, y);
        CHECK(Ey[0] == doctest::Approx(9.0 / 8 * (25 * rr * rr - z * z + 3 * sg * w)).epsilon(1e-12));
        CHECK(Ey[1] == doctest::Approx(9.0 / 8 * (25 * rr * rr - z * z - 3 * sg * w)).epsilon(1e-10));
    }

    // the 2-plectic moment map against the Hodge star of e^phi q_i dx^i
    for (int n = 0; n < 5; ++n) {
        auto y = rand_pt(rng, 0.1, 0.9, -0.5, 0.5);
        std::array<double, 2> q{0.4 - n * 0.3, 0.7};
        auto m = moment_maps(hill, y, 1.0, q);
        FormValue a = FormValue::one_form({y[0] * q[0], y[0] * q[1]});
        FormValue st = hodge_star(a, Eigen::Matrix2d::Identity());
        CHECK(m.two_plectic(0) == doctest::Approx(st[1]));
        CHECK(m.two_plectic(1) == doctest::Approx(st[2]));
        CHECK(m.two_plectic(0) == doctest::Approx(-y[0] * q[1]));  // r q_r dz - r q_z dr
        CHECK(m.two_plectic(1) == doctest::Approx(y[0] * q[0]));
        CHECK(moment_maps(hill, y).level_residual.norm() < 1e-10);
    }
    CHECK_THROWS_AS(moment_maps(hill, x, 0.0), VanishingLambda);

    // perturbing v3 only touches the pressure equation
    auto pert = reduced_flow("hill-swirl", "0.75*r^2*(r^2 + z^2 - 1)", "0.3*z", cylindrical_geometry());
    pert.pressure = hill.pressure;
    std::vector<double> y{0.4, 0.3};
    auto r0 = reduced_constraint_residuals(hill, y), r1 = reduced_constraint_residuals(pert, y);
    CHECK(r1.divergence == doctest::Approx(r0.divergence));
    CHECK(std::abs(r1.pressure) > 1e-3);
}

TEST_CASE("3D and reduced evaluations agree") {
    std::mt19937_64 rng(5);
    std::vector<FlowSpec> flows = {catalog("abc", {{"A", 1.5}, {"B", 1}}), catalog("hill-interior"),
                                   catalog("hicks-interior", {{"kappa", 10}})};
    for (const auto& s : flows) {
        for (int n = 0; n < 10; ++n) {
            auto x = rand_pt(rng, 0.1, 0.6, -0.5, 0.5);
            std::vector<double> x3{x[0], x[1], 0.3};
            auto kin = kinematics(s, x3);
            auto tr = reduced_traces(s, x);
            CHECK_MESSAGE(std::abs(tr.zeta2_3d - kin.zeta_sq) < 1e-9, s.name);
            CHECK_MESSAGE(std::abs(tr.strain2_3d - kin.strain_sq) < 1e-9, s.name);
            CHECK_MESSAGE(tr.f3_check < 1e-8, s.name);
            CHECK(reduced_F(s, x, FSource::Kinematic) == doctest::Approx(kin.f).epsilon(1e-10));
            if (s.pressure) {
                double f3 = fhat(s, x3, on_shell_q(s, x3));
                CHECK_MESSAGE(std::abs(reduced_F(s, x, FSource::Pressure) - f3) < 1e-9, s.name);
            } else {
                CHECK_THROWS_AS(h_plus_minus(s, x), MissingPressure);
            }
            if (std::abs(tr.F) > 1e-3) CHECK_MESSAGE(reduced_metrics(s, x).cross_check < 1e-9, s.name);
        }
    }
}

TEST_CASE("reduction on a curved warped base") {
    auto s = reduced_flow("warped-test", "x*y^2 + 0.2*x^3", "0.4*x - y",
                          warped_product(curved2d_geometry(), "0.3*x + 0.2*y^2", "curved-warped", "z"));
    std::mt19937_64 rng(7);
    for (int n = 0; n < 10; ++n) {
        auto x = rand_pt(rng, 0.2, 0.9, 0.2, 0.9);
        auto kin = kinematics(s, {x[0], x[1], 0.1});
        auto tr = reduced_traces(s, x);
        CHECK(std::abs(tr.zeta2_3d - kin.zeta_sq) < 1e-9);
        CHECK(std::abs(tr.strain2_3d - kin.strain_sq) < 1e-9);
        CHECK(reduced_constraint_residuals(s, x).divergence == doctest::Approx(0).scale(1));
        CHECK(moment_maps(s, x).level_residual.norm() < 1e-10);
        if (std::abs(tr.F) > 1e-3) CHECK(reduced_metrics(s, x).cross_check < 1e-9);
    }
    CHECK_THROWS_AS(reduced_curvatures(s, {0.5, 0.5}), GeometryError);
}

TEST_CASE("phi = 0 and constant v3 gives the 2D traces") {
    auto s = reduced_flow("plane", "sin(x)*cos(2*y)", "0.7", warped_product(flat_geometry(2), "0", "flat3d-warped", "z"));
    auto tgv2 = stream_flow("plane2d", "sin(x)*cos(2*y)", flat_geometry(2));
    for (double a : {0.3, 0.8, 1.7}) {
        std::vector<double> x{a, 0.4 * a};
        auto tr = reduced_traces(s, x);
        auto k2 = kinematics(tgv2, x);
        CHECK(tr.zeta2_3d == doctest::Approx(k2.zeta_sq).epsilon(1e-13));
        CHECK(tr.strain2_3d == doctest::Approx(k2.strain_sq).epsilon(1e-13));
        auto rm = reduced_metrics(s, x, {}, FSource::Kinematic);
        CHECK((rm.g2_T - rm.g2.matrix).norm() < 1e-12);  // T = 0
    }
}

TEST_CASE("Gauss-Bonnet on the reduced ABC metric") {
    auto abc = catalog("abc", {{"A", 1.5}, {"B", 1}});
    auto region = level_set_region(stream_level(abc), -27.0 / 16, {-pi / 2, pi});
    auto r = euler_number(region, reduced_pullback_field(abc), {.tol = 1e-7});
    CHECK(std::abs(r.chi - 1) < 1e-3);
}
