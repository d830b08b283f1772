#include "maf/gaussbonnet.hpp"

#include "maf/diagnostics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maf {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct CurvePoint {
    Eigen::Vector2d x, d1, d2;
};

CurvePoint curve_point(const Curve& c, double s) {
    auto p = c.eval(s);
    CurvePoint r;
    for (int i = 0; i < 2; ++i) {
        r.x(i) = p[i].value();
        r.d1(i) = p[i].partial({1});
        r.d2(i) = p[i].partial({2});
    }
    return r;
}

Eigen::Matrix2d metric_value(const MetricField& g, const Eigen::Vector2d& x) {
    return g({x(0), x(1)}, 0).values();
}

double speed_sq(const Eigen::Matrix2d& g, const Eigen::Vector2d& v) { return v.dot(g * v); }

// sqrt(det g) eps_ij v^i a^j with a = gamma'' + Gamma(gamma', gamma')
double turning(const MetricField& g, const CurvePoint& p, double& sp2) {
    JetMat m = g({p.x(0), p.x(1)}, 1);
    Eigen::Matrix2d gv = m.values();
    sp2 = speed_sq(gv, p.d1);
    if (!(sp2 > 0) || gv.determinant() <= 0)
        throw NonRiemannianAlongCurve("metric is not Riemannian along the curve");
    Connection G = christoffels(m);
    Eigen::Vector2d a = p.d2;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) a(j) += G(k, l, j).value() * p.d1(k) * p.d1(l);
    return std::sqrt(gv.determinant()) * (p.d1(0) * a(1) - p.d1(1) * a(0));
}

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double diff = left + right - whole;
    if (std::abs(diff) <= 15 * tol) return left + right + diff / 15;
    if (depth <= 0 || !std::isfinite(diff))
        throw QuadratureFailure("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Jet polar_axis(const std::vector<double>& c, const Jet& r, const Jet& t, int axis) {
    return axis == 0 ? r * cos(t) + c[0] : r * sin(t) + c[1];
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    // start from a few panels so periodic integrands cannot fake convergence
    constexpr int panels = 8;
    double h = (b - a) / panels, sum = 0;
    double fa = f(a);
    for (int k = 0; k < panels; ++k) {
        double lo = a + k * h, hi = k + 1 == panels ? b : lo + h;
        double fm = f(0.5 * (lo + hi)), fb = f(hi);
        double whole = (hi - lo) / 6 * (fa + 4 * fm + fb);
        sum += simpson_rec(f, lo, hi, fa, fm, fb, whole, tol / panels, max_depth);
        fa = fb;
    }
    return sum;
}

MetricField constant_metric(const Eigen::Matrix2d& g) {
    return [g](const std::vector<double>&, int order) {
        JetMat m(2, Jet(2, order));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(i, j) = Jet(2, order, g(i, j));
        return m;
    };
}

MetricField pullback_field(const FlowSpec& spec) {
    if (spec.dim != 2) throw DimensionError("pullback field needs a 2D flow");
    return [spec](const std::vector<double>& x, int order) { return pullback_metric_jets(spec, x, order); };
}

LevelFunction stream_level(const FlowSpec& spec) {
    if (!spec.psi) throw DimensionError("flow '" + spec.name + "' has no stream function");
    return [spec](const Jet& x, const Jet& y) { return eval_psi(spec, {x, y}); };
}

Curve polar_curve(const std::vector<double>& center, std::function<Jet(const Jet&)> radius) {
    Curve c;
    c.S = kTwoPi;
    c.eval = [center, radius](double s) {
        Jet t = Jet::variable(0, s, 1, 2);
        Jet r = radius(t);
        return std::array<Jet, 2>{polar_axis(center, r, t, 0), polar_axis(center, r, t, 1)};
    };
    return c;
}

Curve circle_curve(const std::vector<double>& center, double radius) {
    return polar_curve(center, [radius](const Jet& t) { return Jet(t.dim(), t.order(), radius); });
}

Curve ellipse_curve(const std::vector<double>& center, double a, double b) {
    Curve c;
    c.S = kTwoPi;
    c.eval = [center, a, b](double s) {
        Jet t = Jet::variable(0, s, 1, 2);
        return std::array<Jet, 2>{cos(t) * a + center[0], sin(t) * b + center[1]};
    };
    return c;
}

double metric_speed(const Curve& c, double s, const MetricField& g) {
    auto p = curve_point(c, s);
    double v = speed_sq(metric_value(g, p.x), p.d1);
    if (!(v > 0)) throw NonRiemannianAlongCurve("non-positive squared speed along the curve");
    return std::sqrt(v);
}

double curve_length(const Curve& c, const MetricField& g, double tol) {
    return adaptive_simpson([&](double s) { return metric_speed(c, s, g); }, 0, c.S, tol);
}

Curve arclength_reparam(const Curve& c, const MetricField& g) {
    constexpr int nodes = 64;
    auto speed = [c, g](double s) { return metric_speed(c, s, g); };
    auto cum = std::make_shared<std::vector<double>>(nodes + 1, 0.0);
    const double h = c.S / nodes;
    for (int k = 0; k < nodes; ++k)
        (*cum)[k + 1] = (*cum)[k] + adaptive_simpson(speed, k * h, (k + 1) * h, 1e-14);
    const double L = cum->back();

    Curve out;
    out.S = L;
    out.closed = c.closed;
    for (auto [t, ang] : c.corners) {
        int k = std::min(nodes - 1, static_cast<int>(t / h));
        out.corners.emplace_back((*cum)[k] + adaptive_simpson(speed, k * h, t, 1e-14), ang);
    }
    out.eval = [c, g, cum, h, speed](double s) {
        int k = static_cast<int>(std::upper_bound(cum->begin(), cum->end(), s) - cum->begin()) - 1;
        k = std::clamp(k, 0, nodes - 1);
        double t = k * h + (s - (*cum)[k]) / speed(k * h);
        for (int it = 0; it < 30; ++it) {
            double r = (*cum)[k] + adaptive_simpson(speed, k * h, t, 1e-14) - s;
            double dt = r / speed(t);
            t -= dt;
            if (std::abs(dt) < 1e-15 * (1 + std::abs(t))) break;
        }
        // t(s): t' = 1/|c'|, t'' = -|c'|_t / |c'|^3
        auto p = curve_point(c, t);
        JetMat m = g({p.x(0), p.x(1)}, 1);
        Eigen::Matrix2d gv = m.values();
        double sp = std::sqrt(speed_sq(gv, p.d1));
        double dsp2 = 2 * p.d2.dot(gv * p.d1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                dsp2 += (m(i, j).partial({1, 0}) * p.d1(0) + m(i, j).partial({0, 1}) * p.d1(1)) * p.d1(i) * p.d1(j);
        double dsp = dsp2 / (2 * sp);
        Jet T = Jet::variable(0, t, 1, 2);
        T.coeff(1) = 1 / sp;
        T.coeff(2) = 0.5 * (-dsp / (sp * sp * sp));
        auto pos = c.eval(t);
        std::array<Jet, 2> r;
        for (int i = 0; i < 2; ++i) {
            const double tay[3] = {pos[i].coeff(0), pos[i].coeff(1), pos[i].coeff(2)};
            r[i] = compose(T, tay);
        }
        return r;
    };
    return out;
}

double geodesic_curvature(const Curve& c, double s, const MetricField& g) {
    auto p = curve_point(c, s);
    double sp2 = 0;
    double tq = turning(g, p, sp2);
    return tq / (sp2 * std::sqrt(sp2));
}

Region disc_region(const std::vector<double>& center, double radius) {
    Region r;
    r.center = center;
    r.radius = [radius](const Jet& t) { return Jet(t.dim(), t.order(), radius); };
    r.boundary = circle_curve(center, radius);
    return r;
}

Region level_set_region(LevelFunction level, double value, const std::vector<double>& seed) {
    auto at = [level](double x, double y) { return level(Jet(1, 0, x), Jet(1, 0, y)).value(); };
    const double s0 = at(seed[0], seed[1]) - value;
    if (s0 == 0) throw GaussBonnetError("seed lies on the level set");
    const double sign = s0 < 0 ? 1 : -1;  // F < 0 inside
    auto F = [=](double t, double r) { return sign * (at(seed[0] + r * std::cos(t), seed[1] + r * std::sin(t)) - value); };

    auto radius = [=](const Jet& t) {
        const double t0 = t.value();
        double lo = 0, hi = 0;
        const double step = 0.01;
        for (int k = 1; k <= 2000; ++k) {
            hi = k * step;
            if (F(t0, hi) >= 0) break;
            lo = hi;
            if (k == 2000) throw GaussBonnetError("level set not closed around the seed");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            double mid = 0.5 * (lo + hi);
            (F(t0, mid) < 0 ? lo : hi) = mid;
        }
        double r0 = 0.5 * (lo + hi);
        // lift to jets in t with Newton on the coefficients
        Jet rr = Jet::variable(0, r0, 1, 1);
        double Fr = sign * level(rr * std::cos(t0) + seed[0], rr * std::sin(t0) + seed[1]).partial({1});
        Jet R(t.dim(), t.order(), r0);
        for (int it = 0; it <= t.order() + 1; ++it) {
            Jet Fj = (level(R * cos(t) + seed[0], R * sin(t) + seed[1]) - value) * sign;
            Fj.coeff(0) = 0;  // the value is already solved to roundoff
            R -= Fj / Fr;
        }
        return R;
    };
    Region reg;
    reg.center = seed;
    reg.radius = radius;
    reg.boundary = polar_curve(seed, radius);
    return reg;
}

EulerResult euler_number(const Region& region, const MetricField& g, const QuadratureOptions& opt) {
    const auto& c = region.center;
    auto rad = [&](double t) { return region.radius(Jet(1, 0, t)).value(); };

    for (int j = 0; j < opt.signature_samples; ++j) {
        double t = kTwoPi * j / opt.signature_samples, r = rad(t);
        for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            Eigen::Vector2d x(c[0] + frac * r * std::cos(t), c[1] + frac * r * std::sin(t));
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(metric_value(g, x), Eigen::EigenvaluesOnly);
            if (!(es.eigenvalues()(0) > opt.min_eigenvalue))
                throw MixedSignature("metric is not positive definite (or nearly singular) inside the region");
        }
    }

    EulerResult res;
    auto integrand = [&](double t, double rho) {
        std::vector<double> x{c[0] + rho * std::cos(t), c[1] + rho * std::sin(t)};
        JetMat m = g(x, 2);
        double R = curvature_values(m).scalar;
        return 0.5 * R * std::sqrt(m.values().determinant()) * rho;
    };
    auto inner = [&](double t) {
        double r = rad(t);
        return adaptive_simpson([&](double rho) { return integrand(t, rho); }, 0, r, opt.tol / kTwoPi,
                                opt.max_depth);
    };
    res.area_term = adaptive_simpson(inner, 0, kTwoPi, opt.tol, opt.max_depth);

    const Curve& b = region.boundary;
    res.boundary_term = adaptive_simpson(
        [&](double s) {
            double sp2 = 0;
            double tq = turning(g, curve_point(b, s), sp2);
            return tq / sp2;
        },
        0, b.S, opt.tol, opt.max_depth);
    for (auto [s, ang] : b.corners) res.corner_term += ang;
    res.chi = (res.area_term + res.boundary_term + res.corner_term) / kTwoPi;
    return res;
}

}  // namespace maf
