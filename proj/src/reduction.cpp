#include "maf/reduction.hpp"

#include <cmath>
#include <limits>

namespace maf {

namespace {

void require_reduced(const FlowSpec& spec) {
    if (spec.source != FlowSource::Reduced) throw DimensionError("flow '" + spec.name + "' is not a reduced flow");
}

// Base geometry, warp and pressure as jets; outputs at order k use inputs at k + 2.
struct Base {
    int k = 0;
    JetMat g, gi;  // order k
    Connection gamma;  // order k + 1
    Jet phi;           // order k + 2
    std::vector<Jet> dphi;  // order k
    std::vector<Jet> up;    // nabla^i phi, order k
    JetMat hess_phi;        // order k
    Jet lap_phi;
    JetMat ricci;  // order k
    bool has_p = false;
    Jet p;               // order k + 2
    std::vector<Jet> dp;  // order k
    Jet lap_p;
};

Base base_data(const FlowSpec& spec, const std::vector<double>& x, int k) {
    require_reduced(spec);
    Base b;
    b.k = k;
    const int K = k + 2;
    auto xs = coordinate_jets({x[0], x[1]}, 2, K);
    const auto& geo = *spec.stream_geometry();
    JetMat gK = geo.metric_at(xs);
    b.gamma = christoffels(gK);
    b.ricci = ricci_jets(riemann(gK, b.gamma));
    b.g = truncate(gK, k);
    b.gi = truncate(inverse(gK), k);
    b.phi = spec.geometry->warp_at(xs);
    b.hess_phi = covariant_hessian(b.phi, b.gamma);
    b.lap_phi = Jet(2, k, 0.0);
    b.dphi.assign(2, Jet(2, k, 0.0));
    b.up.assign(2, Jet(2, k, 0.0));
    for (int i = 0; i < 2; ++i) b.dphi[i] = b.phi.derivative(i).truncate(k);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            b.up[i] += b.gi(i, j) * b.dphi[j];
            b.lap_phi += b.gi(i, j) * b.hess_phi(i, j);
        }
    if (spec.pressure) {
        b.has_p = true;
        b.p = eval_pressure(spec, xs);
        JetMat hp = covariant_hessian(b.p, b.gamma);
        b.dp.assign(2, Jet(2, k, 0.0));
        b.lap_p = Jet(2, k, 0.0);
        for (int i = 0; i < 2; ++i) b.dp[i] = b.p.derivative(i).truncate(k);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) b.lap_p += b.gi(i, j) * hp(i, j);
    }
    return b;
}

Jet h_jet(const Base& b, const std::vector<Jet>& q, const Jet& q3, int sign) {
    const int k = b.k;
    Jet t1(2, k, 0.0), t2(2, k, 0.0), grad2(2, k, 0.0);
    if (!b.has_p) throw MissingPressure("h+- needs a pressure expression");
    for (int i = 0; i < 2; ++i) {
        t1 += b.up[i] * b.dp[i];
        grad2 += b.up[i] * b.dphi[i];
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Jet hij(2, k, 0.0);  // nabla^i nabla^j phi
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) hij += b.gi(i, a) * b.hess_phi(a, c) * b.gi(c, j);
            t2 += (hij + b.up[i] * b.up[j] * double(sign)) * q[i] * q[j];
        }
    Jet t3 = exp(b.phi.truncate(k) * -2.0) * (b.lap_phi + grad2 * double(sign)) * q3 * q3;
    return (t1 - t2 - t3) * 0.5;
}

Jet fhat2_jet(const Base& b, const std::vector<Jet>& q) {
    if (!b.has_p) throw MissingPressure("fhat2 needs a pressure expression");
    Jet r = b.lap_p;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Jet qi(2, b.k, 0.0), qj(2, b.k, 0.0);
            for (int a = 0; a < 2; ++a) {
                qi += b.gi(i, a) * q[a];
                qj += b.gi(j, a) * q[a];
            }
            r += b.ricci(i, j) * qi * qj;
        }
    return r * 0.5;
}

// 3-variable jet restricted to the first two axes
Jet restrict2(const Jet& a) {
    Jet r(2, a.order(), 0.0);
    const auto& lay = r.layout();
    for (int s = 0; s < lay.size; ++s) {
        MultiIndex m{};
        m[0] = lay.index[s][0];
        m[1] = lay.index[s][1];
        r.coeff(s) = a.coeff(m);
    }
    return r;
}

std::vector<double> lift(const std::vector<double>& x) { return {x[0], x[1], 0.0}; }

Eigen::Matrix2d values2(const JetMat& m) {
    Eigen::Matrix2d r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = m(i, j).value();
    return r;
}

}  // namespace

HPlusMinus h_plus_minus(const FlowSpec& spec, const std::vector<double>& x, std::optional<std::array<double, 2>> q,
                        std::optional<double> q3) {
    Base b = base_data(spec, x, 0);
    auto fj = eval_reduced(spec, x, 0);
    std::vector<Jet> qq = fj.v_lower;
    if (q) qq = {Jet(2, 0, (*q)[0]), Jet(2, 0, (*q)[1])};
    Jet v3 = q3 ? Jet(2, 0, *q3) : fj.v3;
    return {h_jet(b, qq, v3, 1).value(), h_jet(b, qq, v3, -1).value()};
}

ReducedResiduals reduced_constraint_residuals(const FlowSpec& spec, const std::vector<double>& x) {
    require_reduced(spec);
    auto fj = eval_reduced(spec, x, 1);
    JetMat A = velocity_gradient(fj);  // A(i,j) = nabla_j v_i
    Base b = base_data(spec, x, 0);
    Eigen::Matrix2d Av = values2(A), gi = values2(b.gi);
    Eigen::Vector2d vl(fj.v_lower[0].value(), fj.v_lower[1].value());
    Eigen::Vector2d vu = gi * vl;
    Eigen::Vector2d dphi(b.dphi[0].value(), b.dphi[1].value());

    ReducedResiduals r;
    // nabla_i v^i = g^ij nabla_j v_i
    r.divergence = (gi * Av.transpose()).trace() + vu.dot(dphi);
    if (!b.has_p) {
        r.pressure = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    // nabla_i v^j nabla_j v^i = tr((G A)^2) with (G A)^j_i = g^jk nabla_i v_k
    Eigen::Matrix2d M = gi * Av;
    double Rbar = (gi * values2(b.ricci)).trace();
    Eigen::Vector2d dp(b.dp[0].value(), b.dp[1].value());
    Eigen::Matrix2d hphi = values2(b.hess_phi);
    double v3 = fj.v3.value();
    Eigen::Vector2d dv3(fj.v3.partial({1, 0}), fj.v3.partial({0, 1}));
    double e2 = std::exp(-2 * b.phi.value());
    double lhs = b.lap_p.value() + (M * M).trace() + 0.5 * vl.dot(vu) * Rbar;
    double rhs = -dphi.dot(gi * dp) + vu.dot(hphi * vu) +
                 e2 * ((b.lap_phi.value() - dphi.dot(gi * dphi)) * v3 * v3 + 2 * v3 * dphi.dot(gi * dv3));
    r.pressure = lhs - rhs;
    return r;
}

Jet reduced_F_jet(const FlowSpec& spec, const std::vector<double>& x, int order, FSource src) {
    require_reduced(spec);
    if (order > 2) throw OrderExceeded("reduced F jets are limited to order 2");
    if (src == FSource::Auto) src = spec.pressure ? FSource::Pressure : FSource::Kinematic;
    if (src == FSource::Kinematic) {
        auto fj = eval_flow(spec, lift(x), order + 1);
        return restrict2(trace_term(velocity_gradient(fj), fj.ginv));
    }
    Base b = base_data(spec, x, order);
    auto fj = eval_reduced(spec, x, order);
    return fhat2_jet(b, fj.v_lower) + h_jet(b, fj.v_lower, fj.v3, 1);
}

double reduced_F(const FlowSpec& spec, const std::vector<double>& x, FSource src) {
    return reduced_F_jet(spec, x, 0, src).value();
}

JetMat reduced_pullback_metric_jets(const FlowSpec& spec, const std::vector<double>& x, int order, FSource src) {
    Jet F = reduced_F_jet(spec, x, order, src);
    auto fj = eval_reduced(spec, x, order + 1);
    JetMat A = velocity_gradient(fj);
    JetMat g = truncate(fj.g, order), G = truncate(fj.ginv, order);
    JetMat out(2, Jet(2, order, 0.0));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Jet s = F * g(i, j);
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) s += A(a, i) * G(a, c) * A(c, j);
            out(i, j) = s;
        }
    return out;
}

MetricField reduced_pullback_field(const FlowSpec& spec, FSource src) {
    require_reduced(spec);
    return [spec, src](const std::vector<double>& x, int order) {
        return reduced_pullback_metric_jets(spec, x, order, src);
    };
}

ReducedMetrics reduced_metrics(const FlowSpec& spec, const std::vector<double>& x, const Settings& s, FSource src) {
    ReducedMetrics r;
    r.F = reduced_F(spec, x, src);
    if (std::abs(r.F) <= s.eps_sing) throw SingularStructure("fhat2 + h+ vanishes: reduced phase metric is singular");

    auto fj = eval_reduced(spec, x, 1);
    Base b = base_data(spec, x, 0);
    const Eigen::Matrix2d g = values2(b.g), G = values2(b.gi);

    // ghat2 in the (x, q) frame at q = v(x)
    Eigen::Matrix2d N;
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i) {
            N(a, i) = 0;
            for (int k = 0; k < 2; ++k) N(a, i) += b.gamma(a, i, k).value() * fj.v_lower[k].value();
        }
    Eigen::Matrix4d gh;
    gh.topLeftCorner<2, 2>() = r.F * g + N * G * N.transpose();
    gh.topRightCorner<2, 2>() = -N * G;
    gh.bottomLeftCorner<2, 2>() = -G * N.transpose();
    gh.bottomRightCorner<2, 2>() = G;
    r.ghat2 = make_metric(gh, MetricContext::ReducedPhase, s.eps_sing);

    const Eigen::Matrix2d A = values2(velocity_gradient(fj));
    r.g2 = make_metric(r.F * g + A.transpose() * G * A, MetricContext::ReducedPullback, s.eps_sing);

    // stream-function forms
    auto fj2 = eval_reduced(spec, x, 2);  // psi to order 3
    Base b1 = base_data(spec, x, 1);
    const Eigen::Matrix2d H = values2(covariant_hessian(fj2.psi.truncate(2), b1.gamma));
    const Eigen::Vector2d dpsi(fj2.psi.partial({1, 0}), fj2.psi.partial({0, 1}));
    const Eigen::Vector2d dphi(b.dphi[0].value(), b.dphi[1].value());
    const double lap = (G * H).trace();
    const double e2 = std::exp(-2 * b.phi.value());
    const double v3 = fj.v3.value();
    const Eigen::Vector2d dv3(fj.v3.partial({1, 0}), fj.v3.partial({0, 1}));
    const Eigen::Vector2d upphi = G * dphi, uppsi = G * dpsi;
    const double pp = upphi.dot(dpsi), ff = upphi.dot(dphi), ss = uppsi.dot(dpsi);
    const Eigen::Vector2d Hu = H * uppsi;  // nabla^l psi nabla_k d_l psi

    const double scalar = pp * (pp - lap) - ff * ss + upphi.dot(Hu + v3 * (dv3 - v3 * dphi));
    Eigen::Matrix2d T = g * scalar + dphi * dphi.transpose() * ss - (dphi * Hu.transpose() + Hu * dphi.transpose());
    r.g2_T = (lap * H + T) * e2;

    Eigen::Matrix2d V = H * G * H + dphi * dphi.transpose() * ss - (Hu * dphi.transpose() + dphi * Hu.transpose());
    r.g2_V2 = r.F * g + e2 * V;

    r.cross_check = std::max((r.g2_T - r.g2.matrix).cwiseAbs().maxCoeff(),
                             (r.g2_V2 - r.g2.matrix).cwiseAbs().maxCoeff());
    return r;
}

std::array<double, 2> reduced_eigenvalues(const FlowSpec& spec, const std::vector<double>& x, FSource src) {
    require_reduced(spec);
    Eigen::Matrix2d g2 = values2(reduced_pullback_metric_jets(spec, x, 0, src));
    Eigen::Matrix2d gb = values2(spec.stream_geometry()->metric_at(coordinate_jets({x[0], x[1]}, 2, 0)));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(g2, gb);
    return {es.eigenvalues()(1), es.eigenvalues()(0)};
}

ReducedCurvatures reduced_curvatures(const FlowSpec& spec, const std::vector<double>& x, const Settings& s,
                                     FSource src) {
    require_reduced(spec);
    ReducedCurvatures r;
    Jet F = reduced_F_jet(spec, x, 2, src);
    const double f = F.value();
    if (std::abs(f) <= s.eps_sing) throw SingularStructure("fhat2 + h+ vanishes: curvature undefined");
    if (!spec.stream_geometry()->is_flat()) throw GeometryError("flat-base formula for Rhat2 on a curved base");
    double grad = 0, lap = 0;
    for (int i = 0; i < 2; ++i) {
        MultiIndex e{}, ee{};
        e[i] = 1;
        ee[i] = 2;
        grad += F.partial(e) * F.partial(e);
        lap += F.partial(ee);
    }
    r.Rhat2 = (grad - f * lap) / (f * f * f);

    JetMat g = reduced_pullback_metric_jets(spec, x, 2, src);
    if (std::abs(g.values().determinant()) <= s.eps_sing) {
        auto fj = eval_reduced(spec, x, 1);
        JetMat A = velocity_gradient(fj);
        if (std::abs(A(0, 1).value() - A(1, 0).value()) <= s.eps_sing)
            throw VanishingVorticity("vorticity vanishes: g2 is degenerate");
        throw SingularStructure("g2 is degenerate");
    }
    r.R2 = curvature_values(g).scalar;
    return r;
}

ReducedTraces reduced_traces(const FlowSpec& spec, const std::vector<double>& x, FSource src) {
    require_reduced(spec);
    auto fj = eval_reduced(spec, x, 1);
    Base b = base_data(spec, x, 0);
    const Eigen::Matrix2d G = values2(b.gi);
    const Eigen::Matrix2d A = values2(velocity_gradient(fj));
    const Eigen::Matrix2d Z = 0.5 * (A.transpose() - A), S = 0.5 * (A + A.transpose());
    const double z2 = (G * Z * G * Z.transpose()).trace(), s2 = (G * S * G * S.transpose()).trace();
    const Eigen::Vector2d dphi(b.dphi[0].value(), b.dphi[1].value());
    const Eigen::Vector2d v(fj.v_lower[0].value(), fj.v_lower[1].value());
    const double v3 = fj.v3.value();
    const Eigen::Vector2d dv3(fj.v3.partial({1, 0}), fj.v3.partial({0, 1}));
    const double e2 = std::exp(-2 * b.phi.value());
    const double dv3sq = dv3.dot(G * dv3), vdphi = v.dot(G * dphi);

    ReducedTraces r;
    r.zeta2_3d = z2 + 0.5 * dv3sq * e2;
    r.strain2_3d = s2 + e2 * (0.5 * dv3sq - 2 * v3 * dv3.dot(G * dphi) + 2 * dphi.dot(G * dphi) * v3 * v3) +
                   vdphi * vdphi;
    r.F = reduced_F(spec, x, src);
    r.f3_check = std::abs(0.5 * (r.zeta2_3d - r.strain2_3d) - r.F);
    return r;
}

MomentMaps moment_maps(const FlowSpec& spec, const std::vector<double>& x, double lambda,
                       std::optional<std::array<double, 2>> q, std::optional<double> q3) {
    require_reduced(spec);
    if (std::abs(lambda) < 1e-300) throw VanishingLambda("moment map needs a non-vanishing lambda");
    auto fj = eval_reduced(spec, x, 1);
    Eigen::Vector2d qv(fj.v_lower[0].value(), fj.v_lower[1].value());
    if (q) qv << (*q)[0], (*q)[1];
    const double q3v = q3 ? *q3 : fj.v3.value();
    const Eigen::Matrix2d G = fj.ginv.values();
    const double sd = fj.sqrt_det.value(), ephi = std::exp(fj.phi.value());
    Eigen::Matrix2d eps;
    eps << 0, 1, -1, 0;

    MomentMaps m;
    m.symplectic = lambda * q3v;
    // *(dx^i) = sqrt(g) g^ij eps_jk dx^k
    m.two_plectic = ephi * sd * (eps.transpose() * G * qv);
    Eigen::Vector2d dpsi(fj.psi.partial({1, 0}), fj.psi.partial({0, 1}));
    m.level_residual = m.two_plectic + dpsi;
    return m;
}

}  // namespace maf
