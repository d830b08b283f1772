#include "maf/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace maf {

namespace {

MultiIndex mi(std::initializer_list<int> axes) {
    MultiIndex k{};
    for (int a : axes) ++k[a];
    return k;
}

Jet abs_log(const Jet& a) { return a.value() < 0 ? log(-a) : log(a); }

Jet sqrt_abs(const Jet& a) { return a.value() < 0 ? sqrt(-a) : sqrt(a); }

// gbar, its inverse and Ricci tensor jets in m variables
struct BackgroundJets {
    JetMat g, ginv;
    Connection gamma;
    Riemann riem;
    JetMat ric;
};

BackgroundJets background_jets(const FlowSpec& spec, const std::vector<double>& x, int metric_order) {
    BackgroundJets b;
    auto xs = coordinate_jets(x, spec.dim, metric_order);
    b.g = spec.geometry->metric_at(xs);
    b.ginv = inverse(b.g);
    b.gamma = christoffels(b.g);
    b.riem = riemann(b.g, b.gamma);
    b.ric = ricci_jets(b.riem);
    return b;
}

void require_stream(const FlowSpec& spec, const char* what) {
    if (spec.source != FlowSource::Stream)
        throw DimensionError(std::string(what) + " needs a 2D stream flow; use the reduction module for reduced flows");
}

// Hessian-metric data of a 2D stream flow at one point.
struct HessianData {
    JetMat gbar, gbar_inv;  // order 4 / order 4
    Connection gamma;       // order 3
    Jet psi;                // order 4
    JetMat hess;            // order 2
    Jet zeta;               // order 2
};

HessianData hessian_data(const FlowSpec& spec, const std::vector<double>& x) {
    HessianData h;
    auto fj = eval_flow(spec, x, 3);
    auto xs = coordinate_jets(x, 2, 4);
    h.gbar = spec.stream_geometry()->metric_at(xs);
    h.gbar_inv = inverse(h.gbar);
    h.gamma = christoffels(h.gbar);
    h.psi = fj.psi;
    h.hess = covariant_hessian(h.psi, h.gamma);
    h.zeta = Jet(2, 2, 0.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) h.zeta += h.gbar_inv(i, j).truncate(2) * h.hess(i, j);
    return h;
}

}  // namespace

const char* to_string(Signature s) {
    switch (s) {
        case Signature::Riemannian: return "riemannian";
        case Signature::Kleinian: return "kleinian";
        default: return "degenerate";
    }
}

const char* to_string(FlowClass c) {
    switch (c) {
        case FlowClass::Elliptic: return "elliptic";
        case FlowClass::Hyperbolic: return "hyperbolic";
        default: return "parabolic";
    }
}

Signature signature_of(const Eigen::MatrixXd& m, double eps) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    int pos = 0, neg = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i]) <= eps) return Signature::Degenerate;
        (ev[i] > 0 ? pos : neg)++;
    }
    // definite of either sign counts as Riemannian
    return (pos == 0 || neg == 0) ? Signature::Riemannian : Signature::Kleinian;
}

MetricValue make_metric(Eigen::MatrixXd m, MetricContext ctx, double eps) {
    MetricValue v;
    v.signature = signature_of(m, eps);
    v.matrix = std::move(m);
    v.context = ctx;
    return v;
}

JetMat velocity_gradient(const FlowJets& f) {
    const int n = f.dim, o = f.order - 1;
    if (o < 0) throw OrderExceeded("velocity gradient needs order >= 1");
    Connection G = christoffels(f.g);
    JetMat A(n, Jet(n, o, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet a = f.v_lower[i].derivative(j);
            for (int k = 0; k < n; ++k) a -= G(j, i, k) * f.v_lower[k].truncate(o);
            A(i, j) = a;
        }
    return A;
}

Jet trace_term(const JetMat& A, const JetMat& ginv) {
    const int n = A.n;
    const int o = A(0, 0).order();
    JetMat G = truncate(ginv, o);
    Jet s(A(0, 0).dim(), o, 0.0);
    // A^{ji} = G^{ja} G^{ib} A_ab
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet up(A(0, 0).dim(), o, 0.0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) up += G(j, a) * G(i, b) * A(a, b);
            s += A(i, j) * up;
        }
    return -0.5 * s;
}

JetMat ricci_jets(const Riemann& R) {
    const int n = R.n;
    JetMat ric(n, Jet(R.c[0].dim(), R.c[0].order(), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) ric(i, j) += R(k, i, j, k);
    return ric;
}

KinematicState kinematics(const FlowSpec& spec, const std::vector<double>& point) {
    auto fj = eval_flow(spec, point, 1);
    const int n = fj.dim;
    KinematicState k;
    k.dim = n;
    k.gbar = fj.g.values();
    Eigen::MatrixXd G = fj.ginv.values();
    k.v_lower.resize(n);
    k.v_upper.resize(n);
    for (int i = 0; i < n; ++i) {
        k.v_lower[i] = fj.v_lower[i].value();
        k.v_upper[i] = fj.v_upper[i].value();
    }
    JetMat A = velocity_gradient(fj);
    k.gradient = A.values();
    k.strain = 0.5 * (k.gradient + k.gradient.transpose());
    // zeta_ij = 1/2 (d_i v_j - d_j v_i) = 1/2 (A_ji - A_ij)
    k.zeta = 0.5 * (k.gradient.transpose() - k.gradient);
    k.zeta_sq = (G * k.zeta * G).cwiseProduct(k.zeta).sum();
    k.strain_sq = (G * k.strain * G).cwiseProduct(k.strain).sum();
    k.f = 0.5 * (k.zeta_sq - k.strain_sq);
    if (n == 2) k.scalar_vorticity = 2 * k.zeta(0, 1) / fj.sqrt_det.value();
    return k;
}

Jet half_pressure_laplacian(const FlowSpec& spec, const std::vector<double>& x, int order) {
    const int m = spec.dim;
    if (spec.has_pressure()) {
        auto xs = coordinate_jets(x, m, order + 2);
        Jet p = eval_pressure(spec, xs);
        JetMat g = truncate(spec.geometry->metric_at(xs), order + 1);
        JetMat G = inverse(g);
        Jet sd = sqrt(determinant(g));
        Jet div(m, order, 0.0);
        for (int i = 0; i < m; ++i) {
            Jet flux(m, order + 1, 0.0);
            for (int j = 0; j < m; ++j) flux += sd * G(i, j) * p.derivative(j);
            div += flux.derivative(i);
        }
        return 0.5 * div / sd.truncate(order);
    }
    // pressure equation: Lap p = zeta.zeta - S.S - Ric(v,v)
    auto fj = eval_flow(spec, x, order + 1);
    Jet f = trace_term(velocity_gradient(fj), fj.ginv);
    auto bg = background_jets(spec, x, order + 2);
    Jet rvv(m, order, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            rvv += bg.ric(i, j) * fj.v_upper[i].truncate(order) * fj.v_upper[j].truncate(order);
    return f - 0.5 * rvv;
}

Jet fhat_jet(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q, int order) {
    const int m = spec.dim;
    if (static_cast<int>(x.size()) != m || static_cast<int>(q.size()) != m)
        throw DimensionError("phase point needs " + std::to_string(m) + " + " + std::to_string(m) + " coordinates");
    Jet P = half_pressure_laplacian(spec, x, order).embed(2 * m);
    if (spec.geometry->is_flat()) return P;
    auto bg = background_jets(spec, x, order + 2);
    JetMat G = truncate(bg.ginv, order);
    std::vector<Jet> qs;
    for (int i = 0; i < m; ++i) qs.push_back(Jet::variable(m + i, q[i], 2 * m, order));
    Jet s(2 * m, order, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Jet up(m, order, 0.0);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) up += G(i, a) * bg.ric(a, b) * G(b, j);
            s += up.embed(2 * m) * qs[i] * qs[j];
        }
    return P + 0.5 * s;
}

double fhat(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q) {
    return fhat_jet(spec, x, q, 0).value();
}

std::vector<double> on_shell_q(const FlowSpec& spec, const std::vector<double>& x) {
    auto fj = eval_flow(spec, x, 0);
    std::vector<double> q;
    for (const auto& v : fj.v_lower) q.push_back(v.value());
    return q;
}

JetMat phase_metric_jets(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                         int order) {
    const int m = spec.dim, d = 2 * m;
    Jet fh = fhat_jet(spec, x, q, order);
    auto xs = coordinate_jets(x, m, order + 1);
    JetMat gm = spec.geometry->metric_at(xs);
    Connection Gm = christoffels(gm);
    JetMat g = truncate(gm, order), Gi = inverse(g);
    auto E = [&](const Jet& a) { return a.embed(d); };
    std::vector<Jet> qs;
    for (int i = 0; i < m; ++i) qs.push_back(Jet::variable(m + i, q[i], d, order));
    // N_ai = Gamma_ai^k q_k
    JetMat N(m, Jet(d, order, 0.0));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) N(a, i) += E(Gm(a, i, k)) * qs[k];
    JetMat NG(m, Jet(d, order, 0.0));
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) NG(a, j) += N(a, i) * E(Gi(i, j));
    JetMat h(d, Jet(d, order, 0.0));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Jet xx = fh * E(g(a, b));
            for (int j = 0; j < m; ++j) xx += NG(a, j) * N(b, j);
            h(a, b) = xx;
            h(a, m + b) = -NG(a, b);
            h(m + b, a) = -NG(a, b);
            h(m + a, m + b) = E(Gi(a, b));
        }
    return h;
}

MetricValue phase_metric(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                         double fhat_value, const Settings& s) {
    if (!std::isfinite(fhat_value)) throw SingularStructure("fhat is not finite");
    if (std::abs(fhat_value) <= s.eps_sing) throw SingularStructure("fhat vanishes: phase metric is degenerate");
    const int m = spec.dim;
    auto xs = coordinate_jets(x, m, 1);
    JetMat gm = spec.geometry->metric_at(xs);
    Connection Gm = christoffels(gm);
    Eigen::MatrixXd g = gm.values(), Gi = g.inverse(), N = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) N(a, i) += Gm(a, i, k).value() * q[k];
    Eigen::MatrixXd h(2 * m, 2 * m);
    h.topLeftCorner(m, m) = fhat_value * g + N * Gi * N.transpose();
    h.topRightCorner(m, m) = -N * Gi;
    h.bottomLeftCorner(m, m) = -Gi * N.transpose();
    h.bottomRightCorner(m, m) = Gi;
    MetricValue v;
    v.matrix = h;
    v.context = MetricContext::Phase;
    v.signature = fhat_value > 0 ? Signature::Riemannian : Signature::Kleinian;
    return v;
}

double phase_scalar_curvature(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                              const Settings& s) {
    const int m = spec.dim, d = 2 * m;
    Jet fh = fhat_jet(spec, x, q, 2);
    const double F = fh.value();
    if (std::abs(F) <= s.eps_sing) throw SingularStructure("fhat vanishes: curvature undefined");
    Jet L = abs_log(fh);

    // Beltrami Laplacian of L for the phase metric
    JetMat h = phase_metric_jets(spec, x, q, 1);
    JetMat H = inverse(h);
    Jet sd = sqrt_abs(determinant(h));
    double lap = 0;
    for (int a = 0; a < d; ++a) {
        Jet flux(d, 1, 0.0);
        for (int b = 0; b < d; ++b) flux += sd * H(a, b) * L.derivative(b);
        lap += flux.derivative(a).value();
    }
    lap /= sd.value();

    auto xs = coordinate_jets(x, m, 2);
    JetMat gm = spec.geometry->metric_at(xs);
    CurvatureValues cv = curvature_values(gm);
    Connection Gm = christoffels(gm);
    Eigen::MatrixXd g = gm.values(), G = g.inverse();

    // R_ijk^l R^{ijkm} q_l q_m
    double rr = 0;
    if (!spec.geometry->is_flat()) {
        std::vector<double> Rq(m * m * m, 0.0);  // R_ijk^l q_l
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) Rq[(i * m + j) * m + k] += cv.R(i, j, k, l) * q[l];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int a = 0; a < m; ++a)
                        for (int b = 0; b < m; ++b)
                            for (int c = 0; c < m; ++c)
                                rr += Rq[(i * m + j) * m + k] * G(i, a) * G(j, b) * G(k, c) * Rq[(a * m + b) * m + c];
    }

    std::vector<double> dq(m), DL(m);
    for (int i = 0; i < m; ++i) dq[i] = L.partial(mi({m + i}));
    for (int i = 0; i < m; ++i) {
        DL[i] = L.partial(mi({i}));
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) DL[i] += Gm(i, k, l).value() * q[l] * dq[k];
    }
    double qq = 0, dqdq = 0, DD = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            qq += g(i, j) * L.partial(mi({m + i, m + j}));
            dqdq += g(i, j) * dq[i] * dq[j];
            DD += G(i, j) * DL[i] * DL[j];
        }
    return cv.scalar / F - rr / (4 * F * F) - (m - 1) * lap - qq + (m - 1) * (m - 2) / (4 * F) * DD +
           0.25 * m * (m - 3) * dqdq;
}

double phase_scalar_curvature_flat(const FlowSpec& spec, const std::vector<double>& x, const Settings& s) {
    if (!spec.geometry->is_flat()) throw GeometryError("flat-background formula on a curved background");
    const int m = spec.dim;
    auto fj = eval_flow(spec, x, 3);
    Jet f = trace_term(velocity_gradient(fj), fj.ginv);
    const double F = f.value();
    if (std::abs(F) <= s.eps_sing) throw SingularStructure("f vanishes: curvature undefined");
    double grad = 0, lap = 0;
    for (int i = 0; i < m; ++i) {
        MultiIndex e{}, ee{};
        e[i] = 1;
        ee[i] = 2;
        grad += f.partial(e) * f.partial(e);
        lap += f.partial(ee);
    }
    return (m - 1) / (4 * F * F * F) * ((6 - m) * grad - 4 * F * lap);
}

double phase_scalar_curvature_oracle(const FlowSpec& spec, const std::vector<double>& x,
                                     const std::vector<double>& q) {
    return curvature_values(phase_metric_jets(spec, x, q, 2)).scalar;
}

JetMat pullback_metric_jets(const FlowSpec& spec, const std::vector<double>& x, int order) {
    auto fj = eval_flow(spec, x, order + 1);
    const int n = fj.dim;
    JetMat A = velocity_gradient(fj);
    JetMat g = truncate(fj.g, order), G = truncate(fj.ginv, order);
    Jet f = trace_term(A, G);
    JetMat out(n, Jet(n, order, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet s = f * g(i, j);
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += A(k, i) * G(k, l) * A(l, j);
            out(i, j) = s;
        }
    return out;
}

JetMat pullback_metric_hessian_form(const FlowSpec& spec, const std::vector<double>& x, int order) {
    require_stream(spec, "Hessian form");
    auto fj = eval_flow(spec, x, order + 1);
    auto xs = coordinate_jets(x, 2, order + 2);
    JetMat g = spec.geometry->metric_at(xs);
    JetMat H = covariant_hessian(fj.psi, christoffels(g));
    JetMat G = truncate(inverse(g), order);
    Jet zeta(2, order, 0.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) zeta += G(i, j) * H(i, j);
    JetMat out(2, zeta);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = zeta * H(i, j);
    return out;
}

MetricValue pullback_metric(const FlowSpec& spec, const std::vector<double>& x, const Settings& s) {
    return make_metric(pullback_metric_jets(spec, x, 0).values(), MetricContext::Pullback, s.eps_sing);
}

Eigenvalues pullback_eigenvalues(const MetricValue& metric, const KinematicState& kin) {
    const int n = static_cast<int>(metric.matrix.rows());
    // a 2x2 metric from a 3D state is a reduced metric on the base block
    Eigen::MatrixXd gbar = kin.gbar.topLeftCorner(n, n);
    Eigen::MatrixXd Linv = gbar.llt().matrixL().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd C = Linv * metric.matrix * Linv.transpose();
    C = 0.5 * (C + C.transpose());
    Eigenvalues out;
    if (n == 2) {
        Eigen::Matrix2d c = C;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
        es.computeDirect(c, Eigen::EigenvaluesOnly);
        out.values = {es.eigenvalues()[1], es.eigenvalues()[0]};
    } else {
        // the closed 3x3 solver loses ~1e-8 near repeated roots; QR iteration does not
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
        for (int i = n - 1; i >= 0; --i) out.values.push_back(es.eigenvalues()[i]);
    }
    if (kin.dim == 2) {
        double z = kin.scalar_vorticity;
        out.DR = std::sqrt(std::max(0.0, z * z - 4 * kin.f));
    }
    return out;
}

PullbackCurvature pullback_scalar_curvature(const FlowSpec& spec, const std::vector<double>& x, const Settings& s) {
    require_stream(spec, "pullback curvature");
    HessianData h = hessian_data(spec, x);
    const double zeta = h.zeta.value();
    if (std::abs(zeta) <= s.eps_sing) throw VanishingVorticity("vorticity vanishes: pullback metric is degenerate");
    JetMat ht = truncate(h.hess, 1);
    Jet det = determinant(ht);
    if (std::abs(det.value()) <= s.eps_sing) throw DegenerateHessian("Hessian of the stream function is degenerate");

    const int n = 2;
    Eigen::MatrixXd gt = h.hess.values(), Gt = gt.inverse(), gb = h.gbar.values();

    // psi_ijk: symmetrised nabla_i nabla_j d_k psi
    JetTensor H{n, {false, false}, h.hess.a};
    JetTensor DH = covariant_derivative(H, h.gamma);
    auto d3 = [&](int i, int j, int k) { return DH.at({i, j, k}).value(); };
    double p3[2][2][2];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                p3[i][j][k] = (d3(i, j, k) + d3(i, k, j) + d3(j, i, k) + d3(j, k, i) + d3(k, i, j) + d3(k, j, i)) / 6;

    Riemann Rm = riemann(h.gbar, h.gamma);  // order 2
    const double Rbar = curvature_values(h.gbar).scalar;
    JetTensor RT{n, {false, false, false, true}, Rm.c};
    JetTensor DR = covariant_derivative(RT, h.gamma);
    auto Rv = [&](int i, int j, int k, int l) { return Rm(i, j, k, l).value(); };
    // R_{k(ij)}^l and nabla_m R_{k(ij)}^l
    auto Rs = [&](int k, int i, int j, int l) { return 0.5 * (Rv(k, i, j, l) + Rv(k, j, i, l)); };
    auto DRs = [&](int m, int k, int i, int j, int l) {
        return 0.5 * (DR.at({m, k, i, j, l}).value() + DR.at({m, k, j, i, l}).value());
    };
    double dpsi[2] = {h.psi.partial(mi({0})), h.psi.partial(mi({1}))};

    double U[2][2][2];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double c = 0;
                for (int l = 0; l < n; ++l) c += dpsi[l] * Rs(k, i, j, l);
                U[i][j][k] = p3[i][j][k] + 4.0 / 3.0 * c;
            }

    double t1 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t1 += Gt(i, j) * gb(i, j);
    t1 *= 0.5 * Rbar;
    double t2 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            t2 += Gt(i, j) * Gt(k, l) * Gt(a, b) * (U[i][j][a] * U[k][l][b] - U[i][k][a] * U[j][l][b]);
    double t3 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double c = 0;
                    for (int a = 0; a < n; ++a) {
                        c += gt(i, a) * Rs(j, k, l, a) - gt(j, a) * Rs(l, i, k, a);
                        c += dpsi[a] * (DRs(i, j, k, l, a) - DRs(j, l, i, k, a));
                    }
                    t3 += Gt(i, j) * Gt(k, l) * c;
                }
    PullbackCurvature out;
    out.Rtilde = t1 - 0.25 * t2 + 2.0 / 3.0 * t3;

    // R = (R~ - Lap~ log|zeta|) / zeta
    JetMat Ht = inverse(ht);
    Jet sd = sqrt_abs(det);
    Jet lz = abs_log(h.zeta);
    double lap = 0;
    for (int i = 0; i < n; ++i) {
        Jet flux(2, 1, 0.0);
        for (int j = 0; j < n; ++j) flux += sd * Ht(i, j) * lz.derivative(j);
        lap += flux.derivative(i).value();
    }
    lap /= sd.value();
    out.R = (out.Rtilde - lap) / zeta;
    return out;
}

double pullback_scalar_curvature_oracle(const FlowSpec& spec, const std::vector<double>& x) {
    return curvature_values(pullback_metric_jets(spec, x, 2)).scalar;
}

double hessian_scalar_curvature_oracle(const FlowSpec& spec, const std::vector<double>& x) {
    require_stream(spec, "Hessian curvature");
    return curvature_values(hessian_data(spec, x).hess).scalar;
}

FlowClass classify(const FlowSpec& spec, const std::vector<double>& x, const Settings& s) {
    double f = kinematics(spec, x).f;
    if (f > s.eps_sing) return FlowClass::Elliptic;
    if (f < -s.eps_sing) return FlowClass::Hyperbolic;
    return FlowClass::Parabolic;
}

double helicity_density(const FlowSpec& spec, const std::vector<double>& x) {
    if (spec.dim != 3) throw DimensionError("helicity needs a 3D flow");
    auto fj = eval_flow(spec, x, 1);
    KinematicState k = kinematics(spec, x);
    const double sd = fj.sqrt_det.value();
    // zeta^i = [ijk] zeta_jk / sqrt(det g)
    double h = 0;
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, l = (i + 2) % 3;
        double zi = 2 * k.zeta(j, l) / sd;
        h += k.v_lower[i] * zi;
    }
    return h;
}

}  // namespace maf
