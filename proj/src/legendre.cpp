#include "maf/legendre.hpp"

#include "maf/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace maf {

namespace {

struct Local {
    double psi;
    Eigen::Vector2d grad;
    Eigen::Matrix2d hess;
};

Local local(const FlowSpec& spec, const Eigen::Vector2d& x) {
    Jet psi = eval_psi(spec, {Jet::variable(0, x(0), 2, 2), Jet::variable(1, x(1), 2, 2)});
    Local l;
    l.psi = psi.value();
    l.grad << psi.partial({1, 0}), psi.partial({0, 1});
    l.hess << psi.partial({2, 0}), psi.partial({1, 1}), psi.partial({1, 1}), psi.partial({0, 2});
    return l;
}

bool is_fold(const Eigen::Matrix2d& h, double eps) {
    return std::abs(h.determinant()) <= eps * h.squaredNorm();
}

LegendrePoint make_point(const Eigen::Vector2d& x, const Local& l) {
    LegendrePoint p;
    p.primal = {x(0), x(1)};
    p.dual = {l.grad(0), l.grad(1)};
    p.psi = l.psi;
    p.psi_dual = l.grad.dot(x) - l.psi;
    p.hessian = l.hess;
    p.det_hessian = l.hess.determinant();
    p.sheet = p.det_hessian > 0 ? 1 : -1;
    return p;
}

// sum_k c_k D^k for a 2-variable Taylor jet f at the base point, D with zero constant term
Jet compose2(const Jet& f, const std::array<Jet, 2>& D) {
    const auto& lay = f.layout();
    const int n = f.order();
    std::vector<std::array<Jet, 2>> pw(n + 1);
    pw[0] = {Jet(D[0].dim(), D[0].order(), 1.0), Jet(D[0].dim(), D[0].order(), 1.0)};
    for (int k = 1; k <= n; ++k) pw[k] = {pw[k - 1][0] * D[0], pw[k - 1][1] * D[1]};
    Jet r(D[0].dim(), D[0].order(), 0.0);
    for (int slot = 0; slot < lay.size; ++slot) {
        double c = f.coeff(slot);
        if (c == 0) continue;
        const auto& k = lay.index[slot];
        r += pw[k[0]][0] * pw[k[1]][1] * c;
    }
    return r;
}

}  // namespace

LegendrePoint to_dual(const FlowSpec& spec, const std::array<double, 2>& x, const LegendreSettings& s) {
    if (spec.dim != 2 || !spec.psi) throw DimensionError("Legendre duality needs a 2D stream function");
    Eigen::Vector2d xv(x[0], x[1]);
    Local l = local(spec, xv);
    if (is_fold(l.hess, s.eps_fold))
        throw FoldSingularity("Hessian of psi is degenerate at (" + std::to_string(x[0]) + ", " +
                              std::to_string(x[1]) + ")");
    return make_point(xv, l);
}

LegendrePoint from_dual(const FlowSpec& spec, const std::array<double, 2>& dual, int sheet, const LegendreSettings& s,
                        std::optional<std::array<double, 2>> seed) {
    if (spec.dim != 2 || !spec.psi) throw DimensionError("Legendre duality needs a 2D stream function");
    const Eigen::Vector2d p(dual[0], dual[1]);
    const auto& b = s.box;
    auto inside = [&](const Eigen::Vector2d& x) { return x(0) >= b[0] && x(0) <= b[1] && x(1) >= b[2] && x(1) <= b[3]; };

    Eigen::Vector2d x;
    if (seed) {
        x << (*seed)[0], (*seed)[1];
    } else {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= s.grid; ++i)
            for (int j = 0; j <= s.grid; ++j) {
                Eigen::Vector2d y(b[0] + (b[1] - b[0]) * i / s.grid, b[2] + (b[3] - b[2]) * j / s.grid);
                Local l = local(spec, y);
                if (is_fold(l.hess, s.eps_fold) || (l.hess.determinant() > 0 ? 1 : -1) != sheet) continue;
                double r = (l.grad - p).norm();
                if (r < best) best = r, x = y;
            }
        if (!std::isfinite(best)) throw OutsideSheetDomain("no primal grid point on the requested sheet");
    }

    Local l = local(spec, x);
    double res = (l.grad - p).norm();
    for (int it = 0; it < s.max_iter; ++it) {
        if (res <= 1e-14 * (1 + p.norm())) break;
        if (is_fold(l.hess, s.eps_fold)) break;
        Eigen::Vector2d step = l.hess.partialPivLu().solve(l.grad - p);
        double lambda = 1;
        bool moved = false;
        for (int h = 0; h < 40; ++h, lambda *= 0.5) {
            Eigen::Vector2d y = x - lambda * step;
            if (!inside(y)) continue;
            Local ly = local(spec, y);
            if (is_fold(ly.hess, s.eps_fold) || (ly.hess.determinant() > 0 ? 1 : -1) != sheet) continue;
            double ry = (ly.grad - p).norm();
            if (ry < res) {
                x = y, l = ly, res = ry, moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (!(res <= 1e-10 * (1 + p.norm())) || (l.hess.determinant() > 0 ? 1 : -1) != sheet)
        throw OutsideSheetDomain("dual point (" + std::to_string(dual[0]) + ", " + std::to_string(dual[1]) +
                                 ") is not reached on sheet " + std::to_string(sheet));
    return make_point(x, l);
}

JetMat dual_hessian_jets(const FlowSpec& spec, const std::array<double, 2>& x, int order) {
    if (order > 2) throw OrderExceeded("dual Hessian jets are limited to order 2");
    const int k = order + 2;
    Jet psi = eval_psi(spec, {Jet::variable(0, x[0], 2, k), Jet::variable(1, x[1], 2, k)});
    std::array<Jet, 2> grad = {psi.derivative(0), psi.derivative(1)};
    Eigen::Matrix2d H;
    H << psi.partial({2, 0}), psi.partial({1, 1}), psi.partial({1, 1}), psi.partial({0, 2});
    if (is_fold(H, LegendreSettings{}.eps_fold)) throw FoldSingularity("Hessian of psi is degenerate");
    const Eigen::Matrix2d Hi = H.inverse();

    // displacement X - x as jets in the dual variables; Newton with the frozen Hessian gains one order per sweep
    const std::array<Jet, 2> P = {Jet::variable(0, grad[0].value(), 2, order),
                                  Jet::variable(1, grad[1].value(), 2, order)};
    std::array<Jet, 2> D = {Jet(2, order, 0.0), Jet(2, order, 0.0)};
    std::array<Jet, 2> G = {grad[0].truncate(order), grad[1].truncate(order)};
    for (int it = 0; it <= order + 1; ++it) {
        Jet r0 = compose2(G[0], D) - P[0], r1 = compose2(G[1], D) - P[1];
        D[0] -= r0 * Hi(0, 0) + r1 * Hi(0, 1);
        D[1] -= r0 * Hi(1, 0) + r1 * Hi(1, 1);
    }
    JetMat hess(2, Jet(2, order));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) hess(i, j) = compose2(grad[i].derivative(j), D);
    return inverse(hess);
}

DualDiagnostics dual_diagnostics(const FlowSpec& spec, const std::array<double, 2>& dual, int sheet,
                                 const LegendreSettings& s, std::optional<std::array<double, 2>> seed) {
    DualDiagnostics d;
    d.point = from_dual(spec, dual, sheet, s, seed);
    JetMat hd = dual_hessian_jets(spec, d.point.primal, 2);
    d.hessian_dual = hd.values();
    d.gtilde_dual = d.hessian_dual;
    d.f = d.point.det_hessian;  // f on flat backgrounds
    d.laplacian_dual = d.hessian_dual.trace();
    d.zeta_dual = d.f * d.laplacian_dual;

    // f = 1/det Hess psi' on the dual side, so the metric jets need no primal data
    Jet lap = hd(0, 0) + hd(1, 1);
    Jet zeta = lap / determinant(hd);
    JetMat g(2, Jet(2, 2));
    for (int i = 0; i < 4; ++i) g.a[i] = zeta * hd.a[i];
    d.metric_dual = g.values();
    d.R_dual = curvature_values(g).scalar;
    return d;
}

double dual_MA_residual(const FlowSpec& spec, const std::array<double, 2>& x, const LegendreSettings& s) {
    to_dual(spec, x, s);  // fold check
    double f = kinematics(spec, {x[0], x[1]}).f;
    double det = dual_hessian_jets(spec, x, 0).values().determinant();
    return std::abs(f * det - 1);
}

}  // namespace maf
