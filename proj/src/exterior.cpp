#include "maf/exterior.hpp"

#include <cmath>

namespace maf {

FormValue interior(const PolyVector& p, const FormValue& a) {
    p.check(a);
    FormValue r(a.dim);
    for (unsigned m = 0; m < p.c.size(); ++m) {
        if (p.c[m] == 0.0) continue;
        FormValue t = a;
        for (unsigned rest = m; rest; rest &= rest - 1) t = interior_basis(std::countr_zero(rest), t);
        r += t * p.c[m];
    }
    return r;
}

double evaluate(const FormValue& a, const std::vector<std::vector<double>>& vectors) {
    FormValue t = a.grade_part(static_cast<int>(vectors.size()));
    for (const auto& v : vectors) t = interior(v, t);
    return t.c[0];
}

Eigen::MatrixXd to_matrix(const FormValue& two_form) {
    int n = two_form.dim;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = two_form.c[(1u << i) | (1u << j)];
            m(j, i) = -m(i, j);
        }
    return m;
}

FormValue from_matrix(const Eigen::MatrixXd& m) {
    int n = static_cast<int>(m.rows());
    FormValue f(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) f.c[(1u << i) | (1u << j)] = 0.5 * (m(i, j) - m(j, i));
    return f;
}

PolyVector dual_polyvector(const FormValue& volume) {
    double v = top_coeff(volume);
    if (v == 0.0) throw DegenerateReference("volume form vanishes");
    PolyVector e = make_polyvector(volume.dim);
    e.c[volume.top()] = 1.0 / v;
    return e;
}

namespace {

std::vector<int> bits_of(unsigned m) {
    std::vector<int> out;
    for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
}

}  // namespace

FormValue hodge_star(const FormValue& a, const Eigen::MatrixXd& g, const FormValue& orientation) {
    int n = a.dim;
    if (g.rows() != n || g.cols() != n) throw ExteriorError("metric size mismatch");
    double det = g.determinant();
    if (!(std::abs(det) > 1e-300)) throw DegenerateMetric("degenerate metric in hodge star");
    double o = top_coeff(orientation);
    if (o == 0.0) throw DegenerateReference("orientation form vanishes");
    Eigen::MatrixXd gi = g.inverse();

    FormValue vol(n);
    vol.c[vol.top()] = std::sqrt(std::abs(det)) * (o > 0 ? 1.0 : -1.0);

    // raise all indices: a^I = sum_J det(ginv[I,J]) a_J
    PolyVector up = make_polyvector(n);
    for (unsigned I = 1; I < a.c.size(); ++I) {
        auto bi = bits_of(I);
        double s = 0;
        for (unsigned J = 1; J < a.c.size(); ++J) {
            if (grade_of(J) != static_cast<int>(bi.size()) || a.c[J] == 0.0) continue;
            auto bj = bits_of(J);
            Eigen::MatrixXd sub(bi.size(), bj.size());
            for (std::size_t p = 0; p < bi.size(); ++p)
                for (std::size_t q = 0; q < bj.size(); ++q) sub(p, q) = gi(bi[p], bj[q]);
            s += sub.determinant() * a.c[J];
        }
        up.c[I] = s;
    }
    FormValue r = interior(up, vol);
    // 0-forms map to a times the volume form
    r.c[vol.top()] += a.c[0] * vol.c[vol.top()];
    return r;
}

FormValue hodge_star(const FormValue& a, const Eigen::MatrixXd& g) {
    FormValue o(a.dim);
    o.c[o.top()] = 1.0;
    return hodge_star(a, g, o);
}

double pfaffian(const FormValue& a, const FormValue& omega) {
    if (a.dim != 4) throw ExteriorError("pfaffian needs dimension 4");
    double ww = top_coeff(wedge(omega, omega));
    if (std::abs(ww) < 1e-300) throw DegenerateReference("omega ^ omega vanishes");
    FormValue a2 = a.grade_part(2);
    return top_coeff(wedge(a2, a2)) / ww;
}

EffectiveSplit effective_decompose(const FormValue& rho, const FormValue& omega) {
    if (rho.dim != 4) throw ExteriorError("effective decomposition needs dimension 4");
    double ww = top_coeff(wedge(omega, omega));
    if (std::abs(ww) < 1e-300) throw DegenerateReference("omega ^ omega vanishes");
    EffectiveSplit s;
    s.lambda0 = top_coeff(wedge(rho, omega)) / ww;
    s.rho0 = rho - omega * s.lambda0;
    return s;
}

JetForm exterior_derivative(const JetForm& a) {
    const Jet* proto = nullptr;
    for (const auto& v : a.c)
        if (v.valid()) { proto = &v; break; }
    if (!proto) throw ExteriorError("empty jet form");
    if (proto->dim() != a.dim) throw ExteriorError("jet variables must match the form dimension");
    Jet zero(proto->dim(), proto->order() - 1, 0.0);
    JetForm r(a.dim, zero);
    for (unsigned m = 0; m < a.c.size(); ++m) {
        for (int i = 0; i < a.dim; ++i) {
            int s = wedge_sign(1u << i, m);
            if (!s) continue;
            r.c[m | (1u << i)] += a.c[m].derivative(i) * double(s);
        }
    }
    return r;
}

FormValue value_of(const JetForm& a) {
    FormValue r(a.dim);
    for (unsigned m = 0; m < a.c.size(); ++m) r.c[m] = a.c[m].valid() ? a.c[m].value() : 0.0;
    return r;
}

double max_abs(const FormValue& a) {
    double m = 0;
    for (double v : a.c) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace maf
