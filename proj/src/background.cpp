#include "maf/background.hpp"

#include <cmath>

namespace maf {

Eigen::MatrixXd JetMat::values() const {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = (*this)(i, j).value();
    return m;
}

JetMat inverse(const JetMat& m) {
    int n = m.n;
    const Jet& proto = m.a[0];
    JetMat a = m;
    JetMat r(n, Jet(proto.dim(), proto.order(), 0.0));
    for (int i = 0; i < n; ++i) r(i, i) = Jet(proto.dim(), proto.order(), 1.0);
    double scale = 0;
    for (const auto& v : m.a) scale = std::max(scale, std::abs(v.value()));
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a(row, col).value()) > std::abs(a(piv, col).value())) piv = row;
        if (!(std::abs(a(piv, col).value()) > 1e-14 * std::max(scale, 1e-300)))
            throw DegenerateMetric("singular metric");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(r(col, j), r(piv, j));
            }
        Jet inv = maf::inverse(a(col, col));
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) * inv;
            r(col, j) = r(col, j) * inv;
        }
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            Jet f = a(row, col);
            for (int j = 0; j < n; ++j) {
                a(row, j) -= f * a(col, j);
                r(row, j) -= f * r(col, j);
            }
        }
    }
    return r;
}

Jet determinant(const JetMat& m) {
    int n = m.n;
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (n == 3)
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    // Laplace expansion along the first row
    const Jet& proto = m.a[0];
    Jet d(proto.dim(), proto.order(), 0.0);
    for (int c = 0; c < n; ++c) {
        JetMat sub(n - 1, proto);
        for (int i = 1; i < n; ++i)
            for (int j = 0, k = 0; j < n; ++j)
                if (j != c) sub(i - 1, k++) = m(i, j);
        Jet t = m(0, c) * determinant(sub);
        if (c % 2) d -= t;
        else d += t;
    }
    return d;
}

JetMat truncate(const JetMat& m, int order) {
    JetMat r = m;
    for (auto& v : r.a) v = v.truncate(order);
    return r;
}

Connection christoffels(const JetMat& g) {
    int n = g.n;
    int o = g.a[0].order();
    if (o < 1) throw GeometryError("christoffels need metric jets of order >= 1");
    JetMat gi = truncate(inverse(g), o - 1);
    // dg[l](i,j) = d_l g_ij
    std::vector<JetMat> dg;
    for (int l = 0; l < n; ++l) {
        JetMat d(n, Jet(g.a[0].dim(), o - 1));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(i, j) = g(i, j).derivative(l);
        dg.push_back(std::move(d));
    }
    Connection G;
    G.n = n;
    G.c.assign(n * n * n, Jet(g.a[0].dim(), o - 1));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::vector<Jet> lower;
            for (int l = 0; l < n; ++l) lower.push_back((dg[i](j, l) + dg[j](i, l) - dg[l](i, j)) * 0.5);
            for (int k = 0; k < n; ++k) {
                Jet s(g.a[0].dim(), o - 1);
                for (int l = 0; l < n; ++l) s += gi(k, l) * lower[l];
                G(i, j, k) = s;
                G(j, i, k) = s;
            }
        }
    return G;
}

Riemann riemann(const JetMat& g, const Connection& G) {
    int n = g.n;
    int o = G.c[0].order();
    if (o < 1) throw GeometryError("riemann needs metric jets of order >= 2");
    int dim = G.c[0].dim();
    Connection T;
    T.n = n;
    for (const auto& v : G.c) T.c.push_back(v.truncate(o - 1));
    Riemann R;
    R.n = n;
    R.c.assign(n * n * n * n, Jet(dim, o - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    Jet s = G(j, k, l).derivative(i) - G(i, k, l).derivative(j);
                    for (int m = 0; m < n; ++m) s += T(j, k, m) * T(i, m, l) - T(i, k, m) * T(j, m, l);
                    R(i, j, k, l) = s;
                }
        }
    return R;
}

CurvatureValues curvature_values(const JetMat& g) {
    Connection G = christoffels(g);
    Riemann R = riemann(g, G);
    int n = g.n;
    CurvatureValues cv;
    cv.n = n;
    for (const auto& v : R.c) cv.riemann.push_back(v.value());
    cv.ricci = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) cv.ricci(i, j) += cv.R(k, i, j, k);
    Eigen::MatrixXd gi = g.values().inverse();
    cv.scalar = (gi.cwiseProduct(cv.ricci)).sum();
    return cv;
}

Jet ricci_scalar(const JetMat& g) {
    Connection G = christoffels(g);
    Riemann R = riemann(g, G);
    int n = g.n;
    int o = R.c[0].order();
    JetMat gi = truncate(inverse(g), o);
    Jet s(R.c[0].dim(), o);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet ric(R.c[0].dim(), o);
            for (int k = 0; k < n; ++k) ric += R(k, i, j, k);
            s += gi(i, j) * ric;
        }
    return s;
}

int JetTensor::flat(const std::vector<int>& idx) const {
    int f = 0;
    for (int v : idx) f = f * n + v;
    return f;
}

JetTensor scalar_tensor(const Jet& s, int n) {
    JetTensor t;
    t.n = n;
    t.c = {s};
    return t;
}

JetTensor covariant_derivative(const JetTensor& t, const Connection& G) {
    int n = t.n;
    int r = t.rank();
    int o = t.c[0].order();
    if (o < 1) throw GeometryError("covariant derivative needs jets of order >= 1");
    int dim = t.c[0].dim();
    std::vector<Jet> gam;
    for (const auto& v : G.c) gam.push_back(v.order() >= o ? v.truncate(o - 1) : v);
    auto Gm = [&](int i, int j, int k) -> const Jet& { return gam[(i * n + j) * n + k]; };
    std::vector<Jet> low;
    for (const auto& v : t.c) low.push_back(v.truncate(o - 1));

    JetTensor out;
    out.n = n;
    out.upper = t.upper;
    out.upper.insert(out.upper.begin(), false);
    int total = 1;
    for (int s = 0; s < r + 1; ++s) total *= n;
    out.c.assign(total, Jet(dim, o - 1));
    std::vector<int> idx(r);
    int count = static_cast<int>(t.c.size());
    for (int f = 0; f < count; ++f) {
        for (int s = r - 1, rem = f; s >= 0; --s) {
            idx[s] = rem % n;
            rem /= n;
        }
        for (int i = 0; i < n; ++i) {
            Jet v = t.c[f].derivative(i);
            for (int s = 0; s < r; ++s) {
                std::vector<int> j2 = idx;
                for (int m = 0; m < n; ++m) {
                    j2[s] = m;
                    const Jet& tm = low[t.flat(j2)];
                    // upper: + Gamma_im^a T^..m..; lower: - Gamma_ia^m T_..m..
                    if (t.upper[s]) v += Gm(i, m, idx[s]) * tm;
                    else v -= Gm(i, idx[s], m) * tm;
                }
            }
            out.c[i * count + f] = v;
        }
    }
    return out;
}

std::vector<Jet> gradient(const Jet& psi, int n) {
    std::vector<Jet> g;
    for (int i = 0; i < n; ++i) g.push_back(psi.derivative(i));
    return g;
}

JetMat covariant_hessian(const Jet& psi, const Connection& G) {
    int n = G.n;
    int o = psi.order() - 2;
    JetMat h(n, Jet(psi.dim(), o));
    auto d = gradient(psi, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet v = d[j].derivative(i);
            for (int k = 0; k < n; ++k) v -= G(i, j, k).truncate(o) * d[k].truncate(o);
            h(i, j) = v;
        }
    return h;
}

Bindings BackgroundGeometry::bind(const std::vector<Jet>& x) const {
    Bindings b;
    for (std::size_t i = 0; i < coords.size() && i < x.size(); ++i) b.vars[coords[i]] = x[i];
    b.params = params;
    return b;
}

JetMat BackgroundGeometry::metric_at(const std::vector<Jet>& x) const {
    if (static_cast<int>(x.size()) < dim) throw GeometryError("too few coordinates for " + name);
    const Jet& proto = x[0];
    if (base) {
        std::vector<Jet> bx(x.begin(), x.begin() + base->dim);
        JetMat g2 = base->metric_at(bx);
        JetMat g(dim, Jet(proto.dim(), proto.order(), 0.0));
        for (int i = 0; i < base->dim; ++i)
            for (int j = 0; j < base->dim; ++j) g(i, j) = g2(i, j);
        g(dim - 1, dim - 1) = exp(warp_at(x) * 2.0);
        return g;
    }
    if (flat_) {
        JetMat g(dim, Jet(proto.dim(), proto.order(), 0.0));
        for (int i = 0; i < dim; ++i) g(i, i) = Jet(proto.dim(), proto.order(), 1.0);
        return g;
    }
    Bindings b = bind(x);
    JetMat g(dim, proto);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = evaluate(metric[i * dim + j], b);
    return g;
}

Jet BackgroundGeometry::warp_at(const std::vector<Jet>& x) const {
    const Jet& proto = x[0];
    if (!warp) return Jet(proto.dim(), proto.order(), 0.0);
    const auto& b = base ? *base : *this;
    return evaluate(warp, b.bind(x));
}

namespace {

std::shared_ptr<BackgroundGeometry> make(const std::string& name, int dim, std::vector<std::string> coords) {
    auto g = std::make_shared<BackgroundGeometry>();
    g->name = name;
    g->dim = dim;
    g->coords = std::move(coords);
    return g;
}

}  // namespace

Geometry flat_geometry(int dim) {
    if (dim == 2) {
        auto g = make("flat2d", 2, {"x", "y"});
        g->flat_ = true;
        return g;
    }
    if (dim == 3) {
        auto g = make("flat3d", 3, {"x", "y", "z"});
        g->flat_ = true;
        return g;
    }
    throw GeometryError("flat geometry needs dimension 2 or 3");
}

Geometry warped_product(Geometry base, const std::string& phi, const std::string& name, const std::string& third) {
    if (base->dim != 2) throw GeometryError("warped products are built over a 2D base");
    auto g = make(name, 3, {base->coords[0], base->coords[1], third});
    std::set<std::string> pnames;
    for (const auto& [k, v] : base->params) pnames.insert(k);
    g->warp = parse_expression(phi, pnames);
    g->base = base;
    g->params = base->params;
    g->flat_ = false;
    return g;
}

Geometry cylindrical_geometry() {
    auto base = make("meridian", 2, {"r", "z"});
    base->flat_ = true;
    return warped_product(base, "log(r)", "cylindrical", "theta");
}

Geometry geometry_from_metric(const std::string& name, const std::vector<std::string>& coords,
                              const std::vector<std::string>& entries, const std::map<std::string, double>& params) {
    int dim = static_cast<int>(coords.size());
    if (static_cast<int>(entries.size()) != dim * dim) throw GeometryError("metric needs dim*dim entries");
    auto g = make(name, dim, coords);
    g->params = params;
    std::set<std::string> pnames;
    for (const auto& [k, v] : params) pnames.insert(k);
    for (const auto& e : entries) g->metric.push_back(parse_expression(e, pnames));
    return g;
}

Geometry sphere_geometry(double radius) {
    return geometry_from_metric("sphere", {"x", "y"}, {"a^2", "0", "0", "a^2*sin(x)^2"}, {{"a", radius}});
}

Geometry curved2d_geometry() {
    return geometry_from_metric("curved2d", {"x", "y"},
                                {"1 + 0.2*y^2", "0.1*x*y", "0.1*x*y", "exp(0.4*x)"});
}

Geometry geometry_by_name(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "flat2d") return flat_geometry(2);
    if (name == "flat3d") return flat_geometry(3);
    if (name == "cylindrical") return cylindrical_geometry();
    if (name == "sphere") {
        auto it = params.find("a");
        return sphere_geometry(it == params.end() ? 1.0 : it->second);
    }
    if (name == "curved2d") return curved2d_geometry();
    throw GeometryError("unknown geometry '" + name + "'");
}

std::vector<std::string> geometry_names() { return {"flat2d", "flat3d", "cylindrical", "sphere", "curved2d"}; }

std::vector<Jet> coordinate_jets(const std::vector<double>& point, int vars, int order) {
    std::vector<Jet> x;
    for (std::size_t i = 0; i < point.size(); ++i) x.push_back(Jet::variable(static_cast<int>(i), point[i], vars, order));
    return x;
}

}  // namespace maf
