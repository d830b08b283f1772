#include "maf/structures.hpp"

#include <cmath>

namespace maf {

namespace {

template <class T>
struct FormSet {
    BasicForm<T> omega, varpi, alpha, theta, vol;
};

// Inputs: q_k, inverse metric G (m*m), sqrt det, Christoffels (m^3), fhat.
template <class T>
FormSet<T> assemble(int m, const std::vector<T>& q, const std::vector<T>& G, const T& sqrtg,
                    const std::vector<T>& gamma, const T& fhat, const T& zero) {
    const int d = 2 * m;
    const unsigned xall = (1u << m) - 1;
    auto mono = [&](unsigned mask, const T& c) { return BasicForm<T>::monomial(d, mask, c, zero); };
    const T one = zero + 1.0;

    std::vector<BasicForm<T>> dx, nq;
    for (int i = 0; i < m; ++i) dx.push_back(mono(1u << i, one));
    for (int i = 0; i < m; ++i) {
        BasicForm<T> f = mono(1u << (m + i), one);
        for (int j = 0; j < m; ++j) {
            T n = zero;
            for (int k = 0; k < m; ++k) n += gamma[(j * m + i) * m + k] * q[k];
            f[1u << j] -= n;
        }
        nq.push_back(f);
    }
    auto Gm = [&](int i, int j) -> const T& { return G[i * m + j]; };
    // *dx^i = sqrt g G^ij eps_{j..} dx^..
    auto star1 = [&](int i) {
        BasicForm<T> f(d, zero);
        for (int j = 0; j < m; ++j) {
            unsigned rest = xall & ~(1u << j);
            f[rest] += Gm(i, j) * sqrtg * double(wedge_sign(1u << j, rest));
        }
        return f;
    };
    auto star2 = [&](int i, int j) {
        BasicForm<T> f(d, zero);
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                unsigned ab = (1u << a) | (1u << b), rest = xall & ~ab;
                T minor = Gm(i, a) * Gm(j, b) - Gm(i, b) * Gm(j, a);
                f[rest] += minor * sqrtg * double(wedge_sign(ab, rest));
            }
        return f;
    };

    FormSet<T> s;
    s.vol = mono(xall, sqrtg);
    s.omega = BasicForm<T>(d, zero);
    s.varpi = BasicForm<T>(d, zero);
    s.alpha = BasicForm<T>(d, zero);
    s.theta = BasicForm<T>(d, zero);
    for (int i = 0; i < m; ++i) {
        s.omega += wedge(nq[i], dx[i]);
        s.varpi += wedge(nq[i], star1(i));
        s.theta[1u << i] += q[i];
        for (int j = i + 1; j < m; ++j) s.alpha += wedge(wedge(nq[i], nq[j]), star2(i, j));
    }
    BasicForm<T> fv = s.vol;
    fv *= fhat;
    s.alpha -= fv;
    return s;
}

FormSet<double> value_forms(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                            double fhat) {
    const int m = spec.dim;
    auto xs = coordinate_jets(x, m, 1);
    JetMat g = spec.geometry->metric_at(xs);
    Connection Gm = christoffels(g);
    Eigen::MatrixXd gv = g.values(), Gi = gv.inverse();
    std::vector<double> G(m * m), gam;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) G[i * m + j] = Gi(i, j);
    for (const auto& c : Gm.c) gam.push_back(c.value());
    return assemble<double>(m, q, G, std::sqrt(gv.determinant()), gam, fhat, 0.0);
}

FormSet<Jet> jet_forms(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q) {
    const int m = spec.dim, d = 2 * m;
    Jet fh = fhat_jet(spec, x, q, 1);
    auto xs = coordinate_jets(x, m, 2);
    JetMat g = spec.geometry->metric_at(xs);
    Connection Gm = christoffels(g);
    JetMat g1 = truncate(g, 1), Gi = inverse(g1);
    Jet sd = sqrt(determinant(g1)).embed(d);
    std::vector<Jet> G, gam, qs;
    for (const auto& v : Gi.a) G.push_back(v.embed(d));
    for (const auto& v : Gm.c) gam.push_back(v.embed(d));
    for (int i = 0; i < m; ++i) qs.push_back(Jet::variable(m + i, q[i], d, 1));
    return assemble<Jet>(m, qs, G, sd, gam, fh, Jet(d, 1, 0.0));
}

double norm_of(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::MatrixXd MAPoint::metric() const { return to_matrix(K) * J; }

Eigen::MatrixXd endomorphism_from(const FormValue& alpha, const FormValue& ref, double fhat) {
    Eigen::MatrixXd B = to_matrix(ref), A = to_matrix(alpha.grade_part(2));
    // alpha(X,Y) = ref(JX, Y): A = J^T B, i.e. J = B^-1 A for antisymmetric A, B
    return B.fullPivLu().solve(A) / std::sqrt(std::abs(fhat));
}

namespace {

// vector V with lambda(V) = eps _| (lambda ^ rho) for a (2m-1)-form rho
std::vector<double> vector_of(const FormValue& rho, double top_vol) {
    std::vector<double> v(rho.dim);
    for (int a = 0; a < rho.dim; ++a)
        v[a] = top_coeff(wedge(FormValue::monomial(rho.dim, 1u << a, 1.0), rho)) / top_vol;
    return v;
}

double liouville_top(const FormValue& omega) {
    FormValue w = omega;
    const int m = omega.dim / 2;
    double fact = 1;
    for (int k = 1; k < m; ++k) {
        w = wedge(w, omega);
        fact *= k + 1;
    }
    double t = top_coeff(w) / fact;
    if (t == 0.0) throw DegenerateReference("Liouville volume vanishes");
    return t;
}

}  // namespace

Eigen::MatrixXd endomorphism_liouville(const FormValue& alpha, const FormValue& omega, double fhat) {
    const int d = alpha.dim;
    const double vol = liouville_top(omega);
    Eigen::MatrixXd J(d, d);
    for (int b = 0; b < d; ++b) {
        auto v = vector_of(wedge(alpha, interior_basis(b, alpha)), vol);
        for (int a = 0; a < d; ++a) J(a, b) = -v[a] / (2 * std::sqrt(std::abs(fhat)));
    }
    return J;
}

Eigen::MatrixXd endomorphism_liouville_2d(const FormValue& alpha, const FormValue& varpi, const FormValue& omega,
                                          double fhat) {
    const double vol = liouville_top(omega);
    Eigen::MatrixXd J(4, 4);
    for (int b = 0; b < 4; ++b) {
        auto v = vector_of(wedge(varpi, interior_basis(b, alpha)), vol);
        for (int a = 0; a < 4; ++a) J(a, b) = v[a] / std::sqrt(std::abs(fhat));
    }
    return J;
}

MAPoint build_structure(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                        double fhat, const Settings& s) {
    const int m = spec.dim;
    if (static_cast<int>(x.size()) != m || static_cast<int>(q.size()) != m)
        throw DimensionError("phase point needs " + std::to_string(m) + " + " + std::to_string(m) + " coordinates");
    if (m != 2 && m != 3) throw DimensionError("structures are built in two and three dimensions");
    if (std::abs(fhat) <= s.eps_sing) throw SingularStructure("fhat vanishes: J is undefined");
    auto f = value_forms(spec, x, q, fhat);
    MAPoint p;
    p.m = m;
    p.x = x;
    p.q = q;
    p.fhat = fhat;
    p.omega = f.omega;
    p.varpi = f.varpi;
    p.alpha = f.alpha;
    p.theta = f.theta;
    p.vol = f.vol;
    const double r = std::sqrt(std::abs(fhat));
    if (m == 2) {
        p.J = endomorphism_from(f.alpha, f.omega, fhat);
        p.K = f.varpi * -r;
        p.J_varpi = endomorphism_from(f.alpha, f.varpi, fhat);
        p.K_varpi = f.omega * r;
    } else {
        p.J = endomorphism_liouville(f.alpha, f.omega, fhat);
        p.K = f.omega * r;
    }
    return p;
}

MAPoint build_structure(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                        const Settings& s) {
    return build_structure(spec, x, q, fhat(spec, x, q), s);
}

std::map<std::string, double> verify_structure(const MAPoint& p, const FlowSpec& spec, const Settings& s) {
    std::map<std::string, double> r;
    const int d = 2 * p.m;
    r["effective_alpha_omega"] = max_abs(wedge(p.alpha, p.omega));
    r["effective_varpi_omega"] = max_abs(wedge(p.varpi, p.omega));
    if (p.m == 2) r["effective_alpha_varpi"] = max_abs(wedge(p.alpha, p.varpi));

    auto jf = jet_forms(spec, p.x, p.q);
    r["closure_varpi"] = max_abs(value_of(exterior_derivative(jf.varpi)));
    r["closure_alpha"] = max_abs(value_of(exterior_derivative(jf.alpha)));

    const double sgn = p.fhat > 0 ? 1.0 : -1.0;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd ghat = phase_metric(spec, p.x, p.q, p.fhat, s).matrix;
    auto check = [&](const std::string& tag, const Eigen::MatrixXd& J, const FormValue& K) {
        Eigen::MatrixXd Km = to_matrix(K);
        r["J_square" + tag] = norm_of(J * J + sgn * I);
        r["metric" + tag] = norm_of(Km * J - ghat);
        r["antisymmetry" + tag] = norm_of(J.transpose() * Km + Km * J);
    };
    check("", p.J, p.K);
    if (p.m == 2) {
        r["pfaffian"] = std::abs(pfaffian(p.alpha, p.omega) - p.fhat);
        check("_varpi", p.J_varpi, p.K_varpi);
    }
    return r;
}

PullbackResiduals pullback_forms(const FlowSpec& spec, const std::vector<double>& x) {
    const int m = spec.dim, d = 2 * m;
    auto fj = eval_flow(spec, x, 1);
    std::vector<double> q;
    for (const auto& v : fj.v_lower) q.push_back(v.value());
    auto f = value_forms(spec, x, q, fhat(spec, x, q));
    // push-forward of the coordinate vectors along x -> (x, v(x))
    std::vector<std::vector<double>> e(m, std::vector<double>(d, 0.0));
    for (int a = 0; a < m; ++a) {
        e[a][a] = 1;
        for (int i = 0; i < m; ++i) e[a][m + i] = fj.v_lower[i].derivative(a).value();
    }
    const double vol = f.vol[(1u << m) - 1];
    PullbackResiduals r;
    r.varpi = evaluate(f.varpi.grade_part(m), e) / vol;
    r.alpha = evaluate(f.alpha.grade_part(m), e) / vol;
    if (m == 2) r.omega = evaluate(f.omega, e) / vol;
    return r;
}

FormValue construct_K(const FormValue& omega, const FormValue& Jomega, const std::optional<FormValue>& seed) {
    if (omega.dim != 4) throw ExteriorError("construct_K needs dimension 4");
    const double ww = top_coeff(wedge(omega, omega));
    if (std::abs(ww) < 1e-12) throw DegenerateReference("omega ^ omega vanishes");
    if (std::abs(top_coeff(wedge(Jomega, Jomega))) < 1e-12) throw DegenerateReference("Jomega ^ Jomega vanishes");

    std::vector<FormValue> seeds;
    if (seed) seeds.push_back(*seed);
    // deterministic fall-backs: sums of basis monomials with distinct weights
    for (int k = 0; k < 6; ++k) {
        FormValue r(4);
        unsigned masks[6] = {0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100};
        for (int i = 0; i < 6; ++i) r[masks[i]] = std::cos(1.0 + 0.7 * i * (k + 1));
        seeds.push_back(r);
    }
    for (const auto& rho : seeds) {
        FormValue rho0 = effective_decompose(rho.grade_part(2), omega).rho0;
        FormValue K = effective_decompose(rho0, Jomega).rho0;
        if (std::abs(top_coeff(wedge(K, K))) > 1e-8 * std::abs(ww)) return K;
    }
    throw SeedDependent("no seed gave a non-degenerate K");
}

}  // namespace maf
