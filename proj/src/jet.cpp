#include "maf/jet.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace maf {

namespace {

int code_of(const MultiIndex& k) {
    int c = 0, base = 1;
    for (int i = 0; i < kMaxJetDim; ++i) {
        c += k[i] * base;
        base *= kMaxJetOrder + 1;
    }
    return c;
}

constexpr int kCodeSpace = 15625;  // 5^6

// All multi-indices of dimension `dim` and exact degree `deg`, in a fixed
// lexicographic order (first axis varies slowest).
void enumerate_degree(int dim, int deg, int axis, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (axis == dim - 1) {
        cur[axis] = static_cast<std::uint8_t>(deg);
        out.push_back(cur);
        cur[axis] = 0;
        return;
    }
    for (int d = deg; d >= 0; --d) {
        cur[axis] = static_cast<std::uint8_t>(d);
        enumerate_degree(dim, deg - d, axis + 1, cur, out);
    }
    cur[axis] = 0;
}

std::unique_ptr<JetLayout> build_layout(int dim, int order) {
    auto L = std::make_unique<JetLayout>();
    L->dim = dim;
    L->order = order;
    L->lookup.assign(kCodeSpace, -1);
    for (int deg = 0; deg <= order; ++deg) {
        L->degree_start.push_back(static_cast<int>(L->index.size()));
        MultiIndex cur{};
        enumerate_degree(dim, deg, 0, cur, L->index);
        while (L->degree.size() < L->index.size()) L->degree.push_back(deg);
    }
    L->size = static_cast<int>(L->index.size());
    L->degree_start.push_back(L->size);
    for (int s = 0; s < L->size; ++s) L->lookup[code_of(L->index[s])] = s;

    for (int a = 0; a < L->size; ++a) {
        for (int b = 0; b < L->size; ++b) {
            if (L->degree[a] + L->degree[b] > order) continue;
            MultiIndex k{};
            for (int i = 0; i < dim; ++i) k[i] = L->index[a][i] + L->index[b][i];
            L->mul.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                              static_cast<std::uint16_t>(L->lookup[code_of(k)])});
        }
    }
    if (order > 0) {
        // slots of the order-1 layout are a prefix of ours
        int lower = L->degree_start[order];
        for (int axis = 0; axis < dim; ++axis) {
            auto& sh = L->shift[axis];
            sh.resize(lower);
            for (int s = 0; s < lower; ++s) {
                MultiIndex k = L->index[s];
                k[axis] += 1;
                sh[s] = L->lookup[code_of(k)];
            }
        }
    }
    return L;
}

struct LayoutTable {
    std::array<std::array<std::unique_ptr<JetLayout>, kMaxJetOrder + 1>, kMaxJetDim + 1> t;
    LayoutTable() {
        for (int d = 1; d <= kMaxJetDim; ++d)
            for (int o = 0; o <= kMaxJetOrder; ++o) t[d][o] = build_layout(d, o);
    }
};

double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

int JetLayout::find(const MultiIndex& k) const {
    int deg = 0;
    for (int i = 0; i < kMaxJetDim; ++i) {
        if (i >= dim && k[i] != 0) return -1;
        deg += k[i];
    }
    if (deg > order) return -1;
    return lookup[code_of(k)];
}

const JetLayout& jet_layout(int dim, int order) {
    static const LayoutTable table;
    if (dim < 1 || dim > kMaxJetDim) throw JetError("jet dimension out of range: " + std::to_string(dim));
    if (order < 0 || order > kMaxJetOrder) throw JetError("jet order out of range: " + std::to_string(order));
    return *table.t[dim][order];
}

Jet::Jet(int dim, int order, double value) : layout_(&jet_layout(dim, order)) {
    c_.assign(layout_->size, 0.0);
    c_[0] = value;
}

Jet Jet::variable(int axis, double value, int dim, int order) {
    if (axis < 0 || axis >= dim) throw JetError("seed axis out of range");
    Jet j(dim, order, value);
    if (order >= 1) j.c_[1 + axis] = 1.0;
    return j;
}

double Jet::coeff(const MultiIndex& k) const {
    int s = layout_->find(k);
    if (s < 0) throw OrderExceeded("multi-index outside jet");
    return c_[s];
}

double Jet::partial(const MultiIndex& k) const {
    double f = 1;
    for (int i = 0; i < kMaxJetDim; ++i) f *= factorial(k[i]);
    return coeff(k) * f;
}

double Jet::partial(std::initializer_list<int> k) const {
    MultiIndex m{};
    int i = 0;
    for (int v : k) {
        if (i >= kMaxJetDim || v < 0 || v > kMaxJetOrder) throw OrderExceeded("bad multi-index");
        m[i++] = static_cast<std::uint8_t>(v);
    }
    return partial(m);
}

Jet Jet::derivative(int axis) const {
    if (order() == 0) throw OrderExceeded("derivative of an order-0 jet");
    if (axis < 0 || axis >= dim()) throw JetError("derivative axis out of range");
    Jet r(dim(), order() - 1);
    const auto& sh = layout_->shift[axis];
    for (int s = 0; s < r.size(); ++s) {
        int k = layout_->index[s][axis] + 1;
        r.c_[s] = c_[sh[s]] * k;
    }
    return r;
}

Jet Jet::truncate(int order) const {
    if (order > this->order()) throw OrderExceeded("cannot raise jet order by truncation");
    Jet r(dim(), order);
    for (int s = 0; s < r.size(); ++s) r.c_[s] = c_[s];
    return r;
}

Jet Jet::embed(int d) const {
    Jet r(d, order());
    for (int s = 0; s < size(); ++s) {
        int t = r.layout_->find(layout_->index[s]);
        if (t >= 0) r.c_[t] = c_[s];
    }
    return r;
}

void Jet::check_same(const Jet& o) const {
    if (layout_ != o.layout_)
        throw JetError("jet shape mismatch: (" + std::to_string(dim()) + "," + std::to_string(order()) +
                       ") vs (" + std::to_string(o.dim()) + "," + std::to_string(o.order()) + ")");
}

Jet& Jet::operator+=(const Jet& o) {
    check_same(o);
    for (int s = 0; s < size(); ++s) c_[s] += o.c_[s];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    check_same(o);
    for (int s = 0; s < size(); ++s) c_[s] -= o.c_[s];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet Jet::operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    a.check_same(b);
    Jet r(a.dim(), a.order());
    const double* x = a.c_.data();
    const double* y = b.c_.data();
    double* z = r.c_.data();
    for (const auto& t : a.layout_->mul) z[t.out] += x[t.a] * y[t.b];
    return r;
}

Jet compose(const Jet& a, std::span<const double> taylor) {
    int n = a.order();
    Jet h = a;
    h.coeff(0) = 0.0;
    Jet r(a.dim(), a.order(), n < static_cast<int>(taylor.size()) ? taylor[n] : 0.0);
    for (int k = n - 1; k >= 0; --k) {
        r = r * h;
        r.coeff(0) += taylor[k];
    }
    return r;
}

namespace {

std::array<double, kMaxJetOrder + 1> series_inverse(double x0) {
    std::array<double, kMaxJetOrder + 1> t{};
    double p = 1.0 / x0;
    for (int n = 0; n <= kMaxJetOrder; ++n) {
        t[n] = (n % 2 ? -1.0 : 1.0) * p;
        p /= x0;
    }
    return t;
}

std::array<double, kMaxJetOrder + 1> series_pow(double x0, double p) {
    std::array<double, kMaxJetOrder + 1> t{};
    double binom = 1.0;
    for (int n = 0; n <= kMaxJetOrder; ++n) {
        t[n] = binom * std::pow(x0, p - n);
        binom *= (p - n) / (n + 1);
    }
    return t;
}

bool is_integer(double p) { return std::abs(p) <= 64 && p == std::round(p); }

}  // namespace

Jet inverse(const Jet& a) {
    double x0 = a.value();
    if (std::abs(x0) < 1e-300) throw DivisionBySingularJet("division by a jet with zero constant term");
    auto t = series_inverse(x0);
    return compose(a, t);
}

Jet operator/(const Jet& a, const Jet& b) {
    a.check_same(b);
    return a * inverse(b);
}

Jet operator/(double s, const Jet& a) { return inverse(a) * s; }

Jet sin(const Jet& a) {
    std::array<double, kMaxJetOrder + 1> t{};
    double s = std::sin(a.value()), c = std::cos(a.value());
    const double cyc[4] = {s, c, -s, -c};
    for (int n = 0; n <= kMaxJetOrder; ++n) t[n] = cyc[n % 4] / factorial(n);
    return compose(a, t);
}

Jet cos(const Jet& a) {
    std::array<double, kMaxJetOrder + 1> t{};
    double s = std::sin(a.value()), c = std::cos(a.value());
    const double cyc[4] = {c, -s, -c, s};
    for (int n = 0; n <= kMaxJetOrder; ++n) t[n] = cyc[n % 4] / factorial(n);
    return compose(a, t);
}

Jet tan(const Jet& a) { return sin(a) / cos(a); }

Jet exp(const Jet& a) {
    std::array<double, kMaxJetOrder + 1> t{};
    double e = std::exp(a.value());
    for (int n = 0; n <= kMaxJetOrder; ++n) t[n] = e / factorial(n);
    return compose(a, t);
}

Jet log(const Jet& a) {
    double x0 = a.value();
    if (!(x0 > 0)) throw DomainError("log of a jet with nonpositive constant term");
    std::array<double, kMaxJetOrder + 1> t{};
    t[0] = std::log(x0);
    double p = x0;
    for (int n = 1; n <= kMaxJetOrder; ++n) {
        t[n] = (n % 2 ? 1.0 : -1.0) / (n * p);
        p *= x0;
    }
    return compose(a, t);
}

Jet sqrt(const Jet& a) {
    if (!(a.value() > 0)) throw DomainError("sqrt of a jet with nonpositive constant term");
    return compose(a, series_pow(a.value(), 0.5));
}

Jet powi(const Jet& a, int n) {
    if (n < 0) return inverse(powi(a, -n));
    Jet r(a.dim(), a.order(), 1.0);
    Jet b = a;
    while (n) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

Jet pow(const Jet& a, double p) {
    if (is_integer(p)) return powi(a, static_cast<int>(p));
    if (!(a.value() > 0)) throw DomainError("non-integer power of a jet with nonpositive constant term");
    return compose(a, series_pow(a.value(), p));
}

Jet pow(const Jet& a, const Jet& p) {
    bool constant = true;
    for (int s = 1; s < p.size(); ++s)
        if (p.coeff(s) != 0.0) constant = false;
    if (constant) return pow(a, p.value());
    return exp(p * log(a));
}

Jet sinh(const Jet& a) {
    std::array<double, kMaxJetOrder + 1> t{};
    double s = std::sinh(a.value()), c = std::cosh(a.value());
    for (int n = 0; n <= kMaxJetOrder; ++n) t[n] = (n % 2 ? c : s) / factorial(n);
    return compose(a, t);
}

Jet cosh(const Jet& a) {
    std::array<double, kMaxJetOrder + 1> t{};
    double s = std::sinh(a.value()), c = std::cosh(a.value());
    for (int n = 0; n <= kMaxJetOrder; ++n) t[n] = (n % 2 ? s : c) / factorial(n);
    return compose(a, t);
}

Jet atan(const Jet& a) {
    // d/dx atan = 1/(1+x^2); expand that in powers of (x - x0) and integrate
    double x0 = a.value();
    double qa = 1 + x0 * x0, qb = 2 * x0;
    std::array<double, kMaxJetOrder + 1> u{}, t{};
    u[0] = 1.0 / qa;
    for (int n = 1; n <= kMaxJetOrder; ++n) {
        double prev2 = n >= 2 ? u[n - 2] : 0.0;
        u[n] = -(qb * u[n - 1] + prev2) / qa;
    }
    t[0] = std::atan(x0);
    for (int n = 1; n <= kMaxJetOrder; ++n) t[n] = u[n - 1] / n;
    return compose(a, t);
}

Jet apply(ElemFn fn, const Jet& a) {
    switch (fn) {
        case ElemFn::Sin: return sin(a);
        case ElemFn::Cos: return cos(a);
        case ElemFn::Tan: return tan(a);
        case ElemFn::Exp: return exp(a);
        case ElemFn::Log: return log(a);
        case ElemFn::Sqrt: return sqrt(a);
        case ElemFn::Sinh: return sinh(a);
        case ElemFn::Cosh: return cosh(a);
        case ElemFn::Atan: return atan(a);
    }
    throw JetError("unknown elementary function");
}

std::string to_string(const Jet& a) {
    std::ostringstream os;
    os << "Jet(dim=" << a.dim() << ", order=" << a.order() << ") {";
    for (int s = 0; s < a.size(); ++s) {
        if (a.coeff(s) == 0.0) continue;
        os << " (";
        for (int i = 0; i < a.dim(); ++i) os << (i ? "," : "") << int(a.layout().index[s][i]);
        os << "): " << a.coeff(s);
    }
    os << " }";
    return os.str();
}

}  // namespace maf
