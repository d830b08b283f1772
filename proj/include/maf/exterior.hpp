#pragma once
// Exterior algebra over R^n, n <= 8.
//
// A form stores one coefficient per basis monomial e^{i1}^...^e^{ik}
// (i1 < ... < ik), indexed by the bitmask of {i1..ik}; mixed grades are
// allowed. The scalar type is double for pointwise values or Jet when the
// coefficients are fields (for the exterior derivative).

#include "maf/jet.hpp"

#include <Eigen/Dense>
#include <bit>
#include <stdexcept>
#include <vector>

namespace maf {

inline constexpr int kMaxFormDim = 8;

struct ExteriorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateMetric : ExteriorError {
    using ExteriorError::ExteriorError;
};
struct DegenerateReference : ExteriorError {
    using ExteriorError::ExteriorError;
};

inline int grade_of(unsigned mask) { return std::popcount(mask); }

// Sign of e^A ^ e^B -> e^{A|B}; 0 when A and B overlap.
inline int wedge_sign(unsigned a, unsigned b) {
    if (a & b) return 0;
    int swaps = 0;
    for (unsigned rest = b; rest; rest &= rest - 1) {
        unsigned j = std::countr_zero(rest);
        swaps += std::popcount(a >> (j + 1));
    }
    return swaps & 1 ? -1 : 1;
}

// Sign of e_i contracted into the first slot of e^mask.
inline int interior_sign(int i, unsigned mask) {
    return std::popcount(mask & ((1u << i) - 1)) & 1 ? -1 : 1;
}

namespace detail {
inline double zero_like(const double&) { return 0.0; }
inline Jet zero_like(const Jet& j) { return Jet(j.dim(), j.order(), 0.0); }
}  // namespace detail

template <class T>
struct BasicForm {
    int dim = 0;
    bool contravariant = false;  // true for poly-vectors
    std::vector<T> c;

    BasicForm() = default;
    BasicForm(int n, T zero = T{}) : dim(n), c(std::size_t(1) << n, zero) {
        if (n < 1 || n > kMaxFormDim) throw ExteriorError("form dimension out of range");
    }

    static BasicForm monomial(int n, unsigned mask, T coeff, T zero = T{}) {
        BasicForm f(n, zero);
        f.c[mask] = coeff;
        return f;
    }
    static BasicForm one_form(const std::vector<T>& v, T zero = T{}) {
        BasicForm f(static_cast<int>(v.size()), zero);
        for (std::size_t i = 0; i < v.size(); ++i) f.c[1u << i] = v[i];
        return f;
    }

    unsigned top() const { return (1u << dim) - 1; }
    T& operator[](unsigned mask) { return c[mask]; }
    const T& operator[](unsigned mask) const { return c[mask]; }

    BasicForm grade_part(int k) const {
        BasicForm r = *this;
        for (unsigned m = 0; m < c.size(); ++m)
            if (grade_of(m) != k) r.c[m] = detail::zero_like(c[m]);
        return r;
    }

    BasicForm& operator+=(const BasicForm& o) {
        check(o);
        for (std::size_t m = 0; m < c.size(); ++m) c[m] += o.c[m];
        return *this;
    }
    BasicForm& operator-=(const BasicForm& o) {
        check(o);
        for (std::size_t m = 0; m < c.size(); ++m) c[m] -= o.c[m];
        return *this;
    }
    template <class S>
    BasicForm& operator*=(const S& s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    friend BasicForm operator+(BasicForm a, const BasicForm& b) { return a += b; }
    friend BasicForm operator-(BasicForm a, const BasicForm& b) { return a -= b; }
    friend BasicForm operator*(BasicForm a, double s) { return a *= s; }
    friend BasicForm operator*(double s, BasicForm a) { return a *= s; }

    void check(const BasicForm& o) const {
        if (dim != o.dim) throw ExteriorError("form dimension mismatch");
    }
};

using FormValue = BasicForm<double>;
using PolyVector = BasicForm<double>;
using JetForm = BasicForm<Jet>;

inline PolyVector make_polyvector(int n) {
    PolyVector p(n);
    p.contravariant = true;
    return p;
}

template <class T>
BasicForm<T> wedge(const BasicForm<T>& a, const BasicForm<T>& b) {
    a.check(b);
    BasicForm<T> r = a;
    for (auto& v : r.c) v = detail::zero_like(v);
    for (unsigned i = 0; i < a.c.size(); ++i) {
        for (unsigned j = 0; j < b.c.size(); ++j) {
            int s = wedge_sign(i, j);
            if (!s) continue;
            if constexpr (std::is_same_v<T, double>) {
                if (a.c[i] == 0.0 || b.c[j] == 0.0) continue;
                r.c[i | j] += s * a.c[i] * b.c[j];
            } else {
                r.c[i | j] += (a.c[i] * b.c[j]) * double(s);
            }
        }
    }
    return r;
}

// X _| a with X a vector (components X^i); leftmost slot.
template <class T, class V>
BasicForm<T> interior(const std::vector<V>& x, const BasicForm<T>& a) {
    if (static_cast<int>(x.size()) != a.dim) throw ExteriorError("vector/form dimension mismatch");
    BasicForm<T> r = a;
    for (auto& v : r.c) v = detail::zero_like(v);
    for (unsigned m = 0; m < a.c.size(); ++m) {
        for (int i = 0; i < a.dim; ++i) {
            if (!(m >> i & 1u)) continue;
            r.c[m & ~(1u << i)] += a.c[m] * (x[i] * double(interior_sign(i, m)));
        }
    }
    return r;
}

// e_i _| a
template <class T>
BasicForm<T> interior_basis(int i, const BasicForm<T>& a) {
    BasicForm<T> r = a;
    for (auto& v : r.c) v = detail::zero_like(v);
    for (unsigned m = 0; m < a.c.size(); ++m)
        if (m >> i & 1u) r.c[m & ~(1u << i)] += a.c[m] * double(interior_sign(i, m));
    return r;
}

// P _| a for a poly-vector P = sum P^I e_{i1}^...^e_{ik}: the slots of a are
// filled by e_{i1}, e_{i2}, ... in that order.
FormValue interior(const PolyVector& p, const FormValue& a);

// a(X1, ..., Xk)
double evaluate(const FormValue& a, const std::vector<std::vector<double>>& vectors);

// 2-form <-> antisymmetric matrix with a(X,Y) = X^T M Y.
Eigen::MatrixXd to_matrix(const FormValue& two_form);
FormValue from_matrix(const Eigen::MatrixXd& m);

// Coefficient of the top monomial.
inline double top_coeff(const FormValue& a) { return a.c[a.top()]; }

// Poly-vector eps with eps _| vol = 1.
PolyVector dual_polyvector(const FormValue& volume);

// Hodge star for metric g (coordinate basis), oriented by the sign of the
// top coefficient of `orientation`: a ^ *b = <a,b> vol_g.
FormValue hodge_star(const FormValue& a, const Eigen::MatrixXd& g, const FormValue& orientation);
FormValue hodge_star(const FormValue& a, const Eigen::MatrixXd& g);

// a ^ a = Pf(a) omega ^ omega in dimension 4.
double pfaffian(const FormValue& a, const FormValue& omega);

struct EffectiveSplit {
    FormValue rho0;
    double lambda0 = 0;
};
// rho = rho0 + lambda0 omega with rho0 ^ omega = 0 (dimension 4).
EffectiveSplit effective_decompose(const FormValue& rho, const FormValue& omega);

// d of a form whose coefficients are jets in the same coordinates; the result
// has jets of one lower order.
JetForm exterior_derivative(const JetForm& a);
FormValue value_of(const JetForm& a);

double max_abs(const FormValue& a);

}  // namespace maf
