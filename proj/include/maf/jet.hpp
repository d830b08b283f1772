#pragma once
// Truncated multivariate Taylor polynomials ("jets").
//
// Coefficients are stored densely, one slot per multi-index of total degree
// <= order, as Taylor coefficients (derivative / multi-index factorial).

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maf {

inline constexpr int kMaxJetDim = 6;
inline constexpr int kMaxJetOrder = 4;

struct JetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivisionBySingularJet : JetError {
    using JetError::JetError;
};
struct DomainError : JetError {
    using JetError::JetError;
};
struct OrderExceeded : JetError {
    using JetError::JetError;
};

using MultiIndex = std::array<std::uint8_t, kMaxJetDim>;

// Index tables shared by all jets of one (dim, order).
struct JetLayout {
    int dim = 0;
    int order = 0;
    int size = 0;
    std::vector<MultiIndex> index;          // slot -> multi-index
    std::vector<int> degree;                // slot -> |k|
    std::vector<int> lookup;                // base-5 code -> slot (or -1)
    struct Term { std::uint16_t a, b, out; };
    std::vector<Term> mul;                  // all (a,b) with deg(a)+deg(b) <= order
    std::vector<int> degree_start;          // first slot of each degree (size order+2)
    // shift[axis][slot of order-1 layout] = slot of k+e_axis in this layout
    std::array<std::vector<int>, kMaxJetDim> shift;

    int find(const MultiIndex& k) const;
};

const JetLayout& jet_layout(int dim, int order);

class Jet {
public:
    Jet() = default;
    Jet(int dim, int order, double value = 0.0);

    static Jet constant(int dim, int order, double value) { return Jet(dim, order, value); }
    static Jet variable(int axis, double value, int dim, int order);

    int dim() const { return layout_ ? layout_->dim : 0; }
    int order() const { return layout_ ? layout_->order : 0; }
    int size() const { return layout_ ? layout_->size : 0; }
    const JetLayout& layout() const { return *layout_; }
    bool valid() const { return layout_ != nullptr; }

    double value() const { return c_[0]; }
    double& coeff(int slot) { return c_[slot]; }
    double coeff(int slot) const { return c_[slot]; }
    double coeff(const MultiIndex& k) const;
    std::span<const double> coeffs() const { return {c_.data(), static_cast<size_t>(size())}; }

    // Partial derivative value d^|k| f (coefficient times k!).
    double partial(const MultiIndex& k) const;
    double partial(std::initializer_list<int> k) const;
    // d/dx_axis as a jet of order-1.
    Jet derivative(int axis) const;
    Jet truncate(int order) const;
    // Same jet re-expressed in a larger/smaller variable set (extra axes unused).
    Jet embed(int dim) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }
    Jet& operator*=(double s);
    Jet& operator/=(double s) { return *this *= 1.0 / s; }

    Jet operator-() const;

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) { Jet r = -a; return r += s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a /= s; }
    friend Jet operator/(double s, const Jet& a);

private:
    void check_same(const Jet& o) const;

    const JetLayout* layout_ = nullptr;
    std::vector<double> c_;
};

// Scalar function composed with a jet: sum_n f^(n)(a0)/n! (a - a0)^n.
// derivs[n] = f^(n)(a0) / n!.
Jet compose(const Jet& a, std::span<const double> taylor);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet pow(const Jet& a, const Jet& p);
Jet powi(const Jet& a, int n);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet atan(const Jet& a);
Jet inverse(const Jet& a);

enum class ElemFn { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Atan };
Jet apply(ElemFn fn, const Jet& a);

std::string to_string(const Jet& a);

}  // namespace maf
