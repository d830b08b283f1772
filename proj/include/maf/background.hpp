#pragma once
// Background Riemannian geometries and jet-valued tensor calculus.
//
// Index conventions:
//   Gamma(i,j,k)  = Gamma_ij^k
//   R(i,j,k,l)    = R_ijk^l = d_i Gamma_jk^l - d_j Gamma_ik^l
//                            - Gamma_ik^m Gamma_jm^l + Gamma_jk^m Gamma_im^l
//   Ric(i,j)      = R_kij^k,  scalar = g^ij Ric_ij  (unit sphere: +2)

#include "maf/exterior.hpp"
#include "maf/expr.hpp"
#include "maf/jet.hpp"

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace maf {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Square matrix of jets, row-major.
struct JetMat {
    int n = 0;
    std::vector<Jet> a;

    JetMat() = default;
    JetMat(int size, const Jet& zero) : n(size), a(size * size, zero) {}
    Jet& operator()(int i, int j) { return a[i * n + j]; }
    const Jet& operator()(int i, int j) const { return a[i * n + j]; }
    Eigen::MatrixXd values() const;
};

JetMat inverse(const JetMat& m);
Jet determinant(const JetMat& m);
JetMat truncate(const JetMat& m, int order);

// Gamma_ij^k from metric jets (result has one order less).
struct Connection {
    int n = 0;
    std::vector<Jet> c;
    Jet& operator()(int i, int j, int k) { return c[(i * n + j) * n + k]; }
    const Jet& operator()(int i, int j, int k) const { return c[(i * n + j) * n + k]; }
};
Connection christoffels(const JetMat& g);

// Riemann R_ijk^l as jets of order (metric order - 2).
struct Riemann {
    int n = 0;
    std::vector<Jet> c;
    Jet& operator()(int i, int j, int k, int l) { return c[((i * n + j) * n + k) * n + l]; }
    const Jet& operator()(int i, int j, int k, int l) const { return c[((i * n + j) * n + k) * n + l]; }
};
Riemann riemann(const JetMat& g, const Connection& gamma);

struct CurvatureValues {
    int n = 0;
    std::vector<double> riemann;  // R_ijk^l
    Eigen::MatrixXd ricci;
    double scalar = 0;
    double R(int i, int j, int k, int l) const { return riemann[((i * n + j) * n + k) * n + l]; }
};
// Generic oracle: metric jets of order >= 2 at the point.
CurvatureValues curvature_values(const JetMat& g);
Jet ricci_scalar(const JetMat& g);  // order - 2 jets

// Tensor field with per-slot variance (true = upper).
struct JetTensor {
    int n = 0;
    std::vector<bool> upper;
    std::vector<Jet> c;
    int rank() const { return static_cast<int>(upper.size()); }
    int flat(const std::vector<int>& idx) const;
    Jet& at(const std::vector<int>& idx) { return c[flat(idx)]; }
    const Jet& at(const std::vector<int>& idx) const { return c[flat(idx)]; }
};
// nabla_i T, new lower index first; result jets have one order less.
JetTensor covariant_derivative(const JetTensor& t, const Connection& gamma);
JetTensor scalar_tensor(const Jet& s, int n);

// d_i psi as jets (order - 1) and nabla_i d_j psi (order - 2).
std::vector<Jet> gradient(const Jet& psi, int n);
JetMat covariant_hessian(const Jet& psi, const Connection& gamma);

class BackgroundGeometry {
public:
    std::string name;
    int dim = 2;
    std::vector<std::string> coords;           // coordinate names, axis order
    std::vector<Expr> metric;                   // dim x dim, row-major
    Expr warp;                                  // phi, only for warped products
    std::shared_ptr<const BackgroundGeometry> base;
    std::map<std::string, double> params;

    // Coordinate jets x[i] must be seeded on axis i.
    JetMat metric_at(const std::vector<Jet>& x) const;
    Jet warp_at(const std::vector<Jet>& x) const;
    bool is_warped() const { return static_cast<bool>(base); }
    bool is_flat() const { return flat_; }
    Bindings bind(const std::vector<Jet>& x) const;

    bool flat_ = false;
};

using Geometry = std::shared_ptr<const BackgroundGeometry>;

Geometry flat_geometry(int dim);
// base + exp(2 phi) dx3 dx3; phi is an expression in the base coordinates.
Geometry warped_product(Geometry base, const std::string& phi, const std::string& name,
                        const std::string& third = "z");
Geometry cylindrical_geometry();  // (r, z, theta), phi = log r
Geometry sphere_geometry(double radius = 1.0);
// Non-flat, non-diagonal 2D test metric
Geometry curved2d_geometry();
Geometry geometry_from_metric(const std::string& name, const std::vector<std::string>& coords,
                              const std::vector<std::string>& entries,
                              const std::map<std::string, double>& params = {});
Geometry geometry_by_name(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> geometry_names();

// Coordinate jets for a point: x[i] seeded on axis i of a `vars`-dimensional jet.
std::vector<Jet> coordinate_jets(const std::vector<double>& point, int vars, int order);

}  // namespace maf
