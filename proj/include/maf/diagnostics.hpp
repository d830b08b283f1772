#pragma once
// Pointwise flow diagnostics: kinematics, phase and pull-back metrics,
// their curvature scalars, eigenvalues, classification and helicity.
//
// Phase space jets use 2m variables: x^i on axis i, q_i on axis m+i.

#include "maf/background.hpp"
#include "maf/flows.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace maf {

struct Settings {
    double eps_sing = 1e-10;
};

struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularStructure : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};
struct VanishingVorticity : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};
struct DegenerateHessian : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};

enum class Signature { Riemannian, Kleinian, Degenerate };
enum class MetricContext { Phase, Pullback, Hessian, ReducedPhase, ReducedPullback, LegendreDual };
enum class FlowClass { Elliptic, Hyperbolic, Parabolic };

const char* to_string(Signature s);
const char* to_string(FlowClass c);

struct MetricValue {
    Eigen::MatrixXd matrix;
    Signature signature = Signature::Degenerate;
    MetricContext context = MetricContext::Pullback;
};
Signature signature_of(const Eigen::MatrixXd& m, double eps);
MetricValue make_metric(Eigen::MatrixXd m, MetricContext ctx, double eps);

struct KinematicState {
    int dim = 0;
    Eigen::VectorXd v_lower, v_upper;
    Eigen::MatrixXd gbar;
    Eigen::MatrixXd zeta;      // zeta_ij = d_[i v_j]
    Eigen::MatrixXd strain;    // S_ij = nabla_(i v_j)
    Eigen::MatrixXd gradient;  // A_ij = nabla_j v_i = S - zeta
    double scalar_vorticity = 0;  // 2D: 2 zeta_12 / sqrt(det g)
    double f = 0;                 // 1/2 (zeta_ij zeta^ij - S_ij S^ij)
    double zeta_sq = 0, strain_sq = 0;
};

// Jet-level building blocks. A has one order less than the flow jets.
JetMat velocity_gradient(const FlowJets& f);
// -1/2 A_ij A^ji
Jet trace_term(const JetMat& A, const JetMat& ginv);
JetMat ricci_jets(const Riemann& R);

KinematicState kinematics(const FlowSpec& spec, const std::vector<double>& point);

// 1/2 Laplacian of p as jets in m variables. Uses the pressure expression when
// present, otherwise eliminates it with the pressure equation: f - 1/2 Ric(v,v).
Jet half_pressure_laplacian(const FlowSpec& spec, const std::vector<double>& x, int order);
// fhat(x,q) = 1/2 Lap p + 1/2 Ric^ij q_i q_j as jets in 2m variables
Jet fhat_jet(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q, int order);
double fhat(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q);
// q = v(x), the point of the Lagrangian graph over x
std::vector<double> on_shell_q(const FlowSpec& spec, const std::vector<double>& x);

// fhat gbar dx dx + gbar^ij Dq_i Dq_j with Dq_i = dq_i - Gamma_ji^k q_k dx^j
JetMat phase_metric_jets(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                         int order);
MetricValue phase_metric(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                         double fhat_value, const Settings& s = {});

// Closed curvature formula for the phase metric, valid in any dimension.
double phase_scalar_curvature(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                              const Settings& s = {});
// Flat-background simplification on the graph: (m-1)/(4f^3)[(6-m)|df|^2 - 4 f Lap f]
double phase_scalar_curvature_flat(const FlowSpec& spec, const std::vector<double>& x, const Settings& s = {});
// Generic oracle: Christoffels and Riemann of the full phase metric by jets.
double phase_scalar_curvature_oracle(const FlowSpec& spec, const std::vector<double>& x,
                                     const std::vector<double>& q);

// g = f gbar + A^T gbar^-1 A, i.e. A^k_i A_kj - 1/2 gbar_ij A_kl A^lk (order <= 2)
JetMat pullback_metric_jets(const FlowSpec& spec, const std::vector<double>& x, int order);
// 2D stream flows: zeta * nabla_i d_j psi
JetMat pullback_metric_hessian_form(const FlowSpec& spec, const std::vector<double>& x, int order);
MetricValue pullback_metric(const FlowSpec& spec, const std::vector<double>& x, const Settings& s = {});

struct Eigenvalues {
    std::vector<double> values;  // eigenvalues of gbar^-1 g, descending
    double DR = std::numeric_limits<double>::quiet_NaN();
};
Eigenvalues pullback_eigenvalues(const MetricValue& metric, const KinematicState& kin);

struct PullbackCurvature {
    double R = 0;
    double Rtilde = 0;
};
// 2D stream flows: conformal formula R = (R~ - Lap~ log|zeta|)/zeta with the
// closed Hessian-metric curvature R~.
PullbackCurvature pullback_scalar_curvature(const FlowSpec& spec, const std::vector<double>& x,
                                            const Settings& s = {});
double pullback_scalar_curvature_oracle(const FlowSpec& spec, const std::vector<double>& x);
double hessian_scalar_curvature_oracle(const FlowSpec& spec, const std::vector<double>& x);

FlowClass classify(const FlowSpec& spec, const std::vector<double>& x, const Settings& s = {});
double helicity_density(const FlowSpec& spec, const std::vector<double>& x);

}  // namespace maf
