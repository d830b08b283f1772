#pragma once
// Reduction of 3D flows on warped products M2 x_{e^2phi} R with symmetry d/dx3,
// evaluated in adapted coordinates on the base.

#include "maf/diagnostics.hpp"
#include "maf/flows.hpp"
#include "maf/gaussbonnet.hpp"

#include <array>
#include <optional>

namespace maf {

struct VanishingLambda : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};

// Where fhat2 + h+ comes from: the pressure expression, or the 3D velocity
// gradients (-1/2 A_IJ A^JI of the lift, equal on solutions).
enum class FSource { Auto, Pressure, Kinematic };

struct HPlusMinus {
    double plus = 0, minus = 0;
};
// q defaults to the reduced graph q_i = v_i(x), q3 = v3(x).
HPlusMinus h_plus_minus(const FlowSpec& spec, const std::vector<double>& x,
                        std::optional<std::array<double, 2>> q = std::nullopt, std::optional<double> q3 = std::nullopt);

struct ReducedResiduals {
    double divergence = 0;  // nabla_i v^i + v^i d_i phi
    double pressure = 0;    // reduced pressure equation, nan without a pressure expression
};
ReducedResiduals reduced_constraint_residuals(const FlowSpec& spec, const std::vector<double>& x);

// fhat2 + h+ on the reduced graph as jets (order <= 2) on the base
Jet reduced_F_jet(const FlowSpec& spec, const std::vector<double>& x, int order, FSource src = FSource::Auto);
double reduced_F(const FlowSpec& spec, const std::vector<double>& x, FSource src = FSource::Auto);

// g2 = F gbar + A^T gbar^-1 A as jets (order <= 2)
JetMat reduced_pullback_metric_jets(const FlowSpec& spec, const std::vector<double>& x, int order,
                                    FSource src = FSource::Auto);
MetricField reduced_pullback_field(const FlowSpec& spec, FSource src = FSource::Auto);

struct ReducedMetrics {
    double F = 0;
    MetricValue ghat2;  // 4x4 in the (x, q) frame at q = v(x)
    MetricValue g2;
    Eigen::Matrix2d g2_T;   // stream-function form with T_ij
    Eigen::Matrix2d g2_V2;  // form with fhat2 + h+ explicit
    double cross_check = 0;  // max deviation among the three g2 forms
};
ReducedMetrics reduced_metrics(const FlowSpec& spec, const std::vector<double>& x, const Settings& s = {},
                               FSource src = FSource::Auto);

// eigenvalues of gbar^-1 g2, descending
std::array<double, 2> reduced_eigenvalues(const FlowSpec& spec, const std::vector<double>& x,
                                          FSource src = FSource::Auto);

struct ReducedCurvatures {
    double Rhat2 = 0;  // flat-base formula with f -> fhat2 + h+
    double R2 = 0;     // curvature of g2
};
ReducedCurvatures reduced_curvatures(const FlowSpec& spec, const std::vector<double>& x, const Settings& s = {},
                                     FSource src = FSource::Auto);

struct ReducedTraces {
    double zeta2_3d = 0;   // zeta_IJ zeta^IJ from the 2D data
    double strain2_3d = 0;  // S_IJ S^IJ from the 2D data
    double F = 0;
    double f3_check = 0;  // |1/2 (zeta^2 - S^2) - F|
};
ReducedTraces reduced_traces(const FlowSpec& spec, const std::vector<double>& x, FSource src = FSource::Auto);

struct MomentMaps {
    double symplectic = 0;             // lambda q3
    Eigen::Vector2d two_plectic;       // components of *(e^phi q_i dx^i)
    Eigen::Vector2d level_residual;    // mu + d psi on the graph
};
MomentMaps moment_maps(const FlowSpec& spec, const std::vector<double>& x, double lambda = 1.0,
                       std::optional<std::array<double, 2>> q = std::nullopt, std::optional<double> q3 = std::nullopt);

}  // namespace maf
