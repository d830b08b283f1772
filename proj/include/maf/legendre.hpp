#pragma once
// Legendre duality for 2D stream functions in coordinate form:
// (x', y') = grad psi, psi' = x'x + y'y - psi.

#include "maf/background.hpp"
#include "maf/flows.hpp"

#include <array>
#include <optional>
#include <stdexcept>

namespace maf {

struct LegendreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FoldSingularity : LegendreError {
    using LegendreError::LegendreError;
};
struct OutsideSheetDomain : LegendreError {
    using LegendreError::LegendreError;
};

struct LegendreSettings {
    double eps_fold = 1e-8;  // relative: |det H| <= eps_fold |H|^2 is a fold
    // primal box (xmin, xmax, ymin, ymax) and grid used to seed the inverse
    std::array<double, 4> box{-3, 3, -3, 3};
    int grid = 60;
    int max_iter = 100;
};

struct LegendrePoint {
    std::array<double, 2> primal{}, dual{};
    double psi = 0, psi_dual = 0;
    Eigen::Matrix2d hessian;  // coordinate Hessian of psi
    double det_hessian = 0;
    int sheet = 0;  // sign of det_hessian
};

LegendrePoint to_dual(const FlowSpec& spec, const std::array<double, 2>& x, const LegendreSettings& s = {});
// Damped Newton for grad psi(x) = dual on the given sheet, seeded from the
// primal grid unless a seed is given.
LegendrePoint from_dual(const FlowSpec& spec, const std::array<double, 2>& dual, int sheet,
                        const LegendreSettings& s = {}, std::optional<std::array<double, 2>> seed = std::nullopt);

// Hessian of psi' as jets in the dual variables (order <= 2) at the image of x.
JetMat dual_hessian_jets(const FlowSpec& spec, const std::array<double, 2>& x, int order);

struct DualDiagnostics {
    LegendrePoint point;
    Eigen::Matrix2d hessian_dual;  // Hess psi' = H^-1
    Eigen::Matrix2d gtilde_dual;   // same matrix, det = 1/f
    double f = 0;  // det Hess psi, equal to f on flat backgrounds
    double laplacian_dual = 0;  // Delta' psi'
    double zeta_dual = 0;       // f Delta' psi'
    Eigen::Matrix2d metric_dual;  // zeta' gtilde'
    double R_dual = 0;            // scalar curvature of metric_dual in dual coordinates
};
DualDiagnostics dual_diagnostics(const FlowSpec& spec, const std::array<double, 2>& dual, int sheet,
                                 const LegendreSettings& s = {},
                                 std::optional<std::array<double, 2>> seed = std::nullopt);

// |f det Hess psi' - 1| at a primal point
double dual_MA_residual(const FlowSpec& spec, const std::array<double, 2>& x, const LegendreSettings& s = {});

}  // namespace maf
