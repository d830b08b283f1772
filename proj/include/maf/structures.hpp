#pragma once
// Monge-Ampere data on T*M at one phase point (x, q).
//
// Forms are stored in the coordinate coframe (dx^i on axis i, dq_i on axis
// m+i); the covariant coframe Dq_i = dq_i - Gamma_ji^k q_k dx^j is expanded.

#include "maf/diagnostics.hpp"
#include "maf/exterior.hpp"
#include "maf/flows.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maf {

struct SeedDependent : ExteriorError {
    using ExteriorError::ExteriorError;
};

struct MAPoint {
    int m = 0;  // base dimension, phase dimension 2m
    std::vector<double> x, q;
    double fhat = 0;
    FormValue omega;  // Dq_i ^ dx^i
    FormValue varpi;  // Dq_i ^ *dx^i
    FormValue alpha;  // 1/2 Dq_i ^ Dq_j ^ *(dx^i ^ dx^j) - fhat vol
    FormValue theta;  // q_i dx^i
    FormValue vol;    // base volume form
    // J with K(X, JY) = ghat. In 2D J is read off alpha/sqrt|fhat| = J _| omega and
    // K = -sqrt|fhat| varpi; in 3D J comes from the Liouville contraction and
    // K = sqrt|fhat| omega.
    FormValue K;
    Eigen::MatrixXd J;
    // 2D only: the structure built on varpi instead, alpha/sqrt|fhat| = J' _| varpi,
    // K' = sqrt|fhat| omega.
    FormValue K_varpi;
    Eigen::MatrixXd J_varpi;

    Eigen::MatrixXd metric() const;  // K(X, JY) as a matrix
};

MAPoint build_structure(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                        double fhat, const Settings& s = {});
// fhat from the flow's pressure data
MAPoint build_structure(const FlowSpec& spec, const std::vector<double>& x, const std::vector<double>& q,
                        const Settings& s = {});

// J from alpha/sqrt|f| = J _| ref (2-forms in dimension 4)
Eigen::MatrixXd endomorphism_from(const FormValue& alpha, const FormValue& ref, double fhat);
// -1/(2 sqrt|f|) eps _| (alpha ^ X _| alpha), eps dual to the Liouville volume of omega
Eigen::MatrixXd endomorphism_liouville(const FormValue& alpha, const FormValue& omega, double fhat);
// 1/sqrt|f| eps _| (varpi ^ X _| alpha) in dimension 4
Eigen::MatrixXd endomorphism_liouville_2d(const FormValue& alpha, const FormValue& varpi, const FormValue& omega,
                                          double fhat);

// Residuals keyed by name: effective_alpha_omega, effective_varpi_omega,
// effective_alpha_varpi (2D), closure_varpi, closure_alpha, pfaffian (2D),
// J_square, metric, antisymmetry (and the same for the varpi structure in 2D).
std::map<std::string, double> verify_structure(const MAPoint& p, const FlowSpec& spec, const Settings& s = {});

struct PullbackResiduals {
    double varpi = 0;  // divergence of v
    double alpha = 0;  // pressure equation residual
    double omega = 0;  // 2D: d v relative to vol, the scalar vorticity
};
// Coefficients of the pull-backs along x -> (x, v(x)) relative to vol.
PullbackResiduals pullback_forms(const FlowSpec& spec, const std::vector<double>& x);

// (1,1)-form K with K ^ omega = 0, K ^ Jomega = 0, K ^ K != 0 (dimension 4).
FormValue construct_K(const FormValue& omega, const FormValue& Jomega,
                      const std::optional<FormValue>& seed = std::nullopt);

}  // namespace maf
