#pragma once
// Local Gauss-Bonnet on 2D metric fields: arc length, geodesic curvature,
// area integral of the scalar curvature, Euler number of star-shaped regions.

#include "maf/background.hpp"
#include "maf/flows.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace maf {

struct GaussBonnetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonRiemannianAlongCurve : GaussBonnetError {
    using GaussBonnetError::GaussBonnetError;
};
struct MixedSignature : GaussBonnetError {
    using GaussBonnetError::GaussBonnetError;
};
struct QuadratureFailure : GaussBonnetError {
    using GaussBonnetError::GaussBonnetError;
};

// Metric jets (2 variables, given order) at a base point.
using MetricField = std::function<JetMat(const std::vector<double>& x, int order)>;
// Scalar field evaluated on jet coordinates (any jet layout).
using LevelFunction = std::function<Jet(const Jet& x, const Jet& y)>;

MetricField constant_metric(const Eigen::Matrix2d& g);
MetricField pullback_field(const FlowSpec& spec);  // 2D stream flows
LevelFunction stream_level(const FlowSpec& spec);

struct Curve {
    // position as jets of order 2 in the single curve parameter
    std::function<std::array<Jet, 2>(double)> eval;
    double S = 0;  // parameter range [0, S)
    bool closed = true;
    std::vector<std::pair<double, double>> corners;  // (parameter, exterior angle)
};

Curve circle_curve(const std::vector<double>& center, double radius);
Curve ellipse_curve(const std::vector<double>& center, double a, double b);
// c + r(t) (cos t, sin t), r given as a jet in t
Curve polar_curve(const std::vector<double>& center, std::function<Jet(const Jet&)> radius);

double metric_speed(const Curve& c, double s, const MetricField& g);
double curve_length(const Curve& c, const MetricField& g, double tol = 1e-12);
Curve arclength_reparam(const Curve& c, const MetricField& g);
// Beltrami formula, valid for any regular parametrisation
double geodesic_curvature(const Curve& c, double s, const MetricField& g);

struct Region {
    std::vector<double> center;
    std::function<Jet(const Jet&)> radius;  // boundary radius as a jet in the polar angle
    Curve boundary;
};
Region disc_region(const std::vector<double>& center, double radius);
// {level(x) <= value} around a seed point where level has a strict minimum
// (or >= for a maximum); boundary radius solved along each ray.
Region level_set_region(LevelFunction level, double value, const std::vector<double>& seed);

struct EulerResult {
    double chi = 0;
    double area_term = 0;
    double boundary_term = 0;
    double corner_term = 0;
};

struct QuadratureOptions {
    double tol = 1e-8;
    int max_depth = 40;
    int signature_samples = 24;
    double min_eigenvalue = 1e-6;
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth = 40);

EulerResult euler_number(const Region& region, const MetricField& g, const QuadratureOptions& opt = {});

}  // namespace maf
