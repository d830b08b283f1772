#pragma once
// Flow catalog and jet evaluation of velocity fields.

#include "maf/background.hpp"
#include "maf/expr.hpp"
#include "maf/jet.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace maf {

struct FlowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownFlow : FlowError {
    explicit UnknownFlow(const std::string& name) : FlowError("unknown flow '" + name + "'") {}
};
struct MissingParameter : FlowError {
    using FlowError::FlowError;
};
struct MissingPressure : FlowError {
    using FlowError::FlowError;
};
struct DimensionError : FlowError {
    using FlowError::FlowError;
};

enum class FlowSource {
    Stream,    // 2D stream function psi
    Velocity,  // contravariant components v^i
    Reduced,   // (psi, v3) on the base of a warped product
};

struct FlowSpec {
    std::string name;
    int dim = 2;  // dimension of the flow domain (3 for reduced flows)
    FlowSource source = FlowSource::Stream;
    Geometry geometry;  // warped 3D geometry for reduced flows
    Expr psi;
    Expr v3;
    std::vector<Expr> velocity;
    Expr pressure;  // optional
    std::map<std::string, double> params;
    double t = 0;

    bool has_pressure() const { return static_cast<bool>(pressure); }
    // 2D geometry on which psi lives
    Geometry stream_geometry() const { return source == FlowSource::Reduced ? geometry->base : geometry; }
};

// Everything a diagnostic needs at one point, as jets in `dim` variables
// (coordinate i on axis i). Velocities have order `order`, psi order+1.
struct FlowJets {
    int dim = 0;
    int order = 0;
    std::vector<Jet> x;
    JetMat g, ginv;
    Jet sqrt_det;
    std::vector<Jet> v_lower, v_upper;
    bool has_psi = false;
    Jet psi;
    Jet v3;   // reduced flows, base evaluation only
    Jet phi;  // warp, base evaluation only
};

// Full-dimensional evaluation (3D lift for reduced flows). order <= 3 for
// stream-based sources.
FlowJets eval_flow(const FlowSpec& spec, const std::vector<double>& point, int order);
// Reduced flows on the 2D base: v_lower holds (v_1, v_2), v3 separately.
FlowJets eval_reduced(const FlowSpec& spec, const std::vector<double>& base_point, int order);

Jet eval_pressure(const FlowSpec& spec, const std::vector<Jet>& x);
// psi on the 2D stream geometry, any jet layout
Jet eval_psi(const FlowSpec& spec, const std::vector<Jet>& x);

FlowSpec catalog(const std::string& name, const std::map<std::string, double>& params = {}, double t = 0);
std::vector<std::string> catalog_names();

// User-defined flows
FlowSpec stream_flow(const std::string& name, const std::string& psi, Geometry geometry,
                     const std::map<std::string, double>& params = {}, double t = 0);
FlowSpec velocity_flow(const std::string& name, const std::vector<std::string>& components, Geometry geometry,
                       const std::map<std::string, double>& params = {}, double t = 0);
FlowSpec reduced_flow(const std::string& name, const std::string& psi, const std::string& v3, Geometry warped,
                      const std::map<std::string, double>& params = {}, double t = 0);

// Half-integer Bessel functions in closed form.
double bessel_j32(double x);
double bessel_j52(double x);

}  // namespace maf
