#include "maf/flows.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace maf {

namespace {

std::set<std::string> names_of(const std::map<std::string, double>& m) {
    std::set<std::string> s;
    for (const auto& [k, v] : m) s.insert(k);
    return s;
}

Bindings bindings(const FlowSpec& spec, const BackgroundGeometry& geo, const std::vector<Jet>& x) {
    Bindings b = geo.bind(x);
    for (const auto& [k, v] : spec.params) b.params[k] = v;
    b.vars["t"] = Jet(x[0].dim(), x[0].order(), spec.t);
    return b;
}

double require(const std::map<std::string, double>& p, const std::string& flow, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw MissingParameter("flow '" + flow + "' needs parameter '" + key + "'");
    return it->second;
}

Geometry flat_warped() {
    static Geometry g = warped_product(flat_geometry(2), "0", "flat3d-warped", "z");
    return g;
}

}  // namespace

double bessel_j32(double x) {
    return std::sqrt(2 / (std::numbers::pi * x)) * (std::sin(x) / x - std::cos(x));
}

double bessel_j52(double x) {
    return std::sqrt(2 / (std::numbers::pi * x)) * ((3 / (x * x) - 1) * std::sin(x) - 3 * std::cos(x) / x);
}

Jet eval_pressure(const FlowSpec& spec, const std::vector<Jet>& x) {
    if (!spec.pressure) throw MissingPressure("flow '" + spec.name + "' has no pressure expression");
    return evaluate(spec.pressure, bindings(spec, *spec.stream_geometry(), x));
}

Jet eval_psi(const FlowSpec& spec, const std::vector<Jet>& x) {
    if (!spec.psi) throw FlowError("flow '" + spec.name + "' has no stream function");
    return evaluate(spec.psi, bindings(spec, *spec.stream_geometry(), x));
}

FlowJets eval_reduced(const FlowSpec& spec, const std::vector<double>& base_point, int order) {
    if (spec.source != FlowSource::Reduced && spec.source != FlowSource::Stream)
        throw FlowError("flow '" + spec.name + "' is not stream-based");
    if (order + 1 > kMaxJetOrder) throw OrderExceeded("stream flows support velocity order <= 3");
    if (base_point.size() < 2) throw DimensionError("base point needs two coordinates");
    const auto& base = *spec.stream_geometry();
    std::vector<double> bp(base_point.begin(), base_point.begin() + 2);
    auto xs = coordinate_jets(bp, 2, order + 1);
    Bindings b = bindings(spec, base, xs);

    FlowJets f;
    f.dim = 2;
    f.order = order;
    f.psi = evaluate(spec.psi, b);
    f.has_psi = true;
    JetMat g = base.metric_at(xs);
    JetMat gi = inverse(g);
    Jet sd = sqrt(determinant(g));
    Jet phi = spec.source == FlowSource::Reduced ? spec.geometry->warp_at(xs) : Jet(2, order + 1, 0.0);

    // v_i = -sqrt(det g) e^{-phi} eps_ij g^jk d_k psi
    Jet pre = (sd * exp(-phi)).truncate(order);
    Jet d0 = f.psi.derivative(0), d1 = f.psi.derivative(1);
    auto up = [&](int j) { return gi(j, 0).truncate(order) * d0 + gi(j, 1).truncate(order) * d1; };
    f.v_lower = {-(pre * up(1)), pre * up(0)};

    f.g = truncate(g, order);
    f.ginv = truncate(gi, order);
    f.sqrt_det = sd.truncate(order);
    f.phi = phi.truncate(order);
    for (auto& xi : xs) f.x.push_back(xi.truncate(order));
    f.v_upper.resize(2, Jet(2, order, 0.0));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) f.v_upper[i] += f.ginv(i, j) * f.v_lower[j];
    if (spec.source == FlowSource::Reduced) {
        f.v3 = spec.v3 ? evaluate(spec.v3, b).truncate(order) : Jet(2, order, 0.0);
    }
    return f;
}

FlowJets eval_flow(const FlowSpec& spec, const std::vector<double>& point, int order) {
    if (static_cast<int>(point.size()) != spec.dim)
        throw DimensionError("flow '" + spec.name + "' needs " + std::to_string(spec.dim) + " coordinates");
    if (spec.source == FlowSource::Stream) return eval_reduced(spec, point, order);

    FlowJets f;
    f.dim = spec.dim;
    f.order = order;
    f.x = coordinate_jets(point, spec.dim, order);
    f.g = spec.geometry->metric_at(f.x);
    f.ginv = inverse(f.g);
    f.sqrt_det = sqrt(determinant(f.g));
    const Jet zero(spec.dim, order, 0.0);

    if (spec.source == FlowSource::Velocity) {
        Bindings b = bindings(spec, *spec.geometry, f.x);
        for (const auto& e : spec.velocity) f.v_upper.push_back(evaluate(e, b));
        f.v_lower.assign(spec.dim, zero);
        for (int i = 0; i < spec.dim; ++i)
            for (int j = 0; j < spec.dim; ++j) f.v_lower[i] += f.g(i, j) * f.v_upper[j];
        return f;
    }

    FlowJets r = eval_reduced(spec, point, order);
    f.has_psi = true;
    f.psi = r.psi.embed(3);
    f.v_lower = {r.v_lower[0].embed(3), r.v_lower[1].embed(3), r.v3.embed(3)};
    f.v_upper.assign(3, zero);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f.v_upper[i] += f.ginv(i, j) * f.v_lower[j];
    return f;
}

FlowSpec stream_flow(const std::string& name, const std::string& psi, Geometry geometry,
                     const std::map<std::string, double>& params, double t) {
    if (geometry->dim != 2) throw DimensionError("stream functions need a 2D geometry");
    FlowSpec s;
    s.name = name;
    s.dim = 2;
    s.source = FlowSource::Stream;
    s.geometry = geometry;
    s.params = params;
    s.t = t;
    s.psi = parse_expression(psi, names_of(params));
    return s;
}

FlowSpec velocity_flow(const std::string& name, const std::vector<std::string>& components, Geometry geometry,
                       const std::map<std::string, double>& params, double t) {
    if (static_cast<int>(components.size()) != geometry->dim)
        throw DimensionError("velocity needs one component per coordinate");
    FlowSpec s;
    s.name = name;
    s.dim = geometry->dim;
    s.source = FlowSource::Velocity;
    s.geometry = geometry;
    s.params = params;
    s.t = t;
    for (const auto& c : components) s.velocity.push_back(parse_expression(c, names_of(params)));
    return s;
}

FlowSpec reduced_flow(const std::string& name, const std::string& psi, const std::string& v3, Geometry warped,
                      const std::map<std::string, double>& params, double t) {
    if (!warped->is_warped()) throw DimensionError("reduced flows need a warped-product geometry");
    FlowSpec s;
    s.name = name;
    s.dim = 3;
    s.source = FlowSource::Reduced;
    s.geometry = warped;
    s.params = params;
    s.t = t;
    s.psi = parse_expression(psi, names_of(params));
    s.v3 = parse_expression(v3, names_of(params));
    return s;
}

std::vector<std::string> catalog_names() {
    return {"larcheveque", "moffatt", "taylor-green", "burgers", "abc", "hill-interior", "hicks-interior",
            "hicks-exterior"};
}

FlowSpec catalog(const std::string& name, const std::map<std::string, double>& params, double t) {
    auto p = params;
    if (name == "larcheveque") {
        require(p, name, "a");
        require(p, name, "b");
        return stream_flow(name, "0.5*(a*x^2 + b*y^2)", flat_geometry(2), p, t);
    }
    if (name == "moffatt") return stream_flow(name, "-(x^2) + 3*y*t + y^3", flat_geometry(2), p, t);
    if (name == "taylor-green") {
        for (const char* k : {"a", "b", "F"}) require(p, name, k);
        return stream_flow(name, "-F*cos(a*x)*cos(b*y)", flat_geometry(2), p, t);
    }
    if (name == "burgers") {
        for (const char* k : {"alpha", "beta", "sigma3", "zeta3"}) require(p, name, k);
        if (!p.count("gamma")) p["gamma"] = -(p["alpha"] + p["beta"]);
        return velocity_flow(name, {"alpha*x + (sigma3 - zeta3)*y", "(sigma3 + zeta3)*x + beta*y", "gamma*z"},
                             flat_geometry(3), p, t);
    }
    if (name == "abc") {
        require(p, name, "A");
        require(p, name, "B");
        FlowSpec s = reduced_flow(name, "A*cos(y) + B*sin(x)", "A*cos(y) + B*sin(x)", flat_warped(), p, t);
        // Bernoulli: the integrable ABC flow is Beltrami, so p = -|v|^2/2 up to a constant
        s.pressure = parse_expression("-0.5*((A*sin(y))^2 + (B*cos(x))^2 + (A*cos(y) + B*sin(x))^2)", names_of(p));
        return s;
    }
    if (name == "hill-interior") {
        FlowSpec s = reduced_flow(name, "0.75*r^2*(r^2 + z^2 - 1)", "0", cylindrical_geometry(), p, t);
        s.pressure = parse_expression("9/8*(r^4 - r^2 - z^4 + 2*z^2)");
        return s;
    }
    if (name == "hicks-interior") {
        double k = require(p, name, "kappa");
        if (k <= 0) throw FlowError("hicks-interior needs kappa > 0 (use hill-interior for kappa = 0)");
        p["bk"] = bessel_j32(k) / (k * bessel_j52(k));
        p["ck"] = std::sqrt(k) / bessel_j52(k);
        // J_{3/2}(X)/X^{3/2} = sqrt(2/pi) (sin X/X - cos X)/X^2
        const std::string X = "(kappa*sqrt(r^2 + z^2))";
        const std::string psi =
            "1.5*r^2*(bk - ck*sqrt(2/pi)*(sin(" + X + ")/" + X + " - cos(" + X + "))/" + X + "^2)";
        return reduced_flow(name, psi, "kappa*(" + psi + ")/r", cylindrical_geometry(), p, t);
    }
    if (name == "hicks-exterior") {
        if (!p.count("kappa")) p["kappa"] = 0;
        const std::string psi = "0.5*r^2*(1 - (r^2 + z^2)^(-1.5))";
        return reduced_flow(name, psi, "kappa*(" + psi + ")/r", cylindrical_geometry(), p, t);
    }
    throw UnknownFlow(name);
}

}  // namespace maf
