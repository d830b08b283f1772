#include "maf/cli.hpp"

#include "maf/diagnostics.hpp"
#include "maf/gaussbonnet.hpp"
#include "maf/legendre.hpp"
#include "maf/reduction.hpp"
#include "maf/structures.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

namespace maf {

namespace {

using json = nlohmann::json;

const char* kVersion = "0.1.0";

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

std::optional<double> to_double(const std::string& s) {
    auto t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) return std::nullopt;
    return v;
}

double require_double(const std::string& s, const std::string& what) {
    auto v = to_double(s);
    if (!v) throw CliError(kExitBadFlags, "bad number '" + s + "' in " + what);
    return *v;
}

std::vector<double> parse_point(const std::string& s, std::size_t n, const std::string& what) {
    auto parts = split(s, ',');
    if (parts.size() != n) throw CliError(kExitBadFlags, what + " needs " + std::to_string(n) + " comma-separated numbers");
    std::vector<double> p;
    for (const auto& x : parts) p.push_back(require_double(x, what));
    return p;
}

// Name of the most specific error type, used in the flag column.
std::string error_kind(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const SingularStructure&) { return "SingularStructure";
    } catch (const VanishingVorticity&) { return "VanishingVorticity";
    } catch (const DegenerateHessian&) { return "DegenerateHessian";
    } catch (const VanishingLambda&) { return "VanishingLambda";
    } catch (const DiagnosticError&) { return "DiagnosticError";
    } catch (const MissingPressure&) { return "MissingPressure";
    } catch (const DimensionError&) { return "DimensionError";
    } catch (const FlowError&) { return "FlowError";
    } catch (const FoldSingularity&) { return "FoldSingularity";
    } catch (const OutsideSheetDomain&) { return "OutsideSheetDomain";
    } catch (const LegendreError&) { return "LegendreError";
    } catch (const GeometryError&) { return "GeometryError";
    } catch (const DivisionBySingularJet&) { return "DivisionBySingularJet";
    } catch (const DomainError&) { return "DomainError";
    } catch (const JetError&) { return "JetError";
    } catch (const ExteriorError&) { return "ExteriorError";
    } catch (const ExprError&) { return "ExprError";
    } catch (const std::exception&) { return "Error";
    }
    return "Error";
}

// ---- flow selection ----

struct Common {
    std::string flow, params, psi, v3, velocity, geometry, warp, out;
    double t = 0;
    double eps_sing = 1e-10;
    int jobs = 1;
    bool timing = false;
};

void add_flow_options(CLI::App* app, Common& c) {
    app->add_option("--flow", c.flow, "catalog flow: " + join(catalog_names(), ", "));
    app->add_option("--t", c.t, "time");
    app->add_option("--params", c.params, "parameters k=v,...");
    app->add_option("--psi", c.psi, "user stream function");
    app->add_option("--v3", c.v3, "with --psi: x3 velocity of a reduced flow");
    app->add_option("--velocity", c.velocity, "user velocity components v^i separated by ';'");
    app->add_option("--geometry", c.geometry, "background: " + join(geometry_names(), ", "));
    app->add_option("--warp", c.warp, "with --v3: warp phi on a non-warped base (default 0)");
    app->add_option("--eps-sing", c.eps_sing, "singularity threshold")->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "output file (default stdout)");
}

std::map<std::string, double> parse_params(const std::string& text) {
    std::map<std::string, double> p;
    if (trim(text).empty()) return p;
    for (const auto& item : split(text, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw CliError(kExitBadFlags, "parameter '" + item + "' is not k=v");
        p[trim(item.substr(0, eq))] = require_double(item.substr(eq + 1), "--params");
    }
    return p;
}

Geometry pick_geometry(const std::string& name, const std::map<std::string, double>& p, const std::string& dflt) {
    try {
        return geometry_by_name(name.empty() ? dflt : name, p);
    } catch (const GeometryError&) {
        throw CliError(kExitUnknownName, "unknown geometry '" + name + "'; valid: " + join(geometry_names(), ", "));
    }
}

FlowSpec make_flow(const Common& c) {
    auto p = parse_params(c.params);
    try {
        if (!c.psi.empty()) {
            if (!c.v3.empty()) {
                Geometry g = pick_geometry(c.geometry, p, "flat2d");
                if (!g->is_warped()) {
                    if (g->dim != 2) throw CliError(kExitBadFlags, "reduced flows need a 2D base");
                    g = warped_product(g, c.warp.empty() ? "0" : c.warp, g->name + "-warped", "z");
                }
                return reduced_flow("user", c.psi, c.v3, g, p, c.t);
            }
            return stream_flow("user", c.psi, pick_geometry(c.geometry, p, "flat2d"), p, c.t);
        }
        if (!c.velocity.empty()) {
            auto comps = split(c.velocity, ';');
            std::string dflt = comps.size() == 3 ? "flat3d" : "flat2d";
            return velocity_flow("user", comps, pick_geometry(c.geometry, p, dflt), p, c.t);
        }
        if (c.flow.empty()) throw CliError(kExitBadFlags, "one of --flow, --psi, --velocity is required");
        return catalog(c.flow, p, c.t);
    } catch (const UnknownFlow& e) {
        throw CliError(kExitUnknownName, std::string(e.what()) + "; valid: " + join(catalog_names(), ", "));
    } catch (const ExprError& e) {
        throw CliError(kExitBadFlags, std::string("expression: ") + e.what());
    } catch (const FlowError& e) {
        throw CliError(kExitBadFlags, e.what());
    } catch (const GeometryError& e) {
        throw CliError(kExitBadFlags, e.what());
    }
}

json manifest(const std::string& command, const Common& c, const FlowSpec& spec) {
    json m;
    m["tool"] = "maf";
    m["version"] = kVersion;
    m["command"] = command;
    m["flow"] = spec.name;
    m["params"] = json(spec.params);
    m["t"] = spec.t;
    m["geometry"] = spec.geometry->name;
    m["eps_sing"] = c.eps_sing;
    if (!c.psi.empty()) m["psi"] = c.psi;
    if (!c.v3.empty()) m["v3"] = c.v3;
    if (!c.velocity.empty()) m["velocity"] = c.velocity;
    return m;
}

// ---- per-point evaluation ----

struct PointCtx {
    const FlowSpec& spec;
    std::vector<double> x;
    Settings s;
    FSource src = FSource::Auto;
    double lambda = 1;

    PointCtx(const FlowSpec& f, std::vector<double> p, Settings st, FSource fs, double l)
        : spec(f), x(std::move(p)), s(st), src(fs), lambda(l) {}

    std::optional<KinematicState> kin_;
    std::optional<MetricValue> g_;
    std::optional<PullbackCurvature> R_;
    std::optional<ReducedMetrics> rm_;
    std::optional<ReducedCurvatures> rc_;
    std::optional<ReducedTraces> rt_;
    std::optional<MomentMaps> mm_;
    std::optional<ReducedResiduals> rr_;
    std::optional<PullbackResiduals> pb_;

    const KinematicState& kin() {
        if (!kin_) kin_ = kinematics(spec, x);
        return *kin_;
    }
    const MetricValue& g() {
        if (!g_) g_ = pullback_metric(spec, x, s);
        return *g_;
    }
    const PullbackCurvature& R() {
        if (!R_) R_ = pullback_scalar_curvature(spec, x, s);
        return *R_;
    }
    const ReducedMetrics& rm() {
        if (!rm_) rm_ = reduced_metrics(spec, x, s, src);
        return *rm_;
    }
    const ReducedCurvatures& rc() {
        if (!rc_) rc_ = reduced_curvatures(spec, x, s, src);
        return *rc_;
    }
    const ReducedTraces& rt() {
        if (!rt_) rt_ = reduced_traces(spec, x, src);
        return *rt_;
    }
    const MomentMaps& mm() {
        if (!mm_) mm_ = moment_maps(spec, x, lambda);
        return *mm_;
    }
    const ReducedResiduals& rr() {
        if (!rr_) rr_ = reduced_constraint_residuals(spec, x);
        return *rr_;
    }
    const PullbackResiduals& pb() {
        if (!pb_) pb_ = pullback_forms(spec, x);
        return *pb_;
    }
    std::vector<double> base() const { return {x[0], x[1]}; }
};

using FieldFn = std::function<std::string(PointCtx&)>;
struct FieldDef {
    std::string name;
    FieldFn fn;
};

FieldFn num(std::function<double(PointCtx&)> f) {
    return [f](PointCtx& c) { return format_number(f(c)); };
}

double entry(const Eigen::MatrixXd& m, int i, int j) {
    if (i >= m.rows() || j >= m.cols()) throw DimensionError("component outside the metric");
    return m(i, j);
}

std::vector<FieldDef> diagnose_fields() {
    std::vector<FieldDef> f = {
        {"f", num([](PointCtx& c) { return c.kin().f; })},
        {"zeta", num([](PointCtx& c) {
             if (c.kin().dim != 2) throw DimensionError("scalar vorticity is 2D only");
             return c.kin().scalar_vorticity;
         })},
        {"zeta2", num([](PointCtx& c) { return c.kin().zeta_sq; })},
        {"strain2", num([](PointCtx& c) { return c.kin().strain_sq; })},
        {"fhat", num([](PointCtx& c) { return fhat(c.spec, c.x, on_shell_q(c.spec, c.x)); })},
        {"Rhat", num([](PointCtx& c) { return phase_scalar_curvature(c.spec, c.x, on_shell_q(c.spec, c.x), c.s); })},
        {"Rhat_flat", num([](PointCtx& c) { return phase_scalar_curvature_flat(c.spec, c.x, c.s); })},
        {"R", num([](PointCtx& c) { return c.R().R; })},
        {"Rtilde", num([](PointCtx& c) { return c.R().Rtilde; })},
    };
    const char* comp[] = {"1", "2", "3"};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            f.push_back({std::string("g") + comp[i] + comp[j],
                         num([i, j](PointCtx& c) { return entry(c.g().matrix, i, j); })});
    auto eig = [](int k) {
        return num([k](PointCtx& c) {
            auto e = pullback_eigenvalues(c.g(), c.kin());
            if (k >= static_cast<int>(e.values.size())) throw DimensionError("no such eigenvalue");
            return e.values[k];
        });
    };
    f.push_back({"E+", eig(0)});
    f.push_back({"E-", eig(1)});
    f.push_back({"E3", eig(2)});
    f.push_back({"DR", num([](PointCtx& c) { return pullback_eigenvalues(c.g(), c.kin()).DR; })});
    f.push_back({"signature", [](PointCtx& c) { return std::string(to_string(c.g().signature)); }});
    f.push_back({"class", [](PointCtx& c) { return std::string(to_string(classify(c.spec, c.x, c.s))); }});
    f.push_back({"helicity", num([](PointCtx& c) { return helicity_density(c.spec, c.x); })});
    f.push_back({"div_res", num([](PointCtx& c) { return c.pb().varpi; })});
    f.push_back({"pressure_res", num([](PointCtx& c) { return c.pb().alpha; })});
    return f;
}

std::vector<Jet> stream_coords(const std::vector<double>& x) { return coordinate_jets({x[0], x[1]}, 2, 0); }

std::vector<FieldDef> sample_fields() {
    std::vector<FieldDef> f = {
        {"psi", num([](PointCtx& c) { return eval_psi(c.spec, stream_coords(c.x)).value(); })},
        {"p", num([](PointCtx& c) {
             if (!c.spec.pressure) throw MissingPressure("no pressure expression");
             auto xs = c.spec.source == FlowSource::Reduced ? stream_coords(c.x)
                                                             : coordinate_jets(c.x, static_cast<int>(c.x.size()), 0);
             return eval_pressure(c.spec, xs).value();
         })},
    };
    for (int i = 0; i < 3; ++i) {
        f.push_back({"v" + std::to_string(i + 1), num([i](PointCtx& c) {
                         auto fj = eval_flow(c.spec, c.x, 0);
                         if (i >= fj.dim) throw DimensionError("no such component");
                         return fj.v_upper[i].value();
                     })});
        f.push_back({"vl" + std::to_string(i + 1), num([i](PointCtx& c) {
                         auto fj = eval_flow(c.spec, c.x, 0);
                         if (i >= fj.dim) throw DimensionError("no such component");
                         return fj.v_lower[i].value();
                     })});
    }
    return f;
}

std::vector<FieldDef> reduce_fields() {
    std::vector<FieldDef> f = {
        {"fhat2+h", num([](PointCtx& c) { return reduced_F(c.spec, c.base(), c.src); })},
        {"fhat2", num([](PointCtx& c) {
             return reduced_F(c.spec, c.base(), FSource::Pressure) - h_plus_minus(c.spec, c.base()).plus;
         })},
        {"h+", num([](PointCtx& c) { return h_plus_minus(c.spec, c.base()).plus; })},
        {"h-", num([](PointCtx& c) { return h_plus_minus(c.spec, c.base()).minus; })},
        {"Rhat2", num([](PointCtx& c) { return c.rc().Rhat2; })},
        {"R2", num([](PointCtx& c) { return c.rc().R2; })},
        {"E+", num([](PointCtx& c) { return reduced_eigenvalues(c.spec, c.base(), c.src)[0]; })},
        {"E-", num([](PointCtx& c) { return reduced_eigenvalues(c.spec, c.base(), c.src)[1]; })},
        {"g11", num([](PointCtx& c) { return c.rm().g2.matrix(0, 0); })},
        {"g12", num([](PointCtx& c) { return c.rm().g2.matrix(0, 1); })},
        {"g22", num([](PointCtx& c) { return c.rm().g2.matrix(1, 1); })},
        {"signature", [](PointCtx& c) { return std::string(to_string(c.rm().g2.signature)); }},
        {"cross_check", num([](PointCtx& c) { return c.rm().cross_check; })},
        {"div_res", num([](PointCtx& c) { return c.rr().divergence; })},
        {"pressure_res", num([](PointCtx& c) { return c.rr().pressure; })},
        {"zeta2_3d", num([](PointCtx& c) { return c.rt().zeta2_3d; })},
        {"strain2_3d", num([](PointCtx& c) { return c.rt().strain2_3d; })},
        {"f3_check", num([](PointCtx& c) { return c.rt().f3_check; })},
        {"mu", num([](PointCtx& c) { return c.mm().symplectic; })},
        {"mu1", num([](PointCtx& c) { return c.mm().two_plectic(0); })},
        {"mu2", num([](PointCtx& c) { return c.mm().two_plectic(1); })},
        {"level_res", num([](PointCtx& c) { return c.mm().level_residual.norm(); })},
    };
    return f;
}

std::vector<FieldDef> select_fields(const std::vector<FieldDef>& all, const std::string& text) {
    std::vector<FieldDef> out;
    for (const auto& raw : split(text, ',')) {
        auto name = trim(raw);
        auto it = std::find_if(all.begin(), all.end(), [&](const FieldDef& d) { return d.name == name; });
        if (it == all.end()) {
            std::vector<std::string> names;
            for (const auto& d : all) names.push_back(d.name);
            throw CliError(kExitUnknownName, "unknown field '" + name + "'; valid: " + join(names, ", "));
        }
        out.push_back(*it);
    }
    if (out.empty()) throw CliError(kExitBadFlags, "--fields is empty");
    return out;
}

// Evaluates every row, possibly on several threads; rows land by grid index.
std::vector<std::string> sweep(std::size_t n, int jobs, const std::function<std::string(std::size_t)>& row) {
    std::vector<std::string> rows(n);
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(n, 1))));
    auto work = [&](int w) {
        for (std::size_t i = w; i < n; i += jobs) rows[i] = row(i);
    };
    if (jobs == 1) {
        work(0);
        return rows;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
    return rows;
}

std::string eval_row(PointCtx& c, const std::vector<FieldDef>& fields) {
    std::string line;
    for (double v : c.x) line += format_number(v) + ",";
    std::vector<std::string> flags;
    for (const auto& f : fields) {
        try {
            line += f.fn(c);
        } catch (...) {
            auto k = error_kind(std::current_exception());
            if (std::find(flags.begin(), flags.end(), k) == flags.end()) flags.push_back(k);
            line += "nan";
        }
        line += ",";
    }
    return line + join(flags, "|") + "\n";
}

// Output goes to --out when given.
struct Sink {
    std::ofstream file;
    std::ostream* os;
    Sink(const std::string& path, std::ostream& dflt) : os(&dflt) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw CliError(kExitBadFlags, "cannot write '" + path + "'");
        os = &file;
    }
    std::ostream& operator*() { return *os; }
};

struct GridOpts {
    std::string grid, fields, fsource = "auto";
    double lambda = 1;
};

FSource parse_fsource(const std::string& s) {
    if (s == "auto") return FSource::Auto;
    if (s == "pressure") return FSource::Pressure;
    if (s == "kinematic") return FSource::Kinematic;
    throw CliError(kExitBadFlags, "--f-source must be auto, pressure or kinematic");
}

int run_grid(const std::string& command, const Common& c, const GridOpts& go, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    FlowSpec spec = make_flow(c);
    std::vector<FieldDef> all;
    std::vector<std::string> coords;
    if (command == "reduce") {
        if (spec.source != FlowSource::Reduced) throw CliError(kExitBadFlags, "reduce needs a reduced flow");
        all = reduce_fields();
        coords = spec.stream_geometry()->coords;
    } else {
        all = command == "diagnose" ? diagnose_fields() : sample_fields();
        coords = spec.geometry->coords;
    }
    auto fields = select_fields(all, go.fields);
    if (go.grid.empty()) throw CliError(kExitBadFlags, "--grid is required");
    GridSpec grid = parse_grid(go.grid, coords);
    FSource src = parse_fsource(go.fsource);

    json m = manifest(command, c, spec);
    m["grid"] = go.grid;
    std::vector<std::string> names;
    for (const auto& f : fields) names.push_back(f.name);
    m["fields"] = names;
    if (command == "reduce") {
        FSource used = src == FSource::Auto ? (spec.pressure ? FSource::Pressure : FSource::Kinematic) : src;
        m["F_source"] = used == FSource::Pressure ? "pressure" : "kinematic";
        m["lambda"] = go.lambda;
    } else if (command == "diagnose") {
        m["fhat_source"] = spec.pressure ? "pressure" : "pullback f";
    }

    Settings s{c.eps_sing};
    auto rows = sweep(grid.size(), c.jobs, [&](std::size_t i) {
        PointCtx ctx(spec, grid.point(i), s, src, go.lambda);
        return eval_row(ctx, fields);
    });
    if (c.timing)
        m["timing_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Sink sink(c.out, out);
    *sink << "# maf " << kVersion << "\n# manifest " << m.dump() << "\n";
    for (const auto& a : grid.axes) *sink << a.name << ",";
    *sink << join(names, ",") << ",flag\n";
    for (const auto& r : rows) *sink << r;
    return kExitOk;
}

// ---- gauss-bonnet ----

struct GBOpts {
    std::string level, seed, center, metric = "auto";
    double disc = 0, tol = 1e-8;
};

int run_gauss_bonnet(const Common& c, const GBOpts& o, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    FlowSpec spec = make_flow(c);
    if (spec.source == FlowSource::Velocity) throw CliError(kExitBadFlags, "gauss-bonnet needs a stream or reduced flow");
    std::string metric = o.metric;
    if (metric == "auto") metric = spec.source == FlowSource::Reduced ? "reduced" : "pullback";
    MetricField g;
    if (metric == "pullback") {
        if (spec.source != FlowSource::Stream) throw CliError(kExitBadFlags, "--metric pullback needs a 2D stream flow");
        g = pullback_field(spec);
    } else if (metric == "reduced") {
        if (spec.source != FlowSource::Reduced) throw CliError(kExitBadFlags, "--metric reduced needs a reduced flow");
        g = reduced_pullback_field(spec);
    } else if (metric == "background") {
        auto geo = spec.stream_geometry();
        g = [geo](const std::vector<double>& x, int order) { return geo->metric_at(coordinate_jets(x, 2, order)); };
    } else {
        throw CliError(kExitBadFlags, "--metric must be auto, pullback, reduced or background");
    }

    json m = manifest("gauss-bonnet", c, spec);
    m["metric"] = metric;
    m["tol"] = o.tol;
    Region region;
    if (!o.level.empty()) {
        auto eq = o.level.find('=');
        if (eq == std::string::npos || trim(o.level.substr(0, eq)) != "psi")
            throw CliError(kExitBadFlags, "--level must read psi=<value>");
        if (o.seed.empty()) throw CliError(kExitBadFlags, "--level needs --seed x,y");
        double value = require_double(o.level.substr(eq + 1), "--level");
        auto seed = parse_point(o.seed, 2, "--seed");
        m["region"] = {{"level", value}, {"seed", seed}};
        region = level_set_region(stream_level(spec), value, seed);
    } else if (o.disc > 0) {
        auto center = o.center.empty() ? std::vector<double>{0, 0} : parse_point(o.center, 2, "--center");
        m["region"] = {{"disc", o.disc}, {"center", center}};
        region = disc_region(center, o.disc);
    } else {
        throw CliError(kExitBadFlags, "give --level psi=<value> --seed x,y or --disc <radius>");
    }
    QuadratureOptions q;
    q.tol = o.tol;
    auto r = euler_number(region, g, q);
    json res;
    res["manifest"] = m;
    res["area_term"] = r.area_term;
    res["boundary_term"] = r.boundary_term;
    res["corner_term"] = r.corner_term;
    res["chi"] = r.chi;
    if (c.timing)
        res["manifest"]["timing_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Sink sink(c.out, out);
    *sink << res.dump(2) << "\n";
    return kExitOk;
}

// ---- legendre ----

struct LegOpts {
    std::string points, grid;
    bool inverse = false;
    int sheet = 0;
    double eps_fold = 1e-8;
    std::string box;
};

std::vector<std::array<double, 2>> read_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitBadFlags, "cannot read '" + path + "'");
    std::vector<std::array<double, 2>> pts;
    std::string line;
    int cx = 0, cy = 1;
    bool first = true;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, ',');
        if (first) {
            first = false;
            if (cells.empty() || !to_double(cells[0])) {
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    auto n = trim(cells[i]);
                    if (n == "x" || n == "xd") cx = static_cast<int>(i);
                    if (n == "y" || n == "yd") cy = static_cast<int>(i);
                }
                continue;
            }
        }
        if (static_cast<int>(cells.size()) <= std::max(cx, cy)) throw CliError(kExitBadFlags, "short row in " + path);
        pts.push_back({require_double(cells[cx], path), require_double(cells[cy], path)});
    }
    return pts;
}

int run_legendre(const Common& c, const LegOpts& o, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    FlowSpec spec = make_flow(c);
    if (spec.source != FlowSource::Stream || !spec.geometry->is_flat())
        throw CliError(kExitBadFlags, "legendre needs a 2D stream flow on the flat plane");
    LegendreSettings ls;
    ls.eps_fold = o.eps_fold;
    if (!o.box.empty()) {
        auto b = parse_point(o.box, 4, "--box");
        ls.box = {b[0], b[1], b[2], b[3]};
    }
    if (o.inverse && o.sheet != 1 && o.sheet != -1) throw CliError(kExitBadFlags, "--inverse needs --sheet 1 or -1");

    std::vector<std::array<double, 2>> pts;
    json m = manifest("legendre", c, spec);
    if (!o.points.empty()) {
        pts = read_points(o.points);
        m["points"] = o.points;
    } else if (!o.grid.empty()) {
        auto grid = parse_grid(o.grid, o.inverse ? std::vector<std::string>{"xd", "yd"} : spec.geometry->coords);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto p = grid.point(i);
            pts.push_back({p[0], p[1]});
        }
        m["grid"] = o.grid;
    } else {
        throw CliError(kExitBadFlags, "give --points file.csv or --grid");
    }
    m["inverse"] = o.inverse;
    m["eps_fold"] = ls.eps_fold;
    if (o.inverse) m["sheet"] = o.sheet;

    auto rows = sweep(pts.size(), c.jobs, [&](std::size_t i) {
        const auto& p = pts[i];
        std::string flag;
        LegendrePoint lp;
        double res = std::numeric_limits<double>::quiet_NaN();
        bool ok = true;
        try {
            lp = o.inverse ? from_dual(spec, p, o.sheet, ls) : to_dual(spec, p, ls);
            res = dual_MA_residual(spec, lp.primal, ls);
        } catch (...) {
            flag = error_kind(std::current_exception());
            ok = false;
        }
        auto nan = std::numeric_limits<double>::quiet_NaN();
        std::array<double, 2> primal = o.inverse ? (ok ? lp.primal : std::array<double, 2>{nan, nan}) : p;
        std::array<double, 2> dual = o.inverse ? p : (ok ? lp.dual : std::array<double, 2>{nan, nan});
        std::vector<double> vals = {primal[0], primal[1], dual[0], dual[1],
                                    ok ? lp.psi : nan, ok ? lp.psi_dual : nan, ok ? lp.det_hessian : nan,
                                    ok ? static_cast<double>(lp.sheet) : nan, res};
        std::string line;
        for (double v : vals) line += format_number(v) + ",";
        return line + flag + "\n";
    });
    if (c.timing)
        m["timing_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Sink sink(c.out, out);
    *sink << "# maf " << kVersion << "\n# manifest " << m.dump() << "\n";
    *sink << "x,y,xd,yd,psi,psi_dual,det_hessian,sheet,residual,flag\n";
    for (const auto& r : rows) *sink << r;
    return kExitOk;
}

// ---- verify ----

struct VerifyOpts {
    int n = 20;
    unsigned seed = 1;
    std::string suites = "structures,background,reduction";
};

struct Tally {
    json report = json::object();
    bool pass = true;
    void add(const std::string& suite, const std::string& item, const std::string& key, double worst, double tol) {
        bool ok = std::isfinite(worst) && worst <= tol;
        report[suite][item][key] = {{"max", worst}, {"tol", tol}, {"pass", ok}};
        pass = pass && ok;
    }
};

std::vector<double> uniform_point(std::mt19937_64& rng, const std::vector<std::pair<double, double>>& box) {
    std::vector<double> p;
    for (auto [lo, hi] : box) p.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
    return p;
}

struct VerifyFlow {
    FlowSpec spec;
    std::vector<std::pair<double, double>> box;
};

std::vector<VerifyFlow> verify_flows(const Common& c) {
    if (!c.flow.empty() || !c.psi.empty() || !c.velocity.empty()) {
        auto s = make_flow(c);
        return {{s, std::vector<std::pair<double, double>>(s.dim, {0.2, 0.9})}};
    }
    const std::pair<double, double> u{0.2, 1.2}, w{0.2, 0.9};
    return {
        {catalog("larcheveque", {{"a", 1.3}, {"b", -0.4}}), {u, u}},
        {catalog("moffatt", {}, -1), {u, u}},
        {catalog("taylor-green", {{"a", 1}, {"b", 1}, {"F", 1}}), {u, u}},
        {catalog("burgers", {{"alpha", 0.3}, {"beta", -1.1}, {"sigma3", 0.4}, {"zeta3", 0.9}}), {w, w, w}},
        {catalog("abc", {{"A", 1.5}, {"B", 1}}), {{0.2, 2.9}, {-1.3, 1.3}, w}},
        {catalog("hill-interior"), {{0.1, 0.9}, {-0.4, 0.4}, w}},
        {catalog("hicks-interior", {{"kappa", 10}}), {{0.1, 0.6}, {-0.5, 0.5}, w}},
    };
}

const std::map<std::string, double>& structure_tolerances() {
    static const std::map<std::string, double> t = {{"pfaffian", 1e-10}, {"J_square", 1e-9}, {"metric", 1e-10}};
    return t;
}

void verify_structures(const std::vector<VerifyFlow>& flows, int n, std::mt19937_64& rng, Tally& tally,
                       const Settings& s) {
    for (const auto& vf : flows) {
        std::map<std::string, double> worst;
        for (int k = 0; k < n; ++k) {
            auto x = uniform_point(rng, vf.box);
            auto q = on_shell_q(vf.spec, x);
            if (k % 2) q[0] += 0.5;
            if (std::abs(fhat(vf.spec, x, q)) < 1e-3) continue;
            for (const auto& [key, v] : verify_structure(build_structure(vf.spec, x, q, s), vf.spec, s))
                worst[key] = std::max(worst[key], v);
        }
        for (const auto& [key, v] : worst) {
            double tol = 1e-8;
            for (const auto& [prefix, t] : structure_tolerances())
                if (key.rfind(prefix, 0) == 0) tol = t;
            tally.add("structures", vf.spec.name, key, v, tol);
        }
    }
}

void verify_background(int n, std::mt19937_64& rng, Tally& tally) {
    for (const auto& name : geometry_names()) {
        auto geo = geometry_by_name(name);
        const int d = geo->dim;
        double anti = 0, bianchi = 0, pair = 0, scalar = 0;
        for (int k = 0; k < n; ++k) {
            auto x = uniform_point(rng, std::vector<std::pair<double, double>>(d, {0.3, 1.2}));
            JetMat g = geo->metric_at(coordinate_jets(x, d, 2));
            auto cv = curvature_values(g);
            Eigen::MatrixXd gv = g.values();
            auto low = [&](int i, int j, int a, int b) {
                double s = 0;
                for (int l = 0; l < d; ++l) s += cv.R(i, j, a, l) * gv(l, b);
                return s;
            };
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) {
                            anti = std::max(anti, std::abs(cv.R(i, j, a, b) + cv.R(j, i, a, b)));
                            bianchi = std::max(bianchi,
                                               std::abs(cv.R(i, j, a, b) + cv.R(j, a, i, b) + cv.R(a, i, j, b)));
                            pair = std::max(pair, std::abs(low(i, j, a, b) - low(a, b, i, j)));
                        }
            double expect = name == "sphere" ? 2.0 : 0.0;
            if (name != "curved2d") scalar = std::max(scalar, std::abs(cv.scalar - expect));
        }
        tally.add("background", name, "antisymmetry", anti, 1e-10);
        tally.add("background", name, "bianchi", bianchi, 1e-10);
        tally.add("background", name, "pair_symmetry", pair, 1e-10);
        if (name != "curved2d") tally.add("background", name, "scalar_closed_form", scalar, 1e-10);
    }
}

void verify_reduction(const std::vector<VerifyFlow>& flows, int n, std::mt19937_64& rng, Tally& tally,
                      const Settings& s) {
    for (const auto& vf : flows) {
        if (vf.spec.source != FlowSource::Reduced) continue;
        double div = 0, pres = 0, level = 0, f3 = 0, cross = 0, lift = 0;
        std::vector<std::pair<double, double>> box(vf.box.begin(), vf.box.begin() + 2);
        for (int k = 0; k < n; ++k) {
            auto x = uniform_point(rng, box);
            auto r = reduced_constraint_residuals(vf.spec, x);
            div = std::max(div, std::abs(r.divergence));
            if (vf.spec.pressure) pres = std::max(pres, std::abs(r.pressure));
            level = std::max(level, moment_maps(vf.spec, x).level_residual.norm());
            f3 = std::max(f3, reduced_traces(vf.spec, x).f3_check);
            std::vector<double> x3{x[0], x[1], 0.3};
            lift = std::max(lift, std::abs(reduced_F(vf.spec, x, FSource::Kinematic) - kinematics(vf.spec, x3).f));
            if (vf.spec.pressure)
                lift = std::max(lift, std::abs(reduced_F(vf.spec, x) - fhat(vf.spec, x3, on_shell_q(vf.spec, x3))));
            if (std::abs(reduced_F(vf.spec, x)) > 1e-3) cross = std::max(cross, reduced_metrics(vf.spec, x, s).cross_check);
        }
        tally.add("reduction", vf.spec.name, "divergence", div, 1e-9);
        if (vf.spec.pressure) tally.add("reduction", vf.spec.name, "pressure", pres, 1e-9);
        tally.add("reduction", vf.spec.name, "level_set", level, 1e-10);
        tally.add("reduction", vf.spec.name, "f3_check", f3, 1e-8);
        tally.add("reduction", vf.spec.name, "lift_consistency", lift, 1e-9);
        tally.add("reduction", vf.spec.name, "metric_forms", cross, 1e-9);
    }
}

int run_verify(const Common& c, const VerifyOpts& o, std::ostream& out) {
    if (o.n < 1) throw CliError(kExitBadFlags, "--n must be positive");
    auto flows = verify_flows(c);
    std::set<std::string> suites;
    for (const auto& s : split(o.suites, ',')) {
        auto t = trim(s);
        if (t != "structures" && t != "background" && t != "reduction")
            throw CliError(kExitUnknownName, "unknown suite '" + t + "'; valid: structures, background, reduction");
        suites.insert(t);
    }
    Settings st{c.eps_sing};
    std::mt19937_64 rng(o.seed);
    Tally tally;
    if (suites.count("structures")) verify_structures(flows, o.n, rng, tally, st);
    if (suites.count("background")) verify_background(o.n, rng, tally);
    if (suites.count("reduction")) verify_reduction(flows, o.n, rng, tally, st);
    json res;
    res["manifest"] = {{"tool", "maf"}, {"version", kVersion}, {"command", "verify"}, {"n", o.n},
                       {"seed", o.seed}, {"suites", std::vector<std::string>(suites.begin(), suites.end())}};
    res["results"] = tally.report;
    res["pass"] = tally.pass;
    Sink sink(c.out, out);
    *sink << res.dump(2) << "\n";
    return tally.pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

double GridAxis::at(int i) const {
    if (count == 1) return min;
    if (i == count - 1) return max;
    return min + (max - min) * i / (count - 1);
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
    return n;
}

std::vector<double> GridSpec::point(std::size_t index) const {
    std::vector<double> p(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        p[k] = axes[k].at(static_cast<int>(index % axes[k].count));
        index /= axes[k].count;
    }
    return p;
}

GridSpec parse_grid(const std::string& text, const std::vector<std::string>& coords) {
    std::map<std::string, GridAxis> given;
    for (const auto& item : split(text, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw CliError(kExitBadFlags, "grid axis '" + item + "' is not name=a:b:n");
        GridAxis a;
        a.name = trim(item.substr(0, eq));
        if (std::find(coords.begin(), coords.end(), a.name) == coords.end())
            throw CliError(kExitBadFlags, "grid axis '" + a.name + "' is not a coordinate (" + join(coords, ", ") + ")");
        if (given.count(a.name)) throw CliError(kExitBadFlags, "grid axis '" + a.name + "' given twice");
        auto parts = split(item.substr(eq + 1), ':');
        if (parts.size() == 1) {
            a.min = a.max = require_double(parts[0], "--grid");
        } else if (parts.size() == 3) {
            a.min = require_double(parts[0], "--grid");
            a.max = require_double(parts[1], "--grid");
            auto cnt = to_double(parts[2]);
            if (!cnt || *cnt != std::floor(*cnt)) throw CliError(kExitBadFlags, "grid count must be an integer");
            if (*cnt < 2) throw CliError(kExitBadFlags, "grid count must be at least 2 (pin a coordinate with name=value)");
            if (*cnt > 1e7) throw CliError(kExitBadFlags, "grid too large");
            a.count = static_cast<int>(*cnt);
            if (!(a.max > a.min)) throw CliError(kExitBadFlags, "grid axis '" + a.name + "' needs max > min");
        } else {
            throw CliError(kExitBadFlags, "grid axis '" + item + "' is not name=a:b:n");
        }
        given[a.name] = a;
    }
    GridSpec g;
    double total = 1;
    for (const auto& name : coords) {
        auto it = given.find(name);
        if (it == given.end()) throw CliError(kExitBadFlags, "grid misses coordinate '" + name + "'");
        g.axes.push_back(it->second);
        total *= it->second.count;
    }
    if (total > 1e7) throw CliError(kExitBadFlags, "grid exceeds 10^7 points");
    return g;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0) v = 0;  // no "-0"
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monge-Ampere geometry diagnostics for incompressible flows", "maf"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common c;
    GridOpts go;
    GBOpts gb;
    LegOpts lo;
    VerifyOpts vo;

    auto grid_cmd = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        add_flow_options(sub, c);
        sub->add_option("--grid", go.grid, "x=a:b:n,y=a:b:n (pin with z=value)");
        sub->add_option("--fields", go.fields, "comma-separated field names")->required();
        sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--timing", c.timing, "record wall time in the manifest");
        return sub;
    };
    auto* diag = grid_cmd("diagnose", "geometric diagnostics on a grid");
    auto* sample = grid_cmd("sample", "flow fields on a grid");
    auto* reduce = grid_cmd("reduce", "reduced quantities on the base of a warped product");
    reduce->add_option("--f-source", go.fsource, "auto, pressure or kinematic");
    reduce->add_option("--lambda", go.lambda, "symplectic moment map scale");

    auto* gauss = app.add_subcommand("gauss-bonnet", "Euler number of a region from curvature integrals");
    add_flow_options(gauss, c);
    gauss->add_option("--level", gb.level, "psi=<value>");
    gauss->add_option("--seed", gb.seed, "x,y inside the level set");
    gauss->add_option("--disc", gb.disc, "disc radius")->check(CLI::PositiveNumber);
    gauss->add_option("--center", gb.center, "disc centre x,y");
    gauss->add_option("--metric", gb.metric, "auto, pullback, reduced or background");
    gauss->add_option("--tol", gb.tol, "quadrature tolerance")->check(CLI::PositiveNumber);
    gauss->add_flag("--timing", c.timing, "record wall time");

    auto* leg = app.add_subcommand("legendre", "Legendre dual points and residuals");
    add_flow_options(leg, c);
    leg->add_option("--points", lo.points, "CSV with x,y columns (xd,yd with --inverse)");
    leg->add_option("--grid", lo.grid, "grid instead of a points file");
    leg->add_flag("--inverse", lo.inverse, "inputs are dual points");
    leg->add_option("--sheet", lo.sheet, "sheet label for --inverse");
    leg->add_option("--eps-fold", lo.eps_fold, "relative fold threshold")->check(CLI::PositiveNumber);
    leg->add_option("--box", lo.box, "primal search box xmin,xmax,ymin,ymax");
    leg->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    leg->add_flag("--timing", c.timing, "record wall time");

    auto* ver = app.add_subcommand("verify", "invariant suites at random points, JSON report");
    add_flow_options(ver, c);
    ver->add_option("--n", vo.n, "points per flow");
    ver->add_option("--seed", vo.seed, "random seed");
    ver->add_option("--suites", vo.suites, "structures,background,reduction");

    std::vector<std::string> argv_s = {"maf"};
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_s) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "maf: " << e.what() << "\n";
        return kExitBadFlags;
    }

    try {
        if (diag->parsed()) return run_grid("diagnose", c, go, out);
        if (sample->parsed()) return run_grid("sample", c, go, out);
        if (reduce->parsed()) return run_grid("reduce", c, go, out);
        if (gauss->parsed()) return run_gauss_bonnet(c, gb, out);
        if (leg->parsed()) return run_legendre(c, lo, out);
        if (ver->parsed()) return run_verify(c, vo, out);
    } catch (const CliError& e) {
        err << "maf: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        err << "maf: " << error_kind(std::current_exception()) << ": " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitBadFlags;
}

}  // namespace maf
