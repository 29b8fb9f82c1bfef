#include "lowreg/study.hpp"

#include "lowreg/interpolation.hpp"
#include "lowreg/maxwell.hpp"
#include "lowreg/mesh.hpp"
#include "lowreg/norms.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace lowreg {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_maxwell(Operator op)
{
    return op == Operator::MaxwellStrong || op == Operator::MaxwellNitsche;
}

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json("exact");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw InvalidArgument("config: unknown key '" + it.key() + "' in " + where);
}

Vec3 vec_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 3)
        throw InvalidArgument("config: expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

CoefficientPartition make_coefficients(const StudyConfig& c)
{
    CoefficientPartition p(c.nu, c.kappa);
    for (const auto& r : c.coefficients)
        p.add_region(r.lower, r.upper, r.nu, r.kappa);
    return p;
}

double max_kappa(const StudyConfig& c)
{
    double m = c.kappa;
    for (const auto& r : c.coefficients)
        m = std::max(m, r.kappa);
    return m;
}

// Localized right-hand side of the Nitsche error estimate.
double maxwell_bound(const AnalyticField& A, const SimplicialMesh& mesh, const CoefficientPartition& coeffs,
                     const VectorFn& f, const StudyConfig& c)
{
    if (!(c.r < 1.0))
        return kNaN;
    const double ell = mesh.domain_diameter();
    const int nc = mesh.num_cells();
    std::vector<double> cell(nc, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (int k = 0; k < nc; ++k) {
        const double h = mesh.cell_diameter(k);
        const double a = fractional_seminorm_cell(mesh, A.value, c.r, k, c.pair_level);
        const double ra = fractional_seminorm_cell(mesh, A.curl, c.r, k, c.pair_level);
        const double rl2 = l2_norm_cell(mesh, A.curl, k, c.cell_degree);
        cell[k] = std::pow(h, 2 * c.r) * (a * a / (ell * ell) + std::pow(ell, -2 * c.r) * rl2 * rl2 + ra * ra);
    }
    double s = 0.0;
    for (double v : cell)
        s += v;
    const VectorFn residual = [&f, &A, &coeffs](const Vec3& x) {
        return Vec3(f(x) - coeffs.lookup(x).first * A.value(x));
    };
    const double rexp = residual_exponent(mesh.dim(), c.q);
    for (int fi = 0; fi < mesh.num_facets(); ++fi) {
        if (!mesh.facet_on_boundary(fi))
            continue;
        const int k = mesh.facet_cells(fi)[0];
        const double lq = lq_norm_cell(mesh, residual, c.q, k, c.cell_degree);
        s += std::pow(mesh.cell_diameter(k), rexp) * lq * lq;
    }
    return std::sqrt(max_kappa(c) * s);
}

void write_level_vtk(const std::string& dir, int level, const FEFunction& u)
{
    std::ofstream os(std::filesystem::path(dir) / ("level_" + std::to_string(level) + ".vtk"));
    if (!os)
        throw Error("cannot write VTK output into '" + dir + "'");
    write_solution_vtk(os, u, u.space == Family::RT0 ? "u_h" : "A_h");
}

} // namespace

const char* to_string(Operator op)
{
    switch (op) {
    case Operator::Canonical: return "canonical";
    case Operator::Quasi: return "quasi";
    case Operator::QuasiZeroBoundary: return "quasi_zero_boundary";
    case Operator::BestL2: return "best_l2";
    case Operator::MaxwellStrong: return "maxwell_strong";
    case Operator::MaxwellNitsche: return "maxwell_nitsche";
    }
    return "?";
}

Operator operator_from_string(const std::string& s)
{
    for (Operator op : {Operator::Canonical, Operator::Quasi, Operator::QuasiZeroBoundary, Operator::BestL2,
                        Operator::MaxwellStrong, Operator::MaxwellNitsche})
        if (s == to_string(op))
            return op;
    throw InvalidArgument("unknown operator '" + s + "'");
}

void StudyConfig::validate() const
{
    const auto names = domain_names();
    if (std::find(names.begin(), names.end(), domain) == names.end())
        throw InvalidArgument("config: unknown domain '" + domain + "'");
    if (n0 < 1)
        throw InvalidArgument("config: n0 must be >= 1");
    if (levels < 2)
        throw InvalidArgument("config: at least 2 levels required");
    if (!(r > 0.0 && r <= 1.0))
        throw InvalidArgument("config: r must lie in (0,1]");
    const int dim = (domain == "square" || domain == "lshape") ? 2 : 3;
    if (!q_admissible(dim, q))
        throw InvalidArgument("config: q must lie in (2d/(2+d), 2]");
    if (element == Family::P1)
        throw InvalidArgument("config: element must be nedelec or rt");
    if (is_maxwell(op) && element != Family::Nedelec0)
        throw InvalidArgument("config: Maxwell operators use the nedelec element");
    if (op == Operator::MaxwellNitsche && !(eta0 > 0.0))
        throw InvalidArgument("config: eta0 must be positive");
    if (cell_degree < 1 || cell_degree > 10)
        throw InvalidArgument("config: quadrature.cell_degree must lie in [1,10]");
    if (pair_level < 0)
        throw InvalidArgument("config: quadrature.pair_level must be >= 0");
    get_field(field, field_params);
}

StudyConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw InvalidArgument("config: top level must be an object");
    reject_unknown(j,
                   {"domain", "n0", "levels", "element", "operator", "field", "r", "q", "eta0", "quadrature",
                    "solver_tol", "threads", "coefficients", "vtk", "check"},
                   "config");
    StudyConfig c;
    try {
        c.domain = j.value("domain", c.domain);
        c.n0 = j.value("n0", c.n0);
        c.levels = j.value("levels", c.levels);
        c.element = family_from_string(j.value("element", std::string("nedelec")));
        c.op = operator_from_string(j.value("operator", std::string(to_string(c.op))));
        if (j.contains("field")) {
            const json& f = j["field"];
            if (f.is_string()) {
                c.field = f.get<std::string>();
            } else {
                reject_unknown(f, {"name", "params"}, "field");
                c.field = f.at("name").get<std::string>();
                if (f.contains("params"))
                    for (auto it = f["params"].begin(); it != f["params"].end(); ++it)
                        c.field_params[it.key()] = it.value().get<double>();
            }
        }
        c.r = j.value("r", c.r);
        c.q = j.value("q", c.q);
        c.eta0 = j.value("eta0", c.eta0);
        if (j.contains("quadrature")) {
            const json& qd = j["quadrature"];
            reject_unknown(qd, {"cell_degree", "pair_level"}, "quadrature");
            c.cell_degree = qd.value("cell_degree", c.cell_degree);
            c.pair_level = qd.value("pair_level", c.pair_level);
        }
        c.solver_tol = j.value("solver_tol", c.solver_tol);
        c.threads = j.value("threads", c.threads);
        if (j.contains("coefficients")) {
            const json& co = j["coefficients"];
            reject_unknown(co, {"nu", "kappa", "regions"}, "coefficients");
            c.nu = co.value("nu", c.nu);
            c.kappa = co.value("kappa", c.kappa);
            if (co.contains("regions"))
                for (const auto& r : co["regions"]) {
                    reject_unknown(r, {"lower", "upper", "nu", "kappa"}, "coefficients.regions");
                    CoefficientRegion reg;
                    reg.lower = vec_from_json(r.at("lower"));
                    reg.upper = vec_from_json(r.at("upper"));
                    reg.nu = r.value("nu", 1.0);
                    reg.kappa = r.value("kappa", 1.0);
                    c.coefficients.push_back(reg);
                }
        }
        c.write_vtk = j.value("vtk", false);
        if (j.contains("check")) {
            const json& ch = j["check"];
            reject_unknown(ch, {"eoc_min", "eoc_max", "effectivity_variation", "cell_effectivity_variation"},
                           "check");
            if (ch.contains("eoc_min"))
                c.check.eoc_min = ch["eoc_min"].get<double>();
            if (ch.contains("eoc_max"))
                c.check.eoc_max = ch["eoc_max"].get<double>();
            if (ch.contains("effectivity_variation"))
                c.check.effectivity_variation = ch["effectivity_variation"].get<double>();
            if (ch.contains("cell_effectivity_variation"))
                c.check.cell_effectivity_variation = ch["cell_effectivity_variation"].get<double>();
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

StudyConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw InvalidArgument("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

double StudyReport::primary_error(const LevelResult& l) const
{
    return is_maxwell(config.op) ? l.err_hcurl : l.err_l2;
}

std::optional<double> compute_eoc(std::span<const double> errors, std::span<const double> hs)
{
    if (errors.size() != hs.size() || errors.size() < 2)
        throw InvalidArgument("compute_eoc: need at least two matching entries");
    const std::size_t n = std::min<std::size_t>(3, errors.size());
    const std::size_t first = errors.size() - n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = first; i < errors.size(); ++i) {
        if (!(hs[i] > 0.0))
            throw InvalidArgument("compute_eoc: mesh sizes must be positive");
        if (errors[i] == 0.0)
            return std::nullopt;
        if (!(errors[i] > 0.0))
            throw InvalidArgument("compute_eoc: errors must be nonnegative");
        const double x = std::log(hs[i]), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(n);
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

StudyReport run_study(const StudyConfig& config, const std::string& vtk_dir)
{
    config.validate();
    if (config.threads > 0)
        set_num_threads(config.threads);
    StudyReport report;
    report.config = config;
    const AnalyticField field = get_field(config.field, config.field_params);
    const CoefficientPartition coeffs = make_coefficients(config);
    NormOptions nopt;
    nopt.cell_degree = config.cell_degree;
    nopt.pair_level = config.pair_level;

    SimplicialMesh mesh = build_domain_mesh(config.domain, config.n0);
    if (field.dim != mesh.dim())
        throw InvalidArgument("field '" + field.name + "' does not match the dimension of domain '" + config.domain + "'");
    for (int level = 0; level < config.levels; ++level) {
        if (level > 0)
            mesh = uniform_refine(mesh);
        const auto t0 = std::chrono::steady_clock::now();
        LevelResult res;
        res.level = level;
        res.h_max = mesh.h_max();
        res.num_cells = mesh.num_cells();
        const Family space = config.element;
        try {
            FEFunction u;
            if (is_maxwell(config.op)) {
                const VectorFn f = manufactured_source(field, coeffs);
                const CurlCurlSystem sys = config.op == Operator::MaxwellStrong
                                               ? assemble_strong(mesh, coeffs, f)
                                               : assemble_nitsche(mesh, coeffs, f, config.eta0);
                SolveResult sol = solve(sys, config.solver_tol);
                u = std::move(sol.solution);
                res.ndof = sys.size();
                res.cg_iterations = sol.iterations;
                const MaxwellErrors err = maxwell_errors(u, field, coeffs, f, config.q, config.cell_degree);
                res.err_l2 = err.l2;
                res.err_hcurl = err.hcurl;
                res.vsharp = err.vsharp;
                res.bound_rhs = maxwell_bound(field, mesh, coeffs, f, config);
                res.effectivity_global = res.vsharp / res.bound_rhs;
                res.effectivity_cell_max = kNaN;
            } else {
                InterpolationOptions iopt;
                iopt.cell_degree = config.cell_degree;
                switch (config.op) {
                case Operator::Canonical: u = canonical_interpolate(mesh, space, field); break;
                case Operator::Quasi: u = quasi_interpolate(mesh, space, field, false, iopt); break;
                case Operator::QuasiZeroBoundary: u = quasi_interpolate(mesh, space, field, true, iopt); break;
                default: {
                    BestApproximationOptions bopt;
                    bopt.cell_degree = config.cell_degree;
                    bopt.tol = config.solver_tol;
                    u = best_approximation_l2(mesh, space, field, false, bopt);
                }
                }
                res.ndof = static_cast<int>(u.coeffs.size());
                const auto terms = cell_bound_terms(field, mesh, space, config.r, config.q, nopt);
                const CellErrorTable table = cell_error_table(field, u, terms, config.cell_degree);
                double l2 = 0.0;
                for (double e : table.lhs)
                    l2 += e * e;
                res.err_l2 = std::sqrt(l2);
                const bool has_derivative = space == Family::Nedelec0 ? field.has_curl() : field.has_div();
                if (has_derivative) {
                    double d2 = 0.0;
                    for (int k = 0; k < mesh.num_cells(); ++k)
                        d2 += std::pow(derivative_error_cell(field, u, k, config.cell_degree), 2);
                    res.err_hcurl = hcurl_norm(res.err_l2, std::sqrt(d2), mesh.domain_diameter());
                } else {
                    res.err_hcurl = kNaN;
                }
                res.bound_rhs = global_bound_rhs(terms);
                res.effectivity_global = res.bound_rhs > 0 ? res.err_l2 / res.bound_rhs : kNaN;
                res.effectivity_cell_max = table.max_effectivity();
            }
            if (config.write_vtk && !vtk_dir.empty())
                write_level_vtk(vtk_dir, level, u);
        } catch (const SolverError& e) {
            throw SolverError("level " + std::to_string(level) + ": " + e.what(), e.residual(), e.iterations(),
                              e.indefinite());
        } catch (const SingularTrace& e) {
            throw SingularTrace("level " + std::to_string(level) + ": " + e.what());
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.levels.push_back(res);
    }

    std::vector<double> hs, e_l2, e_hc, e_p;
    for (const auto& l : report.levels) {
        hs.push_back(l.h_max);
        e_l2.push_back(l.err_l2);
        e_hc.push_back(l.err_hcurl);
        e_p.push_back(report.primary_error(l));
    }
    report.eoc = compute_eoc(e_p, hs);
    report.eoc_l2 = compute_eoc(e_l2, hs);
    if (std::all_of(e_hc.begin(), e_hc.end(), [](double v) { return std::isfinite(v); }))
        report.eoc_hcurl = compute_eoc(e_hc, hs);
    return report;
}

bool evaluate_checks(StudyReport& report)
{
    const StudyCheck& ch = report.config.check;
    auto& fail = report.check_failures;
    fail.clear();
    if (ch.eoc_min || ch.eoc_max) {
        if (!report.eoc) {
            fail.push_back("eoc: error is exactly zero");
        } else {
            if (ch.eoc_min && *report.eoc < *ch.eoc_min)
                fail.push_back("eoc " + fmt(*report.eoc) + " below " + fmt(*ch.eoc_min));
            if (ch.eoc_max && *report.eoc > *ch.eoc_max)
                fail.push_back("eoc " + fmt(*report.eoc) + " above " + fmt(*ch.eoc_max));
        }
    }
    auto variation = [&](const std::optional<double>& limit, double LevelResult::*member, const char* label) {
        if (!limit)
            return;
        for (std::size_t i = 1; i < report.levels.size(); ++i) {
            const double a = report.levels[i - 1].*member, b = report.levels[i].*member;
            const double v = std::abs(b / a - 1.0);
            if (!(v < *limit))
                fail.push_back(std::string(label) + " varies by " + fmt(v) + " between levels " + std::to_string(i - 1)
                               + " and " + std::to_string(i));
        }
    };
    variation(ch.effectivity_variation, &LevelResult::effectivity_global, "global effectivity");
    variation(ch.cell_effectivity_variation, &LevelResult::effectivity_cell_max, "max cell effectivity");
    return fail.empty();
}

std::string report_csv(const StudyReport& report)
{
    std::ostringstream os;
    os << "level,h_max,ndof,err_l2,err_hcurl,bound_rhs,effectivity_global,effectivity_cell_max,eoc\n";
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const auto& l = report.levels[i];
        os << l.level << ',' << fmt(l.h_max) << ',' << l.ndof << ',' << fmt(l.err_l2) << ',' << fmt(l.err_hcurl)
           << ',' << fmt(l.bound_rhs) << ',' << fmt(l.effectivity_global) << ',' << fmt(l.effectivity_cell_max)
           << ',';
        if (i > 0) {
            const auto& p = report.levels[i - 1];
            const double ep = report.primary_error(p), el = report.primary_error(l);
            if (ep > 0 && el > 0)
                os << fmt(std::log(el / ep) / std::log(l.h_max / p.h_max));
            else
                os << "exact";
        }
        os << '\n';
    }
    return os.str();
}

std::string report_json(const StudyReport& report)
{
    const StudyConfig& c = report.config;
    json cfg = {{"domain", c.domain},
                {"n0", c.n0},
                {"levels", c.levels},
                {"element", to_string(c.element)},
                {"operator", to_string(c.op)},
                {"field", {{"name", c.field}, {"params", c.field_params}}},
                {"r", c.r},
                {"q", c.q},
                {"eta0", c.eta0},
                {"quadrature", {{"cell_degree", c.cell_degree}, {"pair_level", c.pair_level}}},
                {"solver_tol", c.solver_tol}};
    json levels = json::array();
    for (const auto& l : report.levels)
        levels.push_back({{"level", l.level},
                          {"h_max", l.h_max},
                          {"cells", l.num_cells},
                          {"ndof", l.ndof},
                          {"err_l2", number_or_null(l.err_l2)},
                          {"err_hcurl", number_or_null(l.err_hcurl)},
                          {"bound_rhs", number_or_null(l.bound_rhs)},
                          {"effectivity_global", number_or_null(l.effectivity_global)},
                          {"effectivity_cell_max", number_or_null(l.effectivity_cell_max)},
                          {"vsharp", number_or_null(l.vsharp)},
                          {"cg_iterations", l.cg_iterations},
                          {"seconds", l.seconds}});
    json out = {{"config", cfg},
                {"levels", levels},
                {"eoc", optional_json(report.eoc)},
                {"eoc_l2", optional_json(report.eoc_l2)},
                {"eoc_hcurl", report.eoc_hcurl ? json(*report.eoc_hcurl) : json(nullptr)},
                {"check_failures", report.check_failures}};
    return out.dump(2) + "\n";
}

void write_report(const StudyReport& report, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    const auto base = std::filesystem::path(dir);
    std::ofstream csv(base / "report.csv", std::ios::binary);
    std::ofstream js(base / "report.json", std::ios::binary);
    if (!csv || !js)
        throw Error("cannot write report into '" + dir + "'");
    csv << report_csv(report);
    js << report_json(report);
}

} // namespace lowreg
