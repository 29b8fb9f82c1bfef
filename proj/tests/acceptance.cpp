// Acceptance run: one PASS/FAIL line per criterion. Arguments select a
// subset by number, e.g. `acceptance 4 7`.
#include "lowreg/interpolation.hpp"
#include "lowreg/maxwell.hpp"
#include "lowreg/norms.hpp"
#include "lowreg/study.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace lowreg;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

FEFunction random_function(const SimplicialMesh& m, Family f, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1, 1);
    FEFunction v(m, f);
    for (int i = 0; i < v.coeffs.size(); ++i)
        v.coeffs[i] = u(rng);
    return v;
}

// Barycentric gradients of a tetrahedron.
std::array<Vec3, 4> bary_gradients(const std::array<Vec3, 4>& P, double& vol)
{
    Mat3 E;
    for (int c = 0; c < 3; ++c)
        E.col(c) = P[c + 1] - P[0];
    vol = std::abs(E.determinant()) / 6.0;
    const Mat3 G = E.inverse().transpose();
    return {Vec3(-(G.col(0) + G.col(1) + G.col(2))), G.col(0), G.col(1), G.col(2)};
}

Outcome conformity()
{
    Outcome o;
    double worst_jump = 0.0, worst_bc = 0.0;
    const std::vector<std::pair<SimplicialMesh, std::string>> bases = {{build_unit_cube_mesh(2), "smooth_trig"},
                                                                       {build_lprism_mesh(1), "grad_power_line"}};
    for (const auto& [base, field_name] : bases) {
        const AnalyticField field = get_field(field_name);
        for (const SimplicialMesh& m : {base, uniform_refine(base)})
            for (Family f : {Family::Nedelec0, Family::RT0})
                for (bool zero : {false, true}) {
                    const FEFunction u = quasi_interpolate(m, f, field, zero);
                    for (int face = 0; face < m.num_faces(); ++face)
                        if (!m.facet_on_boundary(face))
                            worst_jump = std::max(worst_jump, jump_norm_face(u, face));
                    if (zero)
                        for (int g = 0; g < u.coeffs.size(); ++g)
                            if (dof_on_boundary(m, f, g))
                                worst_bc = std::max(worst_bc, std::abs(u.coeffs[g]));
                }
    }
    o.require(worst_jump <= 1e-11, "interior jump " + num(worst_jump));
    o.require(worst_bc == 0.0, "boundary dof " + num(worst_bc));
    o.note("max interior jump " + num(worst_jump));
    return o;
}

Outcome projection_rotation()
{
    Outcome o;
    std::mt19937 rng(2024);
    const SimplicialMesh cube = build_unit_cube_mesh(2);
    const SimplicialMesh lshape = build_lshape_mesh(3);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const SimplicialMesh& m = t % 2 ? cube : lshape;
        const Family f = (t / 2) % 2 ? Family::RT0 : Family::Nedelec0;
        const FEFunction v = random_function(m, f, rng);
        const FEFunction w = average_dofs(broken_project(v, f), false);
        worst = std::max(worst, (w.coeffs - v.coeffs).lpNorm<Eigen::Infinity>());
    }
    o.require(worst <= 1e-12, "projection invariance " + num(worst));

    double rot = 0.0;
    const SimplicialMesh m = build_lshape_mesh(4);
    for (const char* name : {"lshape_grad", "lshape_rot", "smooth_trig"}) {
        FieldParams p;
        if (std::string(name) == "smooth_trig")
            p["dim"] = 2;
        const AnalyticField v = get_field(name, p);
        const FEFunction rt = quasi_interpolate(m, Family::RT0, v, false);
        const FEFunction ned = quasi_interpolate(m, Family::Nedelec0, rotated_field(v), false);
        rot = std::max(rot, (rt.coeffs - ned.coeffs).lpNorm<Eigen::Infinity>());
    }
    o.require(rot <= 1e-12, "rotation " + num(rot));
    o.note("invariance " + num(worst) + ", rotation " + num(rot));
    return o;
}

Outcome oracles()
{
    Outcome o;
    // reference tetrahedron, Whitney functions from barycentric coordinates
    const std::array<Vec3, 4> P = {Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    const SimplicialMesh m(3, {P.begin(), P.end()}, {{0, 1, 2, 3}});
    double vol = 0.0;
    const auto g = bary_gradients(P, vol);
    const VectorFn v = [](const Vec3& x) { return Vec3(std::exp(x.y()), x.x() * x.z(), std::cos(x.x() - x.y())); };
    const QuadratureRule& rule = simplex_rule(3, 8);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(6, 6);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(6);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3& xi = rule.points[q];
        const std::array<double, 4> lam = {1 - xi.sum(), xi[0], xi[1], xi[2]};
        std::array<Vec3, 6> phi;
        for (int e = 0; e < 6; ++e) {
            const auto ij = SimplicialMesh::local_edge_vertices(3, e);
            phi[e] = lam[ij[0]] * g[ij[1]] - lam[ij[1]] * g[ij[0]];
        }
        for (int i = 0; i < 6; ++i) {
            b[i] += rule.weights[q] * 6 * vol * v(xi).dot(phi[i]);
            for (int j = 0; j < 6; ++j)
                M(i, j) += rule.weights[q] * 6 * vol * phi[i].dot(phi[j]);
        }
    }
    const Eigen::VectorXd dense = M.fullPivLu().solve(b);
    const BrokenFEFunction proj = broken_project(m, Family::Nedelec0, v, {8});
    const double dp = (proj.coeffs.row(0).transpose() - dense).lpNorm<Eigen::Infinity>();
    o.require(dp <= 1e-10, "broken projection " + num(dp));

    // element matrix: mass from int lambda_a lambda_b = |K|(1 + delta_ab)/20
    const double nu = 1.7, kappa = 0.6;
    Eigen::MatrixXd A(6, 6);
    for (int e = 0; e < 6; ++e)
        for (int f = 0; f < 6; ++f) {
            const auto [i, j] = SimplicialMesh::local_edge_vertices(3, e);
            const auto [k, l] = SimplicialMesh::local_edge_vertices(3, f);
            auto mm = [vol](int a, int c) { return vol * (a == c ? 2.0 : 1.0) / 20.0; };
            A(e, f) = nu * (mm(i, k) * g[j].dot(g[l]) - mm(i, l) * g[j].dot(g[k]) - mm(j, k) * g[i].dot(g[l]) +
                            mm(j, l) * g[i].dot(g[k])) +
                      kappa * 4.0 * vol * g[i].cross(g[j]).dot(g[k].cross(g[l]));
        }
    const double de = (Eigen::MatrixXd(reference_element_matrix(nu, kappa)) - A).cwiseAbs().maxCoeff();
    o.require(de <= 1e-10, "element matrix " + num(de));

    Simplex unit;
    unit.dim = 1;
    unit.v[1] = Vec3::UnitX();
    const double s = fractional_seminorm(std::vector<Simplex>{unit}, [](const Vec3& x) { return x; }, 0.5);
    o.require(std::abs(s - 1.0) <= 1e-3, "seminorm " + num(s));

    // flux of rot u_h through each face against the circulation of its edge DOFs
    const SimplicialMesh f = build_fichera_mesh(1);
    std::mt19937 rng(5);
    const FEFunction w = random_function(f, Family::Nedelec0, rng);
    std::map<std::pair<int, int>, int> id;
    for (int e = 0; e < f.num_edges(); ++e)
        id[{f.edge(e)[0], f.edge(e)[1]}] = e;
    double stokes = 0.0;
    for (int face = 0; face < f.num_faces(); ++face) {
        const auto fv = f.face(face);
        const int k = f.facet_cells(face)[0];
        const double flux = w.eval(k, Vec3(0.2, 0.3, 0.1)).deriv.dot(f.facet_normal(face)) * f.facet_measure(face);
        const double circ =
            w.coeffs[id[{fv[0], fv[1]}]] + w.coeffs[id[{fv[1], fv[2]}]] - w.coeffs[id[{fv[0], fv[2]}]];
        stokes = std::max(stokes, std::abs(flux - circ));
    }
    o.require(stokes <= 1e-6, "stokes " + num(stokes));
    o.note("projection " + num(dp) + ", matrix " + num(de) + ", seminorm " + num(s) + ", stokes " + num(stokes));
    return o;
}

StudyConfig smooth_config(Operator op)
{
    StudyConfig c;
    c.domain = "cube";
    c.n0 = 3;
    c.levels = 4;
    c.element = Family::Nedelec0;
    c.op = op;
    c.field = "smooth_trig";
    c.r = 1.0;
    c.q = 2.0;
    c.eta0 = 10.0;
    return c;
}

Outcome smooth_rates()
{
    Outcome o;
    const std::vector<std::pair<Operator, std::pair<double, double>>> runs = {
        {Operator::Canonical, {0.9, 1.1}},
        {Operator::Quasi, {0.9, 1.1}},
        {Operator::MaxwellStrong, {0.85, 1.1}},
        {Operator::MaxwellNitsche, {0.85, 1.1}}};
    for (const auto& [op, window] : runs) {
        const StudyReport r = run_study(smooth_config(op));
        const double eoc = r.eoc ? *r.eoc : std::nan("");
        o.require(eoc >= window.first && eoc <= window.second, std::string(to_string(op)) + " eoc " + num(eoc));
        o.require(r.levels.back().num_cells <= 100000, "too many cells");
        o.note(std::string(to_string(op)) + " " + num(eoc));
    }
    return o;
}

double max_variation(const StudyReport& r, double LevelResult::*member)
{
    double v = 0.0;
    for (std::size_t i = 1; i < r.levels.size(); ++i)
        v = std::max(v, std::abs(r.levels[i].*member / r.levels[i - 1].*member - 1.0));
    return v;
}

std::string series(const StudyReport& r, double LevelResult::*member)
{
    std::string s;
    for (const auto& l : r.levels)
        s += (s.empty() ? "" : " ") + num(l.*member);
    return s;
}

Outcome localization()
{
    Outcome o;
    StudyConfig c;
    c.domain = "lprism";
    c.n0 = 2;
    c.levels = 4;
    c.element = Family::Nedelec0;
    c.op = Operator::QuasiZeroBoundary;
    c.field = "grad_power_line";
    c.field_params = {{"lambda", 0.3}};
    c.r = 0.2;
    c.q = 2.0;
    const StudyReport r = run_study(c);
    const double eoc = r.eoc ? *r.eoc : std::nan("");
    const double vg = max_variation(r, &LevelResult::effectivity_global);
    const double vc = max_variation(r, &LevelResult::effectivity_cell_max);
    o.require(eoc >= 0.2 && eoc <= 0.4, "(a) nedelec eoc " + num(eoc));
    o.require(vg < 0.2, "(b) nedelec global effectivity " + series(r, &LevelResult::effectivity_global));
    o.require(vc < 0.2, "(c) nedelec cell effectivity " + series(r, &LevelResult::effectivity_cell_max));

    StudyConfig d;
    d.domain = "lshape";
    d.n0 = 8;
    d.levels = 4;
    d.element = Family::RT0;
    d.op = Operator::QuasiZeroBoundary;
    d.field = "lshape_rot";
    d.r = 0.5;
    d.q = 2.0;
    const StudyReport s = run_study(d);
    const double eoc_rt = s.eoc ? *s.eoc : std::nan("");
    const double vg_rt = max_variation(s, &LevelResult::effectivity_global);
    const double vc_rt = max_variation(s, &LevelResult::effectivity_cell_max);
    o.require(eoc_rt >= d.r, "rt eoc " + num(eoc_rt));
    o.require(vg_rt < 0.2, "rt global effectivity " + series(s, &LevelResult::effectivity_global));
    o.require(vc_rt < 0.2, "rt cell effectivity " + series(s, &LevelResult::effectivity_cell_max));
    o.note("nedelec eoc " + num(eoc) + ", variations " + num(vg) + "/" + num(vc) + "; rt eoc " + num(eoc_rt) +
           ", variations " + num(vg_rt) + "/" + num(vc_rt));
    return o;
}

double hcurl_distance(const FEFunction& a, const FEFunction& b)
{
    FEFunction d = a;
    d.coeffs -= b.coeffs;
    AnalyticField zero;
    zero.dim = 3;
    zero.value = [](const Vec3&) { return Vec3::Zero(); };
    zero.curl = zero.value;
    double l2 = 0.0, c2 = 0.0;
    for (int k = 0; k < a.mesh->num_cells(); ++k) {
        l2 += std::pow(l2_error_cell(zero, d, k), 2);
        c2 += std::pow(derivative_error_cell(zero, d, k), 2);
    }
    return hcurl_norm(std::sqrt(l2), std::sqrt(c2), a.mesh->domain_diameter());
}

Outcome nitsche()
{
    Outcome o;
    const CoefficientPartition coeffs(1.0, 1.0);
    const VectorFn f = manufactured_source(get_field("smooth_trig"), coeffs);
    for (int n = 1; n <= 3; ++n) {
        const SimplicialMesh m = build_unit_cube_mesh(n);
        const double lmin = min_eigenvalue(assemble_nitsche(m, coeffs, f, 10.0).matrix);
        o.require(lmin > 0.0, "n=" + std::to_string(n) + " min eigenvalue " + num(lmin));
        bool detected = false;
        try {
            solve(assemble_nitsche(m, coeffs, f, 0.01));
        } catch (const SolverError& e) {
            detected = e.indefinite();
        }
        o.require(detected, "n=" + std::to_string(n) + " eta0=0.01 not flagged");
    }
    const SimplicialMesh m = build_unit_cube_mesh(3);
    const FEFunction strong = solve(assemble_strong(m, coeffs, f), 1e-12).solution;
    std::string dist;
    double prev = std::numeric_limits<double>::infinity();
    for (double eta : {10.0, 100.0, 1000.0}) {
        const double d = hcurl_distance(solve(assemble_nitsche(m, coeffs, f, eta), 1e-12).solution, strong);
        o.require(d < prev, "not monotone at eta0=" + num(eta));
        prev = d;
        dist += (dist.empty() ? "" : " ") + num(d);
    }
    o.note("distance to strong " + dist);
    return o;
}

Outcome determinism()
{
    Outcome o;
    StudyConfig a = smooth_config(Operator::Canonical);
    StudyConfig b = a;
    a.threads = 1;
    b.threads = 3;
    const std::string ca = report_csv(run_study(a));
    const std::string cb = report_csv(run_study(b));
    set_num_threads(0);
    o.require(ca == cb, "report.csv differs between 1 and 3 threads");
    o.note(std::to_string(ca.size()) + " bytes identical");
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {{1, "conformity", 30, conformity},
                                        {2, "projection and rotation", 10, projection_rotation},
                                        {3, "oracle equivalence", 0, oracles},
                                        {4, "smooth rates", 600, smooth_rates},
                                        {5, "low-regularity localization", 1200, localization},
                                        {6, "nitsche robustness", 0, nitsche},
                                        {7, "determinism", 0, determinism}};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0)
            o.require(sec < c.limit_seconds, "runtime " + num(sec) + " s over " + num(c.limit_seconds) + " s");
        std::printf("criterion %d %-28s %s  (%.1f s) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", sec,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
