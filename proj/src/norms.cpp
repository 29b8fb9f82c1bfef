#include "lowreg/norms.hpp"

#include <algorithm>
#include <cmath>

namespace lowreg {

namespace {

// Cells whose patch bound is this small relative to the largest one carry
// roundoff-level data on both sides; their ratio is not reported.
constexpr double kNegligibleBound = 1e-8;

void check_r(double r)
{
    if (!(r > 0.0 && r < 1.0))
        throw InvalidArgument("fractional seminorm: r must lie in (0,1)");
}

int resolve_level(int dim, int level)
{
    return level > 0 ? level : default_pair_level(dim);
}

Adjacency mesh_adjacency(const SimplicialMesh& mesh, int a, int b)
{
    if (a == b)
        return Adjacency::Identical;
    const auto& ca = mesh.cell(a);
    const auto& cb = mesh.cell(b);
    int shared = 0;
    for (int i = 0; i <= mesh.dim(); ++i)
        for (int j = 0; j <= mesh.dim(); ++j)
            shared += ca[i] == cb[j];
    switch (shared) {
    case 0: return Adjacency::Disjoint;
    case 1: return Adjacency::SharedVertex;
    case 2: return mesh.dim() == 2 ? Adjacency::SharedFace : Adjacency::SharedEdge;
    default: return Adjacency::SharedFace;
    }
}

double pair_integral(const Simplex& a, const Simplex& b, Adjacency adj, const VectorFn& g, double r, int level)
{
    const double s = a.dim + 2 * r;
    const PairRule rule = pair_rule(a, b, adj, level, s);
    std::vector<Vec3> gx(rule.x_points.size()), gy(rule.y_points.size());
    for (std::size_t i = 0; i < gx.size(); ++i)
        gx[i] = g(rule.x_points[i]);
    for (std::size_t i = 0; i < gy.size(); ++i)
        gy[i] = g(rule.y_points[i]);
    double sum = 0.0;
    for (const auto& n : rule.nodes) {
        const double dist = (rule.x_points[n.ix] - rule.y_points[n.iy]).norm();
        if (dist == 0.0)
            continue;
        sum += n.w * (gx[n.ix] - gy[n.iy]).squaredNorm() / std::pow(dist, s);
    }
    return sum;
}

// Sum of the pair integrals over all ordered pairs of `cells`.
double region_double_integral(const SimplicialMesh& mesh, std::span<const int> cells, const VectorFn& g, double r,
                              int level)
{
    const int m = static_cast<int>(cells.size());
    std::vector<double> row(m, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < m; ++i) {
        const Simplex a = mesh.cell_simplex(cells[i]);
        double s = 0.0;
        for (int j = i; j < m; ++j) {
            const Simplex b = mesh.cell_simplex(cells[j]);
            const double v = pair_integral(a, b, mesh_adjacency(mesh, cells[i], cells[j]), g, r, level);
            s += i == j ? v : 2.0 * v;
        }
        row[i] = s;
    }
    double total = 0.0;
    for (double v : row)
        total += v;
    return total;
}

template <class Eval>
double cell_error_sq(const SimplicialMesh& mesh, const AnalyticField& field, const Eval& eval, int k, int degree,
                     bool derivative, Family space)
{
    const QuadratureRule& rule = simplex_rule(mesh.dim(), degree);
    const auto& map = mesh.cell_map(k);
    const double jac = std::abs(map.det);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3 x = map.to_physical(rule.points[q]);
        const MappedValue uh = eval(k, rule.points[q]);
        Vec3 d;
        if (!derivative) {
            d = field.value(x) - uh.value;
        } else if (space == Family::Nedelec0) {
            d = field.curl(x) - uh.deriv;
        } else {
            d = Vec3(field.div(x) - uh.deriv.x(), 0, 0);
        }
        s += rule.weights[q] * jac * d.squaredNorm();
    }
    return s;
}

template <class Eval>
double jump_norm(const SimplicialMesh& mesh, Family space, const Eval& eval, int f, int degree)
{
    const auto& fc = mesh.facet_cells(f);
    const auto fv = mesh.facet(f);
    const int dim = mesh.dim();
    const Vec3 n = mesh.facet_normal(f);
    const double measure = mesh.facet_measure(f);
    const QuadratureRule& rule = simplex_rule(dim - 1, degree);
    const double ref = reference_measure(dim - 1);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        Vec3 x = mesh.vertex(fv[0]);
        for (int a = 1; a < dim; ++a)
            x += rule.points[q][a - 1] * (mesh.vertex(fv[a]) - mesh.vertex(fv[0]));
        Vec3 jump = Vec3::Zero();
        for (int side = 0; side < 2; ++side) {
            const int k = fc[side];
            if (k < 0)
                continue;
            const Vec3 xhat = mesh.cell_map(k).to_reference(x);
            const Vec3 v = eval(k, xhat).value;
            jump += side == 0 ? v : Vec3(-v);
        }
        const Vec3 trace = space == Family::RT0 ? Vec3(jump.dot(n), 0, 0) : jump.cross(n);
        s += rule.weights[q] / ref * measure * trace.squaredNorm();
    }
    return std::sqrt(s);
}

} // namespace

bool q_admissible(int dim, double q)
{
    return q > 2.0 * dim / (2.0 + dim) && q <= 2.0;
}

void check_q(int dim, double q)
{
    if (!q_admissible(dim, q))
        throw InvalidArgument("q must lie in (2d/(2+d), 2]");
}

double lq_term_exponent(int dim, double q)
{
    return 1.0 + dim * (0.5 - 1.0 / q);
}

double residual_exponent(int dim, double q)
{
    return 2.0 * dim * ((dim + 2.0) / (2.0 * dim) - 1.0 / q);
}

double l2_norm_cell(const SimplicialMesh& mesh, const VectorFn& g, int k, int degree)
{
    const QuadratureRule& rule = simplex_rule(mesh.dim(), degree);
    const auto& map = mesh.cell_map(k);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * g(map.to_physical(rule.points[q])).squaredNorm();
    return std::sqrt(s * std::abs(map.det));
}

double lq_norm_cell(const SimplicialMesh& mesh, const VectorFn& g, double q, int k, int degree)
{
    check_q(mesh.dim(), q);
    const QuadratureRule& rule = simplex_rule(mesh.dim(), degree);
    const auto& map = mesh.cell_map(k);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        s += rule.weights[i] * std::pow(g(map.to_physical(rule.points[i])).norm(), q);
    return std::pow(s * std::abs(map.det), 1.0 / q);
}

double l2_error_cell(const AnalyticField& field, const FEFunction& u, int k, int degree)
{
    return std::sqrt(cell_error_sq(*u.mesh, field, [&u](int c, const Vec3& x) { return u.eval(c, x); }, k, degree,
                                   false, u.space));
}

double l2_error_cell(const AnalyticField& field, const BrokenFEFunction& u, int k, int degree)
{
    return std::sqrt(cell_error_sq(*u.mesh, field, [&u](int c, const Vec3& x) { return u.eval(c, x); }, k, degree,
                                   false, u.space));
}

double derivative_error_cell(const AnalyticField& field, const FEFunction& u, int k, int degree)
{
    if (u.space == Family::Nedelec0 ? !field.has_curl() : !field.has_div())
        throw InvalidArgument("field '" + field.name + "' lacks the derivative evaluator");
    return std::sqrt(cell_error_sq(*u.mesh, field, [&u](int c, const Vec3& x) { return u.eval(c, x); }, k, degree,
                                   true, u.space));
}

double fractional_seminorm(std::span<const Simplex> region, const VectorFn& g, double r, int level)
{
    check_r(r);
    if (region.empty())
        return 0.0;
    const int lvl = resolve_level(region[0].dim, level);
    double total = 0.0;
    for (std::size_t i = 0; i < region.size(); ++i)
        for (std::size_t j = i; j < region.size(); ++j) {
            const Adjacency adj = i == j ? Adjacency::Identical : classify_adjacency(region[i], region[j]);
            const double v = pair_integral(region[i], region[j], adj, g, r, lvl);
            total += i == j ? v : 2.0 * v;
        }
    return std::sqrt(std::max(total, 0.0));
}

double fractional_seminorm_cell(const SimplicialMesh& mesh, const VectorFn& g, double r, int k, int level)
{
    check_r(r);
    const Simplex s = mesh.cell_simplex(k);
    return std::sqrt(
        std::max(pair_integral(s, s, Adjacency::Identical, g, r, resolve_level(mesh.dim(), level)), 0.0));
}

double fractional_seminorm(const SimplicialMesh& mesh, const VectorFn& g, double r, const Patch& patch, int level)
{
    check_r(r);
    return std::sqrt(std::max(
        region_double_integral(mesh, patch.members, g, r, resolve_level(mesh.dim(), level)), 0.0));
}

double h1_seminorm_cell(const SimplicialMesh& mesh, const MatrixFn& jacobian, int k, int degree)
{
    const QuadratureRule& rule = simplex_rule(mesh.dim(), degree);
    const auto& map = mesh.cell_map(k);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * jacobian(map.to_physical(rule.points[q])).squaredNorm();
    return std::sqrt(s * std::abs(map.det));
}

double regularity_seminorm_cell(const AnalyticField& field, const SimplicialMesh& mesh, double r, int k,
                                const NormOptions& opt)
{
    if (r == 1.0) {
        if (!field.jacobian)
            throw InvalidArgument("field '" + field.name + "' has no Jacobian; r = 1 unavailable");
        return h1_seminorm_cell(mesh, field.jacobian, k, opt.cell_degree);
    }
    return fractional_seminorm_cell(mesh, field.value, r, k, opt.pair_level);
}

double jump_norm_face(const FEFunction& u, int f, int degree)
{
    return jump_norm(*u.mesh, u.space, [&u](int k, const Vec3& x) { return u.eval(k, x); }, f, degree);
}

double jump_norm_face(const BrokenFEFunction& u, int f, int degree)
{
    return jump_norm(*u.mesh, u.space, [&u](int k, const Vec3& x) { return u.eval(k, x); }, f, degree);
}

std::vector<CellBoundTerms> cell_bound_terms(const AnalyticField& field, const SimplicialMesh& mesh, Family space,
                                             double r, double q, const NormOptions& opt)
{
    if (!(r > 0.0 && r <= 1.0))
        throw InvalidArgument("bound: r must lie in (0,1]");
    check_q(mesh.dim(), q);
    if (field.dim != mesh.dim())
        throw InvalidArgument("field and mesh dimensions differ");
    VectorFn derivative;
    if (space == Family::Nedelec0) {
        if (!field.has_curl())
            throw InvalidArgument("field '" + field.name + "' has no curl evaluator");
        derivative = field.curl;
    } else if (space == Family::RT0) {
        if (!field.has_div())
            throw InvalidArgument("field '" + field.name + "' has no divergence evaluator");
        derivative = [d = field.div](const Vec3& x) { return Vec3(d(x), 0, 0); };
    } else {
        throw InvalidArgument("bound: Nedelec0 or RT0 space expected");
    }
    const bool zero_derivative = space == Family::Nedelec0 ? field.curl_free : field.div_free;
    const double e2 = lq_term_exponent(mesh.dim(), q);
    std::vector<CellBoundTerms> terms(mesh.num_cells());
#pragma omp parallel for schedule(dynamic, 16)
    for (int k = 0; k < mesh.num_cells(); ++k) {
        CellBoundTerms& t = terms[k];
        t.h = mesh.cell_diameter(k);
        t.seminorm = regularity_seminorm_cell(field, mesh, r, k, opt);
        t.derivative = zero_derivative ? 0.0 : lq_norm_cell(mesh, derivative, q, k, opt.cell_degree);
        t.t1 = std::pow(t.h, r) * t.seminorm;
        t.t2 = std::pow(t.h, e2) * t.derivative;
    }
    return terms;
}

double patch_bound(const SimplicialMesh& mesh, std::span<const CellBoundTerms> terms, int k, Family space)
{
    const Patch p = space == Family::RT0 ? face_patch(mesh, k) : edge_patch(mesh, k);
    double s = 0.0;
    for (int c : p.members)
        s += terms[c].t1 + terms[c].t2;
    return s;
}

double bound_rhs_nedelec(const AnalyticField& field, const SimplicialMesh& mesh, int k, double r, double q,
                         const NormOptions& opt)
{
    const auto terms = cell_bound_terms(field, mesh, Family::Nedelec0, r, q, opt);
    return patch_bound(mesh, terms, k, Family::Nedelec0);
}

double bound_rhs_rt(const AnalyticField& field, const SimplicialMesh& mesh, int k, double r, double q,
                    const NormOptions& opt)
{
    const auto terms = cell_bound_terms(field, mesh, Family::RT0, r, q, opt);
    return patch_bound(mesh, terms, k, Family::RT0);
}

double global_bound_rhs(std::span<const CellBoundTerms> terms)
{
    double s = 0.0;
    for (const auto& t : terms)
        s += t.t1 * t.t1 + t.t2 * t.t2;
    return std::sqrt(s);
}

double global_bound_rhs(const AnalyticField& field, const SimplicialMesh& mesh, double r, double q, Family space,
                        const NormOptions& opt)
{
    const auto terms = cell_bound_terms(field, mesh, space, r, q, opt);
    return global_bound_rhs(terms);
}

double hcurl_norm(double l2, double rot_l2, double length_scale)
{
    return std::sqrt(l2 * l2 + length_scale * length_scale * rot_l2 * rot_l2);
}

double hcurl_norm(const AnalyticField& field, const FEFunction& u, int degree)
{
    double l2 = 0.0, rot = 0.0;
    for (int k = 0; k < u.mesh->num_cells(); ++k) {
        l2 += std::pow(l2_error_cell(field, u, k, degree), 2);
        rot += std::pow(derivative_error_cell(field, u, k, degree), 2);
    }
    return hcurl_norm(std::sqrt(l2), std::sqrt(rot), u.mesh->domain_diameter());
}

double CellErrorTable::max_effectivity() const
{
    double m = 0.0;
    for (double e : effectivity)
        if (std::isfinite(e))
            m = std::max(m, e);
    return m;
}

CellErrorTable cell_error_table(const AnalyticField& field, const FEFunction& u,
                                std::span<const CellBoundTerms> terms, int degree)
{
    const SimplicialMesh& mesh = *u.mesh;
    const int n = mesh.num_cells();
    CellErrorTable t;
    t.lhs.resize(n);
    t.rhs.resize(n);
    t.effectivity.resize(n);
    t.h.resize(n);
    t.patch.resize(n);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
        t.lhs[k] = l2_error_cell(field, u, k, degree);
        const Patch p = u.space == Family::RT0 ? face_patch(mesh, k) : edge_patch(mesh, k);
        double s = 0.0;
        for (int c : p.members)
            s += terms[c].t1 + terms[c].t2;
        t.rhs[k] = s;
        t.h[k] = mesh.cell_diameter(k);
        t.patch[k] = p.members;
    }
    const double floor = kNegligibleBound * *std::max_element(t.rhs.begin(), t.rhs.end());
    for (int k = 0; k < n; ++k)
        t.effectivity[k] = t.rhs[k] > floor ? t.lhs[k] / t.rhs[k] : std::numeric_limits<double>::quiet_NaN();
    return t;
}

} // namespace lowreg
