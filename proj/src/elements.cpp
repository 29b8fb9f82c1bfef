#include "lowreg/elements.hpp"

#include "lowreg/quadrature.hpp"

#include <cmath>

namespace lowreg {

namespace {

constexpr double kInsideTol = 1e-12;

std::array<double, 4> barycentric(int dim, const Vec3& x)
{
    std::array<double, 4> l{};
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        l[i + 1] = x[i];
        s += x[i];
    }
    l[0] = 1.0 - s;
    for (int i = 0; i <= dim; ++i)
        if (l[i] < -kInsideTol)
            throw InvalidArgument("reference point outside the reference cell");
    return l;
}

std::array<Vec3, 4> barycentric_gradients(int dim)
{
    std::array<Vec3, 4> g{};
    g[0] = dim == 3 ? Vec3(-1, -1, -1) : Vec3(-1, -1, 0);
    for (int i = 0; i < dim; ++i)
        g[i + 1] = Vec3::Unit(i);
    return g;
}

void check_dim(int dim)
{
    if (dim != 2 && dim != 3)
        throw InvalidArgument("element dimension must be 2 or 3");
}

} // namespace

const char* to_string(Family f)
{
    switch (f) {
    case Family::Nedelec0: return "nedelec";
    case Family::RT0: return "rt";
    case Family::P1: return "p1";
    }
    return "?";
}

Family family_from_string(const std::string& s)
{
    if (s == "nedelec" || s == "Nedelec0" || s == "nedelec0")
        return Family::Nedelec0;
    if (s == "rt" || s == "RT0" || s == "rt0")
        return Family::RT0;
    if (s == "p1" || s == "P1")
        return Family::P1;
    throw InvalidArgument("unknown element family '" + s + "'");
}

int local_dof_count(Family f, int dim)
{
    check_dim(dim);
    switch (f) {
    case Family::Nedelec0: return dim == 2 ? 3 : 6;
    case Family::RT0:
    case Family::P1: return dim + 1;
    }
    return 0;
}

BasisValues nedelec0_eval(int dim, const Vec3& xhat)
{
    check_dim(dim);
    const auto l = barycentric(dim, xhat);
    const auto g = barycentric_gradients(dim);
    BasisValues b;
    b.count = local_dof_count(Family::Nedelec0, dim);
    for (int e = 0; e < b.count; ++e) {
        const auto [i, j] = SimplicialMesh::local_edge_vertices(dim, e);
        b.value[e] = l[i] * g[j] - l[j] * g[i];
        b.deriv[e] = 2.0 * g[i].cross(g[j]);
    }
    return b;
}

BasisValues rt0_eval(int dim, const Vec3& xhat)
{
    check_dim(dim);
    barycentric(dim, xhat);
    const double measure = reference_measure(dim);
    BasisValues b;
    b.count = dim + 1;
    for (int i = 0; i <= dim; ++i) {
        const double sign = i % 2 == 0 ? 1.0 : -1.0;
        const Vec3 vertex = i == 0 ? Vec3::Zero().eval() : Vec3::Unit(i - 1).eval();
        b.value[i] = sign * (xhat - vertex) / (dim * measure);
        if (dim == 2)
            b.value[i].z() = 0.0;
        b.deriv[i] = Vec3(sign / measure, 0.0, 0.0);
    }
    return b;
}

BasisValues p1_eval(int dim, const Vec3& xhat)
{
    check_dim(dim);
    const auto l = barycentric(dim, xhat);
    const auto g = barycentric_gradients(dim);
    BasisValues b;
    b.count = dim + 1;
    for (int i = 0; i <= dim; ++i) {
        b.value[i] = Vec3(l[i], 0, 0);
        b.deriv[i] = g[i];
    }
    return b;
}

BasisValues reference_eval(Family f, int dim, const Vec3& xhat)
{
    switch (f) {
    case Family::Nedelec0: return nedelec0_eval(dim, xhat);
    case Family::RT0: return rt0_eval(dim, xhat);
    case Family::P1: return p1_eval(dim, xhat);
    }
    throw InvalidArgument("unknown element family");
}

MappedValue covariant_piola(const AffineCellMap& map, const Vec3& ref_value, const Vec3& ref_curl)
{
    if (map.det == 0.0)
        throw DegenerateCell("covariant_piola: singular map");
    return {map.inverse_transpose * ref_value, map.jacobian * ref_curl / map.det};
}

MappedValue contravariant_piola(const AffineCellMap& map, const Vec3& ref_value, double ref_div)
{
    if (map.det == 0.0)
        throw DegenerateCell("contravariant_piola: singular map");
    return {map.jacobian * ref_value / map.det, Vec3(ref_div / map.det, 0, 0)};
}

BasisValues physical_eval(const SimplicialMesh& mesh, Family f, int k, const Vec3& xhat)
{
    BasisValues b = reference_eval(f, mesh.dim(), xhat);
    const auto& map = mesh.cell_map(k);
    for (int i = 0; i < b.count; ++i) {
        MappedValue m;
        switch (f) {
        case Family::Nedelec0: m = covariant_piola(map, b.value[i], b.deriv[i]); break;
        case Family::RT0: m = contravariant_piola(map, b.value[i], b.deriv[i].x()); break;
        case Family::P1: m = {b.value[i], map.inverse_transpose * b.deriv[i]}; break;
        }
        b.value[i] = m.value;
        b.deriv[i] = m.deriv;
    }
    return b;
}

int num_global_dofs(const SimplicialMesh& mesh, Family f)
{
    switch (f) {
    case Family::Nedelec0: return mesh.num_edges();
    case Family::RT0: return mesh.num_facets();
    case Family::P1: return mesh.num_vertices();
    }
    return 0;
}

int global_dof(const SimplicialMesh& mesh, Family f, int k, int local)
{
    switch (f) {
    case Family::Nedelec0: return mesh.cell_edge(k, local);
    case Family::RT0: return mesh.cell_facet(k, local);
    case Family::P1: return mesh.cell(k)[local];
    }
    return -1;
}

bool dof_on_boundary(const SimplicialMesh& mesh, Family f, int dof)
{
    switch (f) {
    case Family::Nedelec0: return mesh.edge_on_boundary(dof);
    case Family::RT0: return mesh.facet_on_boundary(dof);
    case Family::P1: return mesh.vertex_on_boundary(dof);
    }
    return false;
}

double edge_dof(const VectorFn& v, const Vec3& a, const Vec3& b)
{
    static const LineRule rule = gauss_legendre01(3);
    const Vec3 t = b - a;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.t.size(); ++q)
        s += rule.w[q] * v(a + rule.t[q] * t).dot(t);
    return s;
}

double face_dof(const VectorFn& v, int dim, std::span<const Vec3> vertices)
{
    if (dim == 2) {
        static const LineRule rule = gauss_legendre01(3);
        const Vec3 t = vertices[1] - vertices[0];
        const Vec3 n(t.y(), -t.x(), 0.0); // |n| = segment length
        double s = 0.0;
        for (std::size_t q = 0; q < rule.t.size(); ++q)
            s += rule.w[q] * v(vertices[0] + rule.t[q] * t).dot(n);
        return s;
    }
    const QuadratureRule& rule = simplex_rule(2, 5);
    const Vec3 e1 = vertices[1] - vertices[0], e2 = vertices[2] - vertices[0];
    const Vec3 n = e1.cross(e2); // |n| = 2 area = Jacobian of the reference map
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3 x = vertices[0] + rule.points[q].x() * e1 + rule.points[q].y() * e2;
        s += rule.weights[q] * v(x).dot(n);
    }
    return s;
}

double edge_dof(const AnalyticField& field, const Vec3& a, const Vec3& b)
{
    if (field.segment_meets_locus(a, b))
        throw SingularTrace("edge meets the singular locus of field '" + field.name + "'");
    const double s = edge_dof(field.value, a, b);
    if (!std::isfinite(s))
        throw SingularTrace("non-finite edge trace of field '" + field.name + "'");
    return s;
}

double face_dof(const AnalyticField& field, std::span<const Vec3> vertices)
{
    const bool meets = field.dim == 2 ? field.segment_meets_locus(vertices[0], vertices[1])
                                      : field.triangle_meets_locus(vertices[0], vertices[1], vertices[2]);
    if (meets)
        throw SingularTrace("face meets the singular locus of field '" + field.name + "'");
    const double s = face_dof(field.value, field.dim, vertices);
    if (!std::isfinite(s))
        throw SingularTrace("non-finite face trace of field '" + field.name + "'");
    return s;
}

double entity_dof(const SimplicialMesh& mesh, Family f, const AnalyticField& field, int dof)
{
    if (field.dim != mesh.dim())
        throw InvalidArgument("field and mesh dimensions differ");
    if (f == Family::Nedelec0) {
        const auto& e = mesh.edge(dof);
        return edge_dof(field, mesh.vertex(e[0]), mesh.vertex(e[1]));
    }
    if (f == Family::RT0) {
        const auto fv = mesh.facet(dof);
        std::array<Vec3, 3> v;
        for (int a = 0; a < mesh.dim(); ++a)
            v[a] = mesh.vertex(fv[a]);
        return face_dof(field, std::span<const Vec3>(v.data(), mesh.dim()));
    }
    throw InvalidArgument("entity_dof: Nedelec0 or RT0 expected");
}

} // namespace lowreg
