#include "lowreg/interpolation.hpp"

#include "lowreg/quadrature.hpp"
#include "lowreg/sparse.hpp"

#include <cmath>

namespace lowreg {

namespace {

void check_space(Family f)
{
    if (f != Family::Nedelec0 && f != Family::RT0)
        throw InvalidArgument("interpolation: Nedelec0 or RT0 space expected");
}

MappedValue combine(const BasisValues& b, const double* c)
{
    MappedValue m{Vec3::Zero(), Vec3::Zero()};
    for (int i = 0; i < b.count; ++i) {
        m.value += c[i] * b.value[i];
        m.deriv += c[i] * b.deriv[i];
    }
    return m;
}

using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;

// Local mass matrix and load vector of cell k.
// field(k, xhat) gives the target at the reference point xhat of cell k.
template <class CellFn>
void local_mass_and_load(const SimplicialMesh& mesh, Family space, const CellFn& field, int k, int degree,
                         LocalMatrix& M, LocalVector& b)
{
    const int n = local_dof_count(space, mesh.dim());
    const QuadratureRule& rule = simplex_rule(mesh.dim(), degree);
    const double jac = std::abs(mesh.cell_map(k).det);
    M.setZero(n, n);
    b.setZero(n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisValues phi = physical_eval(mesh, space, k, rule.points[q]);
        const Vec3 v = field(k, rule.points[q]);
        const double w = rule.weights[q] * jac;
        for (int i = 0; i < n; ++i) {
            b[i] += w * v.dot(phi.value[i]);
            for (int j = 0; j < n; ++j)
                M(i, j) += w * phi.value[i].dot(phi.value[j]);
        }
    }
}

} // namespace

FEFunction::FEFunction(const SimplicialMesh& m, Family f, bool zero_bc)
    : mesh(&m), space(f), zero_boundary(zero_bc), coeffs(Eigen::VectorXd::Zero(num_global_dofs(m, f)))
{
    check_space(f);
}

Eigen::VectorXd FEFunction::local_coeffs(int k) const
{
    const int n = local_dof_count(space, mesh->dim());
    Eigen::VectorXd c(n);
    for (int l = 0; l < n; ++l)
        c[l] = coeffs[global_dof(*mesh, space, k, l)];
    return c;
}

MappedValue FEFunction::eval(int k, const Vec3& xhat) const
{
    const Eigen::VectorXd c = local_coeffs(k);
    return combine(physical_eval(*mesh, space, k, xhat), c.data());
}

BrokenFEFunction::BrokenFEFunction(const SimplicialMesh& m, Family f)
    : mesh(&m), space(f), coeffs(Eigen::MatrixXd::Zero(m.num_cells(), local_dof_count(f, m.dim())))
{
    check_space(f);
}

MappedValue BrokenFEFunction::eval(int k, const Vec3& xhat) const
{
    const Eigen::VectorXd c = coeffs.row(k).transpose();
    return combine(physical_eval(*mesh, space, k, xhat), c.data());
}

BrokenFEFunction to_broken(const FEFunction& u)
{
    BrokenFEFunction b(*u.mesh, u.space);
    for (int k = 0; k < u.mesh->num_cells(); ++k)
        b.coeffs.row(k) = u.local_coeffs(k).transpose();
    return b;
}

FEFunction canonical_interpolate(const SimplicialMesh& mesh, Family space, const AnalyticField& field)
{
    FEFunction u(mesh, space);
    const int n = static_cast<int>(u.coeffs.size());
    bool singular = false;
    std::string message;
#pragma omp parallel for schedule(static)
    for (int g = 0; g < n; ++g) {
        try {
            u.coeffs[g] = entity_dof(mesh, space, field, g);
        } catch (const SingularTrace& e) {
#pragma omp critical
            {
                if (!singular) {
                    singular = true;
                    message = e.what();
                }
            }
        }
    }
    if (singular)
        throw SingularTrace(message);
    return u;
}

namespace {

template <class CellFn>
BrokenFEFunction project_cells(const SimplicialMesh& mesh, Family space, const CellFn& field, int degree)
{
    BrokenFEFunction u(mesh, space);
    bool degenerate = false;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < mesh.num_cells(); ++k) {
        LocalMatrix M;
        LocalVector b;
        local_mass_and_load(mesh, space, field, k, degree, M, b);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
#pragma omp atomic write
            degenerate = true;
            continue;
        }
        u.coeffs.row(k) = ldlt.solve(Eigen::VectorXd(b)).transpose();
    }
    if (degenerate)
        throw DegenerateCell("broken_project: singular local Gram matrix");
    return u;
}

} // namespace

BrokenFEFunction broken_project(const SimplicialMesh& mesh, Family space, const VectorFn& field,
                                const InterpolationOptions& opt)
{
    return project_cells(
        mesh, space, [&](int k, const Vec3& xhat) { return field(mesh.cell_map(k).to_physical(xhat)); },
        opt.cell_degree);
}

BrokenFEFunction broken_project(const FEFunction& u, Family space, const InterpolationOptions& opt)
{
    return project_cells(*u.mesh, space, [&u](int k, const Vec3& xhat) { return u.eval(k, xhat).value; },
                         opt.cell_degree);
}

BrokenFEFunction broken_project(const SimplicialMesh& mesh, Family space, const AnalyticField& field,
                                const InterpolationOptions& opt)
{
    if (field.dim != mesh.dim())
        throw InvalidArgument("field and mesh dimensions differ");
    return broken_project(mesh, space, field.value, opt);
}

Vec3 cell_mean(const SimplicialMesh& mesh, const VectorFn& field, int k, int degree)
{
    const QuadratureRule& rule = simplex_rule(mesh.dim(), degree);
    Vec3 s = Vec3::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * field(mesh.cell_map(k).to_physical(rule.points[q]));
    return s / reference_measure(mesh.dim());
}

FEFunction average_dofs(const BrokenFEFunction& broken, bool zero_boundary)
{
    const SimplicialMesh& mesh = *broken.mesh;
    FEFunction u(mesh, broken.space, zero_boundary);
    const int n = static_cast<int>(u.coeffs.size());
#pragma omp parallel for schedule(static)
    for (int g = 0; g < n; ++g) {
        if (zero_boundary && dof_on_boundary(mesh, broken.space, g)) {
            u.coeffs[g] = 0.0;
            continue;
        }
        double s = 0.0;
        int count = 0;
        if (broken.space == Family::Nedelec0) {
            for (int k : mesh.edge_cells(g)) {
                s += broken.coeffs(k, mesh.local_edge_index(k, g));
                ++count;
            }
        } else {
            for (int k : mesh.facet_cells(g)) {
                if (k < 0)
                    continue;
                s += broken.coeffs(k, mesh.local_facet_index(k, g));
                ++count;
            }
        }
        u.coeffs[g] = s / count;
    }
    return u;
}

FEFunction quasi_interpolate(const SimplicialMesh& mesh, Family space, const AnalyticField& field,
                             bool zero_boundary, const InterpolationOptions& opt)
{
    return average_dofs(broken_project(mesh, space, field, opt), zero_boundary);
}

FEFunction best_approximation_l2(const SimplicialMesh& mesh, Family space, const VectorFn& field,
                                 bool zero_boundary, const BestApproximationOptions& opt)
{
    check_space(space);
    const int ndof = num_global_dofs(mesh, space);
    const int nloc = local_dof_count(space, mesh.dim());
    std::vector<int> row(ndof, -1);
    int nfree = 0;
    for (int g = 0; g < ndof; ++g)
        if (!(zero_boundary && dof_on_boundary(mesh, space, g)))
            row[g] = nfree++;

    std::vector<LocalMatrix> Ms(mesh.num_cells());
    std::vector<LocalVector> bs(mesh.num_cells());
    const auto physical = [&](int c, const Vec3& xhat) { return field(mesh.cell_map(c).to_physical(xhat)); };
#pragma omp parallel for schedule(static)
    for (int k = 0; k < mesh.num_cells(); ++k)
        local_mass_and_load(mesh, space, physical, k, opt.cell_degree, Ms[k], bs[k]);

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh.num_cells()) * nloc * nloc);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
    for (int k = 0; k < mesh.num_cells(); ++k) {
        for (int i = 0; i < nloc; ++i) {
            const int ri = row[global_dof(mesh, space, k, i)];
            if (ri < 0)
                continue;
            rhs[ri] += bs[k][i];
            for (int j = 0; j < nloc; ++j) {
                const int rj = row[global_dof(mesh, space, k, j)];
                if (rj >= 0)
                    trip.emplace_back(ri, rj, Ms[k](i, j));
            }
        }
    }
    SparseMatrix M(nfree, nfree);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nfree);
    conjugate_gradient(M, rhs, x, opt.tol, std::max(100, 10 * nfree));

    FEFunction u(mesh, space, zero_boundary);
    for (int g = 0; g < ndof; ++g)
        u.coeffs[g] = row[g] >= 0 ? x[row[g]] : 0.0;
    return u;
}

FEFunction best_approximation_l2(const SimplicialMesh& mesh, Family space, const AnalyticField& field,
                                 bool zero_boundary, const BestApproximationOptions& opt)
{
    if (field.dim != mesh.dim())
        throw InvalidArgument("field and mesh dimensions differ");
    return best_approximation_l2(mesh, space, field.value, zero_boundary, opt);
}

} // namespace lowreg
