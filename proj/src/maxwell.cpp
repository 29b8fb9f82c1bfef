#include "lowreg/maxwell.hpp"

#include "lowreg/elements.hpp"
#include "lowreg/norms.hpp"
#include "lowreg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace lowreg {

namespace {

using ElementVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;

ElementVector element_load(const SimplicialMesh& mesh, int k, const VectorFn& f, int degree)
{
    const int n = mesh.edges_per_cell();
    const QuadratureRule& rule = simplex_rule(mesh.dim(), degree);
    const auto& map = mesh.cell_map(k);
    const double jac = std::abs(map.det);
    ElementVector b = ElementVector::Zero(n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisValues phi = physical_eval(mesh, Family::Nedelec0, k, rule.points[q]);
        const Vec3 fx = f(map.to_physical(rule.points[q]));
        for (int i = 0; i < n; ++i)
            b[i] += rule.weights[q] * jac * fx.dot(phi.value[i]);
    }
    return b;
}

// Face points of facet f mapped from the (dim-1)-reference rule, with weights
// scaled to the facet measure.
void facet_quadrature(const SimplicialMesh& mesh, int f, int degree, std::vector<Vec3>& pts, std::vector<double>& w)
{
    const int dim = mesh.dim();
    const auto fv = mesh.facet(f);
    const QuadratureRule& rule = simplex_rule(dim - 1, degree);
    const double scale = mesh.facet_measure(f) / reference_measure(dim - 1);
    pts.clear();
    w.clear();
    for (std::size_t q = 0; q < rule.size(); ++q) {
        Vec3 x = mesh.vertex(fv[0]);
        for (int a = 1; a < dim; ++a)
            x += rule.points[q][a - 1] * (mesh.vertex(fv[a]) - mesh.vertex(fv[0]));
        pts.push_back(x);
        w.push_back(rule.weights[q] * scale);
    }
}

// Nitsche contribution of boundary facet f to its cell's local matrix.
ElementMatrix nitsche_face_matrix(const SimplicialMesh& mesh, int f, double kappa, double eta0, int degree)
{
    const int k = mesh.facet_cells(f)[0];
    const int n = mesh.edges_per_cell();
    const Vec3 normal = mesh.outward_normal(k, mesh.local_facet_index(k, f));
    const double penalty = eta0 * kappa / mesh.facet_diameter(f);
    std::vector<Vec3> pts;
    std::vector<double> w;
    facet_quadrature(mesh, f, degree, pts, w);
    ElementMatrix M = ElementMatrix::Zero(n, n);
    for (std::size_t q = 0; q < pts.size(); ++q) {
        const BasisValues phi = physical_eval(mesh, Family::Nedelec0, k, mesh.cell_map(k).to_reference(pts[q]));
        for (int i = 0; i < n; ++i) {
            const Vec3 ti = phi.value[i].cross(normal);
            for (int j = 0; j < n; ++j) {
                const Vec3 tj = phi.value[j].cross(normal);
                // n_h(phi_j, phi_i) and its transpose
                const double cons = (kappa * phi.deriv[j]).cross(normal).dot(phi.value[i]);
                const double adj = (kappa * phi.deriv[i]).cross(normal).dot(phi.value[j]);
                M(i, j) += w[q] * (-cons - adj + penalty * tj.dot(ti));
            }
        }
    }
    return M;
}

CurlCurlSystem assemble(const SimplicialMesh& mesh, const CoefficientPartition& coeffs, const VectorFn& f,
                        BcMode mode, double eta0, const AssemblyOptions& opt)
{
    CurlCurlSystem sys;
    sys.mesh = &mesh;
    sys.mode = mode;
    sys.eta0 = eta0;
    const int ne = mesh.num_edges();
    const int nloc = mesh.edges_per_cell();
    sys.dof_row.assign(ne, -1);
    int nrows = 0;
    for (int e = 0; e < ne; ++e)
        if (mode == BcMode::Nitsche || !mesh.edge_on_boundary(e))
            sys.dof_row[e] = nrows++;
    for (int fi = 0; fi < mesh.num_facets(); ++fi)
        if (mesh.facet_on_boundary(fi))
            sys.boundary_faces.push_back(fi);

    std::vector<ElementMatrix> Ke(mesh.num_cells());
    std::vector<ElementVector> be(mesh.num_cells());
#pragma omp parallel for schedule(static)
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto [nu, kappa] = coeffs.cell_values(mesh, k);
        Ke[k] = element_matrix(mesh, k, nu, kappa);
        be[k] = element_load(mesh, k, f, opt.cell_degree);
    }
    std::vector<ElementMatrix> Kf;
    if (mode == BcMode::Nitsche) {
        const int nb = static_cast<int>(sys.boundary_faces.size());
        Kf.resize(nb);
        sys.lambda_f.resize(nb);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nb; ++i) {
            const int fi = sys.boundary_faces[i];
            const double kappa = coeffs.cell_values(mesh, mesh.facet_cells(fi)[0]).second;
            sys.lambda_f[i] = kappa;
            Kf[i] = nitsche_face_matrix(mesh, fi, kappa, eta0, opt.face_degree);
        }
    }

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh.num_cells() + Kf.size()) * nloc * nloc);
    sys.rhs = Eigen::VectorXd::Zero(nrows);
    auto scatter = [&](int k, const ElementMatrix& M) {
        for (int i = 0; i < nloc; ++i) {
            const int ri = sys.dof_row[mesh.cell_edge(k, i)];
            if (ri < 0)
                continue;
            for (int j = 0; j < nloc; ++j) {
                const int rj = sys.dof_row[mesh.cell_edge(k, j)];
                if (rj >= 0)
                    trip.emplace_back(ri, rj, M(i, j));
            }
        }
    };
    for (int k = 0; k < mesh.num_cells(); ++k) {
        scatter(k, Ke[k]);
        for (int i = 0; i < nloc; ++i) {
            const int ri = sys.dof_row[mesh.cell_edge(k, i)];
            if (ri >= 0)
                sys.rhs[ri] += be[k][i];
        }
    }
    for (std::size_t i = 0; i < Kf.size(); ++i)
        scatter(mesh.facet_cells(sys.boundary_faces[i])[0], Kf[i]);
    sys.matrix.resize(nrows, nrows);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

} // namespace

CoefficientPartition::CoefficientPartition(double nu, double kappa) : nu_(nu), kappa_(kappa)
{
    if (!(nu > 0.0 && kappa > 0.0))
        throw InvalidArgument("coefficients must be positive");
}

void CoefficientPartition::add_region(const Vec3& lower, const Vec3& upper, double nu, double kappa)
{
    if (!(nu > 0.0 && kappa > 0.0))
        throw InvalidArgument("coefficients must be positive");
    if ((upper.array() < lower.array()).any())
        throw InvalidArgument("region bounds are inverted");
    regions_.push_back({lower, upper, nu, kappa});
}

std::pair<double, double> CoefficientPartition::lookup(const Vec3& x) const
{
    for (const auto& r : regions_)
        if ((x.array() >= r.lower.array()).all() && (x.array() <= r.upper.array()).all())
            return {r.nu, r.kappa};
    return {nu_, kappa_};
}

std::pair<double, double> CoefficientPartition::cell_values(const SimplicialMesh& mesh, int k) const
{
    return lookup(mesh.cell_centroid(k));
}

double CoefficientPartition::nu_min() const
{
    double m = nu_;
    for (const auto& r : regions_)
        m = std::min(m, r.nu);
    return m;
}

double CoefficientPartition::kappa_min() const
{
    double m = kappa_;
    for (const auto& r : regions_)
        m = std::min(m, r.kappa);
    return m;
}

ElementMatrix element_matrix(const SimplicialMesh& mesh, int k, double nu, double kappa)
{
    const int n = mesh.edges_per_cell();
    const QuadratureRule& rule = simplex_rule(mesh.dim(), 2);
    const double jac = std::abs(mesh.cell_map(k).det);
    ElementMatrix M = ElementMatrix::Zero(n, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisValues phi = physical_eval(mesh, Family::Nedelec0, k, rule.points[q]);
        const double w = rule.weights[q] * jac;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                M(i, j) += w * (nu * phi.value[i].dot(phi.value[j]) + kappa * phi.deriv[i].dot(phi.deriv[j]));
    }
    return M;
}

ElementMatrix reference_element_matrix(double nu, double kappa)
{
    static const SimplicialMesh ref(3, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
    return element_matrix(ref, 0, nu, kappa);
}

VectorFn manufactured_source(const AnalyticField& exact, const CoefficientPartition& coeffs)
{
    if (!exact.curl_curl)
        throw InvalidArgument("field '" + exact.name + "' has no curl-curl evaluator");
    return [exact, coeffs](const Vec3& x) {
        const auto [nu, kappa] = coeffs.lookup(x);
        return Vec3(nu * exact.value(x) + kappa * exact.curl_curl(x));
    };
}

CurlCurlSystem assemble_strong(const SimplicialMesh& mesh, const CoefficientPartition& coeffs, const VectorFn& f,
                               const AssemblyOptions& opt)
{
    return assemble(mesh, coeffs, f, BcMode::Strong, 0.0, opt);
}

CurlCurlSystem assemble_nitsche(const SimplicialMesh& mesh, const CoefficientPartition& coeffs, const VectorFn& f,
                                double eta0, const AssemblyOptions& opt)
{
    if (!(eta0 > 0.0))
        throw InvalidArgument("assemble_nitsche: eta0 must be positive");
    return assemble(mesh, coeffs, f, BcMode::Nitsche, eta0, opt);
}

SolveResult solve(const CurlCurlSystem& system, double tol)
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(system.size());
    const CgResult cg = conjugate_gradient(system.matrix, system.rhs, x, tol, std::max(1, 10 * system.size()));
    SolveResult res;
    res.solution = FEFunction(*system.mesh, Family::Nedelec0, system.mode == BcMode::Strong);
    for (std::size_t e = 0; e < system.dof_row.size(); ++e)
        res.solution.coeffs[e] = system.dof_row[e] >= 0 ? x[system.dof_row[e]] : 0.0;
    res.iterations = cg.iterations;
    res.relative_residual = cg.relative_residual;
    return res;
}

double bilinear_form(const SimplicialMesh& mesh, const CoefficientPartition& coeffs, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& w)
{
    const int n = mesh.edges_per_cell();
    double s = 0.0;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto [nu, kappa] = coeffs.cell_values(mesh, k);
        const ElementMatrix M = element_matrix(mesh, k, nu, kappa);
        Eigen::VectorXd uk(n), wk(n);
        for (int l = 0; l < n; ++l) {
            uk[l] = u[mesh.cell_edge(k, l)];
            wk[l] = w[mesh.cell_edge(k, l)];
        }
        s += wk.dot(M * uk);
    }
    return s;
}

MaxwellErrors maxwell_errors(const FEFunction& solution, const AnalyticField& exact,
                             const CoefficientPartition& coeffs, const VectorFn& f, double q, int degree)
{
    const SimplicialMesh& mesh = *solution.mesh;
    if (!exact.has_curl())
        throw InvalidArgument("maxwell_errors: exact field needs a curl evaluator");
    check_q(mesh.dim(), q);
    MaxwellErrors err;
    const int nc = mesh.num_cells();
    err.cell_l2_sq.resize(nc);
    err.cell_curl_sq.resize(nc);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nc; ++k) {
        err.cell_l2_sq[k] = std::pow(l2_error_cell(exact, solution, k, degree), 2);
        err.cell_curl_sq[k] = std::pow(derivative_error_cell(exact, solution, k, degree), 2);
    }
    double vs = 0.0;
    for (int k = 0; k < nc; ++k) {
        err.l2 += err.cell_l2_sq[k];
        err.curl_l2 += err.cell_curl_sq[k];
        const auto [nu, kappa] = coeffs.cell_values(mesh, k);
        vs += nu * err.cell_l2_sq[k] + kappa * err.cell_curl_sq[k];
    }
    err.l2 = std::sqrt(err.l2);
    err.curl_l2 = std::sqrt(err.curl_l2);
    err.hcurl = hcurl_norm(err.l2, err.curl_l2, mesh.domain_diameter());

    const VectorFn residual = [&f, &exact, &coeffs](const Vec3& x) {
        return Vec3(f(x) - coeffs.lookup(x).first * exact.value(x));
    };
    const double rexp = residual_exponent(mesh.dim(), q);
    const double cexp = 2.0 * lq_term_exponent(mesh.dim(), q);
    std::vector<Vec3> pts;
    std::vector<double> w;
    for (int fi = 0; fi < mesh.num_facets(); ++fi) {
        if (!mesh.facet_on_boundary(fi))
            continue;
        const int k = mesh.facet_cells(fi)[0];
        const double h = mesh.cell_diameter(k);
        const double kappa = coeffs.cell_values(mesh, k).second;
        const double res_lq = lq_norm_cell(mesh, residual, q, k, degree);
        err.boundary_residual.push_back(std::pow(h, rexp) * res_lq * res_lq);

        // tangential trace of the discrete part on the face
        const Vec3 normal = mesh.outward_normal(k, mesh.local_facet_index(k, fi));
        facet_quadrature(mesh, fi, 4, pts, w);
        double trace = 0.0;
        for (std::size_t p = 0; p < pts.size(); ++p)
            trace += w[p] * solution.eval(k, mesh.cell_map(k).to_reference(pts[p])).value.cross(normal).squaredNorm();
        double curl_curl_lq = 0.0;
        if (exact.curl_curl)
            curl_curl_lq = lq_norm_cell(mesh, exact.curl_curl, q, k, degree);
        vs += kappa / h * trace + kappa * (err.cell_curl_sq[k] + std::pow(h, cexp) * curl_curl_lq * curl_curl_lq);
    }
    err.vsharp = std::sqrt(vs);
    return err;
}

void write_solution_vtk(std::ostream& os, const FEFunction& u, const std::string& name)
{
    const SimplicialMesh& mesh = *u.mesh;
    const Vec3 centroid = Vec3::Constant(1.0 / (mesh.dim() + 1)).cwiseProduct(
        Vec3(1.0, 1.0, mesh.dim() == 3 ? 1.0 : 0.0));
    std::vector<Vec3> values(mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k)
        values[k] = u.eval(k, centroid).value;
    write_vtk(os, mesh, values, name);
}

} // namespace lowreg
