#pragma once

#include "lowreg/fields.hpp"
#include "lowreg/interpolation.hpp"
#include "lowreg/mesh.hpp"
#include "lowreg/sparse.hpp"

#include <iosfwd>
#include <vector>

namespace lowreg {

/// Piecewise-constant real coefficients nu > 0, kappa > 0 on axis-aligned
/// boxes. Points outside every box take the default values.
class CoefficientPartition {
public:
    struct Region {
        Vec3 lower;
        Vec3 upper;
        double nu;
        double kappa;
    };

    explicit CoefficientPartition(double nu = 1.0, double kappa = 1.0);
    void add_region(const Vec3& lower, const Vec3& upper, double nu, double kappa);

    /// First region containing x (closed boxes), else the defaults.
    std::pair<double, double> lookup(const Vec3& x) const;
    /// Coefficients of cell k, looked up at its centroid.
    std::pair<double, double> cell_values(const SimplicialMesh& mesh, int k) const;

    double nu_min() const;
    double kappa_min() const;
    const std::vector<Region>& regions() const { return regions_; }

private:
    double nu_;
    double kappa_;
    std::vector<Region> regions_;
};

enum class BcMode { Strong, Nitsche };

struct CurlCurlSystem {
    const SimplicialMesh* mesh = nullptr;
    BcMode mode = BcMode::Strong;
    double eta0 = 0.0;
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<int> dof_row;       // global edge -> system row, -1 when eliminated
    std::vector<int> boundary_faces;
    std::vector<double> lambda_f;   // per boundary face (Nitsche only)

    int size() const { return static_cast<int>(rhs.size()); }
};

using ElementMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

/// int_K nu phi_i.phi_j + kappa rot phi_i . rot phi_j.
ElementMatrix element_matrix(const SimplicialMesh& mesh, int k, double nu, double kappa);
/// Same on the reference tetrahedron.
ElementMatrix reference_element_matrix(double nu, double kappa);

/// Source for A as exact solution: f = nu A + rot(kappa rot A) cellwise
/// (requires field.curl_curl).
VectorFn manufactured_source(const AnalyticField& exact, const CoefficientPartition& coeffs);

struct AssemblyOptions {
    int cell_degree = 6;
    int face_degree = 4;
};

CurlCurlSystem assemble_strong(const SimplicialMesh& mesh, const CoefficientPartition& coeffs, const VectorFn& f,
                               const AssemblyOptions& opt = {});
/// a - n_h - n_h^T + s_h with lambda_F = kappa of the adjacent cell and
/// h_F = facet diameter.
CurlCurlSystem assemble_nitsche(const SimplicialMesh& mesh, const CoefficientPartition& coeffs, const VectorFn& f,
                                double eta0, const AssemblyOptions& opt = {});

struct SolveResult {
    FEFunction solution;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Jacobi-preconditioned CG to `tol`, capped at 10 ndof iterations.
/// Throws SolverError on failure or a non-positive curvature direction.
SolveResult solve(const CurlCurlSystem& system, double tol = 1e-10);

/// a(u, w) for conforming u, w (no boundary terms).
double bilinear_form(const SimplicialMesh& mesh, const CoefficientPartition& coeffs, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& w);

struct MaxwellErrors {
    double l2 = 0.0;
    double curl_l2 = 0.0;
    double hcurl = 0.0;
    std::vector<double> cell_l2_sq;
    std::vector<double> cell_curl_sq;
    std::vector<double> boundary_residual; // per boundary face: h^{2d((d+2)/2d-1/q)} ||f - nu A||^2_{L^q(K-)}
    double vsharp = 0.0;                   // V-sharp norm with p = 2
};

MaxwellErrors maxwell_errors(const FEFunction& solution, const AnalyticField& exact,
                             const CoefficientPartition& coeffs, const VectorFn& f, double q = 2.0,
                             int degree = 6);

/// Legacy VTK with the solution averaged per cell.
void write_solution_vtk(std::ostream& os, const FEFunction& u, const std::string& name = "A_h");

} // namespace lowreg
