#pragma once

#include "lowreg/elements.hpp"
#include "lowreg/fields.hpp"
#include "lowreg/mesh.hpp"

#include <Eigen/Dense>

namespace lowreg {

/// Conforming lowest-order function: one coefficient per edge (Nedelec0) or
/// facet (RT0), equal to the canonical DOF with the global orientation.
struct FEFunction {
    const SimplicialMesh* mesh = nullptr;
    Family space = Family::Nedelec0;
    bool zero_boundary = false;
    Eigen::VectorXd coeffs;

    FEFunction() = default;
    FEFunction(const SimplicialMesh& m, Family f, bool zero_bc = false);

    /// Value and curl (Nedelec0) or divergence in x() (RT0) in cell k.
    MappedValue eval(int k, const Vec3& xhat) const;
    Eigen::VectorXd local_coeffs(int k) const;
};

/// Per-cell local DOFs without inter-cell coupling.
struct BrokenFEFunction {
    const SimplicialMesh* mesh = nullptr;
    Family space = Family::Nedelec0;
    Eigen::MatrixXd coeffs; // num_cells x local dof count

    BrokenFEFunction() = default;
    BrokenFEFunction(const SimplicialMesh& m, Family f);

    MappedValue eval(int k, const Vec3& xhat) const;
};

BrokenFEFunction to_broken(const FEFunction& u);

struct InterpolationOptions {
    int cell_degree = 6;
};

/// Canonical interpolant: entity DOFs of the field. Throws SingularTrace when
/// an entity meets the singular locus.
FEFunction canonical_interpolate(const SimplicialMesh& mesh, Family space, const AnalyticField& field);

/// Cellwise L2 projection onto the broken space (dense local Gram solves).
BrokenFEFunction broken_project(const SimplicialMesh& mesh, Family space, const AnalyticField& field,
                                const InterpolationOptions& opt = {});
BrokenFEFunction broken_project(const SimplicialMesh& mesh, Family space, const VectorFn& field,
                                const InterpolationOptions& opt = {});

/// Cellwise projection of a discrete function (evaluated cell by cell, so
/// piecewise fields need no point location).
BrokenFEFunction broken_project(const FEFunction& u, Family space, const InterpolationOptions& opt = {});

/// Mean value of the field over cell k.
Vec3 cell_mean(const SimplicialMesh& mesh, const VectorFn& field, int k, int degree = 6);

/// Equal-weight average of the local DOFs over the cells sharing each entity;
/// boundary DOFs set to zero when `zero_boundary`.
FEFunction average_dofs(const BrokenFEFunction& broken, bool zero_boundary);

/// average_dofs(broken_project(field)).
FEFunction quasi_interpolate(const SimplicialMesh& mesh, Family space, const AnalyticField& field,
                             bool zero_boundary, const InterpolationOptions& opt = {});

struct BestApproximationOptions {
    int cell_degree = 6;
    double tol = 1e-10;
};

/// Global L2 projection onto the conforming space (boundary DOFs fixed at zero
/// when `zero_boundary`), solved by preconditioned conjugate gradients.
FEFunction best_approximation_l2(const SimplicialMesh& mesh, Family space, const VectorFn& field,
                                 bool zero_boundary, const BestApproximationOptions& opt = {});
FEFunction best_approximation_l2(const SimplicialMesh& mesh, Family space, const AnalyticField& field,
                                 bool zero_boundary, const BestApproximationOptions& opt = {});

} // namespace lowreg
