#pragma once

#include "lowreg/common.hpp"
#include "lowreg/fields.hpp"
#include "lowreg/mesh.hpp"

#include <array>
#include <span>
#include <string>

namespace lowreg {

enum class Family { Nedelec0, RT0, P1 };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

/// Number of local basis functions on a cell of dimension `dim`.
int local_dof_count(Family f, int dim);

/// Reference basis values. `deriv` holds the curl (Nedelec0, z component in
/// 2D), the divergence in x() (RT0) or the gradient (P1).
struct BasisValues {
    int count = 0;
    std::array<Vec3, 6> value{};
    std::array<Vec3, 6> deriv{};
};

/// Whitney edge functions lambda_i grad lambda_j - lambda_j grad lambda_i in
/// local edge order. Rejects points outside the reference cell.
BasisValues nedelec0_eval(int dim, const Vec3& xhat);
/// psi_i = (-1)^i (x - xhat_i) / (d |Khat|): unit flux through facet i with
/// the sorted-vertex normal.
BasisValues rt0_eval(int dim, const Vec3& xhat);
/// Barycentric coordinates and their gradients.
BasisValues p1_eval(int dim, const Vec3& xhat);
BasisValues reference_eval(Family f, int dim, const Vec3& xhat);

struct MappedValue {
    Vec3 value;
    Vec3 deriv;
};

/// v = J^{-T} vhat, curl v = J curlhat / det J.
MappedValue covariant_piola(const AffineCellMap& map, const Vec3& ref_value, const Vec3& ref_curl);
/// v = J vhat / det J, div v = divhat / det J (divergence in x()).
MappedValue contravariant_piola(const AffineCellMap& map, const Vec3& ref_value, double ref_div);

/// Physical basis on cell k at reference point xhat. Local DOF l of cell k is
/// the global DOF global_dof(mesh, family, k, l) with sign +1.
BasisValues physical_eval(const SimplicialMesh& mesh, Family f, int k, const Vec3& xhat);

int num_global_dofs(const SimplicialMesh& mesh, Family f);
int global_dof(const SimplicialMesh& mesh, Family f, int k, int local);
bool dof_on_boundary(const SimplicialMesh& mesh, Family f, int dof);

/// Integral of v.t over the segment a -> b with t = b - a (3-point Gauss).
double edge_dof(const VectorFn& v, const Vec3& a, const Vec3& b);
/// Flux of v through the facet with the right-hand-rule normal of its vertex
/// order (2D: tangent rotated by -pi/2). Degree 5 rule in 3D.
double face_dof(const VectorFn& v, int dim, std::span<const Vec3> vertices);

/// Guarded variants: throw SingularTrace when the entity meets the singular
/// locus of the field or the integrand is not finite.
double edge_dof(const AnalyticField& field, const Vec3& a, const Vec3& b);
double face_dof(const AnalyticField& field, std::span<const Vec3> vertices);

/// DOF functional of global entity `dof` (edge for Nedelec0, facet for RT0).
double entity_dof(const SimplicialMesh& mesh, Family f, const AnalyticField& field, int dof);

} // namespace lowreg
