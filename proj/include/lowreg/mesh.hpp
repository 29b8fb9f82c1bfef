#pragma once

#include "lowreg/common.hpp"
#include "lowreg/quadrature.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lowreg {

/// Affine map from the reference simplex: x = origin + J xhat. In 2D the
/// Jacobian is padded with J(2,2) = 1 so inverses and determinants are 3x3.
struct AffineCellMap {
    Mat3 jacobian = Mat3::Identity();
    Mat3 inverse = Mat3::Identity();
    Mat3 inverse_transpose = Mat3::Identity();
    double det = 1.0;
    Vec3 origin = Vec3::Zero();

    AffineCellMap() = default;
    AffineCellMap(int dim, std::span<const Vec3> vertices);

    Vec3 to_physical(const Vec3& xhat) const { return origin + jacobian * xhat; }
    Vec3 to_reference(const Vec3& x) const { return inverse * (x - origin); }
};

/// Matching affine simplicial mesh of a 2D or 3D polytope.
///
/// Cells store their vertex indices in ascending order; local entities follow
/// from that order, so an edge (a, b) with a < b is always traversed from a to
/// b and the orientation of every face is the right-hand rule on its sorted
/// vertices. Local and global orientations therefore coincide in every cell.
///
/// Local numbering: edges (0,1) (0,2) (0,3) (1,2) (1,3) (2,3) in 3D and
/// (0,1) (0,2) (1,2) in 2D; facet i is opposite local vertex i.
class SimplicialMesh {
public:
    using Cell = std::array<int, 4>;

    /// `cells` may come in any vertex order; that order is kept as the
    /// refinement order (Bey) while the stored connectivity is sorted.
    SimplicialMesh(int dim, std::vector<Vec3> vertices, std::vector<Cell> cells);

    int dim() const { return dim_; }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    /// Codimension-one entities: edges in 2D, faces in 3D.
    int num_facets() const { return dim_ == 2 ? num_edges() : num_faces(); }

    int vertices_per_cell() const { return dim_ + 1; }
    int edges_per_cell() const { return dim_ == 2 ? 3 : 6; }
    int facets_per_cell() const { return dim_ + 1; }

    const Vec3& vertex(int i) const { return vertices_[i]; }
    const std::vector<Vec3>& vertices() const { return vertices_; }
    const Cell& cell(int k) const { return cells_[k]; }
    const Cell& refinement_order(int k) const { return refine_order_[k]; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    const std::array<int, 3>& face(int f) const { return faces_[f]; }
    /// Sorted vertices of facet f (2 entries used in 2D).
    std::array<int, 3> facet(int f) const;

    int cell_edge(int k, int local) const { return cell_edges_[k][local]; }
    int cell_face(int k, int local) const { return cell_faces_[k][local]; }
    int cell_facet(int k, int local) const;
    std::span<const int> edge_cells(int e) const;
    /// Cells on both sides of facet f; second entry is -1 on the boundary.
    const std::array<int, 2>& facet_cells(int f) const { return facet_cells_[f]; }
    /// Local index of facet f within cell k (the vertex it is opposite to).
    int local_facet_index(int k, int f) const;
    int local_edge_index(int k, int e) const;

    bool edge_on_boundary(int e) const { return edge_boundary_[e]; }
    bool facet_on_boundary(int f) const { return facet_cells_[f][1] < 0; }
    bool vertex_on_boundary(int v) const { return vertex_boundary_[v]; }

    /// +1 or -1 such that orientation * det(J_K) > 0 for the sorted vertex order.
    int orientation(int k) const { return orientation_[k]; }
    const AffineCellMap& cell_map(int k) const { return maps_[k]; }
    double cell_volume(int k) const { return volumes_[k]; }
    double cell_diameter(int k) const { return diameters_[k]; }
    double cell_inradius(int k) const;
    Vec3 cell_centroid(int k) const;
    Simplex cell_simplex(int k) const;
    double h_max() const;
    double total_volume() const;
    /// Diameter of the vertex cloud (the global length scale of the domain).
    double domain_diameter() const;

    /// Facet geometry: measure, diameter, centroid; unit normal from the
    /// right-hand rule on the sorted vertices (2D: tangent rotated by -pi/2).
    double facet_measure(int f) const;
    double facet_diameter(int f) const;
    Vec3 facet_normal(int f) const;
    /// Outward unit normal of cell k on its local facet `local`.
    Vec3 outward_normal(int k, int local) const;

    static std::array<int, 2> local_edge_vertices(int dim, int local);

private:
    void build_entities();
    void build_geometry();

    int dim_;
    std::vector<Vec3> vertices_;
    std::vector<Cell> cells_;
    std::vector<Cell> refine_order_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::array<int, 6>> cell_edges_;
    std::vector<std::array<int, 4>> cell_faces_;
    std::vector<int> edge_cell_offsets_;
    std::vector<int> edge_cell_list_;
    std::vector<std::array<int, 2>> facet_cells_;
    std::vector<char> edge_boundary_;
    std::vector<char> vertex_boundary_;
    std::vector<int> orientation_;
    std::vector<AffineCellMap> maps_;
    std::vector<double> volumes_;
    std::vector<double> diameters_;
};

/// Kuhn split of (0,1)^3 into 6 n^3 tetrahedra.
SimplicialMesh build_unit_cube_mesh(int n);
/// (0,1)^2 split into 2 n^2 triangles along the (1,1) diagonal.
SimplicialMesh build_unit_square_mesh(int n);
/// (-1,1)^2 minus [0,1) x (-1,0], n subdivisions per unit length.
SimplicialMesh build_lshape_mesh(int n);
/// L-shape x (0,1), Kuhn split of each cube.
SimplicialMesh build_lprism_mesh(int n);
/// (-1,1)^3 minus [0,1)^3.
SimplicialMesh build_fichera_mesh(int n);

/// Named domain builder: "cube", "square", "lshape", "lprism", "fichera".
SimplicialMesh build_domain_mesh(const std::string& name, int n);
std::vector<std::string> domain_names();

/// Red refinement: 4 children per triangle, 8 per tetrahedron (Bey).
SimplicialMesh uniform_refine(const SimplicialMesh& mesh);

enum class PatchKind { Edge, Face };

struct Patch {
    int anchor = -1;
    PatchKind kind = PatchKind::Edge;
    std::vector<int> members; // ascending, includes anchor
};

/// Cells sharing at least one edge with K (T_K^c).
Patch edge_patch(const SimplicialMesh& mesh, int cell);
/// Cells sharing at least one facet with K (T_K^d).
Patch face_patch(const SimplicialMesh& mesh, int cell);

/// max_K h_K / rho_K
double shape_regularity(const SimplicialMesh& mesh);

struct BoundarySummary {
    int boundary_vertices = 0;
    int boundary_edges = 0;
    int boundary_facets = 0;
};
BoundarySummary classify_boundary(const SimplicialMesh& mesh);

/// Legacy ASCII VTK unstructured grid. `cell_vectors` (one per cell) is optional.
void write_vtk(std::ostream& os, const SimplicialMesh& mesh,
               std::span<const Vec3> cell_vectors = {}, const std::string& name = "field");

} // namespace lowreg
