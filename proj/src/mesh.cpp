#include "lowreg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace lowreg {

namespace {

constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 2>, 3> kTriEdges{{{0, 1}, {0, 2}, {1, 2}}};

double factorial(int n)
{
    return n == 3 ? 6.0 : (n == 2 ? 2.0 : 1.0);
}

// Structured block of unit cubes (squares in 2D) of size 1/n, with an
// inclusion predicate on the block index.
SimplicialMesh structured_mesh(int dim, const Vec3& lower, std::array<int, 3> blocks, int n,
                               const std::function<bool(int, int, int)>& keep)
{
    if (n < 1)
        throw InvalidArgument("mesh generator: n must be >= 1");
    const int nx = blocks[0] * n, ny = blocks[1] * n, nz = dim == 3 ? blocks[2] * n : 0;
    const double h = 1.0 / n;
    auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    std::vector<SimplicialMesh::Cell> cells;
    std::vector<char> used(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)), 0);
    for (int k = 0; k < std::max(nz, 1); ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                // block-level inclusion (the predicate sees unit-block indices)
                if (!keep(i / n, j / n, dim == 3 ? k / n : 0))
                    continue;
                if (dim == 2) {
                    const int p0 = vid(i, j, 0), p1 = vid(i + 1, j, 0), p2 = vid(i + 1, j + 1, 0),
                              p3 = vid(i, j + 1, 0);
                    cells.push_back({p0, p1, p2, -1});
                    cells.push_back({p0, p3, p2, -1});
                } else {
                    std::array<int, 3> perm{0, 1, 2};
                    do {
                        std::array<int, 3> c{i, j, k};
                        SimplicialMesh::Cell cell{};
                        cell[0] = vid(c[0], c[1], c[2]);
                        for (int s = 0; s < 3; ++s) {
                            ++c[perm[s]];
                            cell[s + 1] = vid(c[0], c[1], c[2]);
                        }
                        cells.push_back(cell);
                    } while (std::next_permutation(perm.begin(), perm.end()));
                }
            }
        }
    }
    for (const auto& c : cells)
        for (int a = 0; a <= dim; ++a)
            used[c[a]] = 1;

    std::vector<int> remap(used.size(), -1);
    std::vector<Vec3> vertices;
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                const int id = vid(i, j, k);
                if (!used[id])
                    continue;
                remap[id] = static_cast<int>(vertices.size());
                vertices.push_back(lower + Vec3(i * h, j * h, dim == 3 ? k * h : 0.0));
            }
    for (auto& c : cells)
        for (int a = 0; a <= dim; ++a)
            c[a] = remap[c[a]];
    return SimplicialMesh(dim, std::move(vertices), std::move(cells));
}

} // namespace

AffineCellMap::AffineCellMap(int dim, std::span<const Vec3> vertices)
{
    origin = vertices[0];
    jacobian.setIdentity();
    for (int i = 0; i < dim; ++i)
        jacobian.col(i) = vertices[i + 1] - vertices[0];
    det = jacobian.determinant();
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw DegenerateCell("AffineCellMap: singular Jacobian");
    inverse = jacobian.inverse();
    inverse_transpose = inverse.transpose();
}

SimplicialMesh::SimplicialMesh(int dim, std::vector<Vec3> vertices, std::vector<Cell> cells)
    : dim_(dim), vertices_(std::move(vertices)), refine_order_(std::move(cells))
{
    if (dim_ != 2 && dim_ != 3)
        throw InvalidArgument("SimplicialMesh: dim must be 2 or 3");
    if (vertices_.size() >= (std::size_t{1} << 21))
        throw InvalidArgument("SimplicialMesh: too many vertices");
    cells_.resize(refine_order_.size());
    for (std::size_t k = 0; k < refine_order_.size(); ++k) {
        auto& r = refine_order_[k];
        for (int a = dim_ + 1; a < 4; ++a)
            r[a] = -1;
        for (int a = 0; a <= dim_; ++a)
            if (r[a] < 0 || r[a] >= num_vertices())
                throw InvalidArgument("SimplicialMesh: vertex index out of range");
        Cell c = r;
        std::sort(c.begin(), c.begin() + dim_ + 1);
        for (int a = 0; a < dim_; ++a)
            if (c[a] == c[a + 1])
                throw InvalidArgument("SimplicialMesh: repeated vertex in cell");
        cells_[k] = c;
    }
    build_entities();
    build_geometry();
}

std::array<int, 2> SimplicialMesh::local_edge_vertices(int dim, int local)
{
    return dim == 2 ? kTriEdges[local] : kTetEdges[local];
}

void SimplicialMesh::build_entities()
{
    const auto nv = static_cast<std::uint64_t>(num_vertices());
    const int ne_loc = edges_per_cell();
    cell_edges_.assign(cells_.size(), {-1, -1, -1, -1, -1, -1});
    cell_faces_.assign(cells_.size(), {-1, -1, -1, -1});

    std::unordered_map<std::uint64_t, int> edge_ids;
    edge_ids.reserve(cells_.size() * 2);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const auto& c = cells_[k];
        for (int l = 0; l < ne_loc; ++l) {
            const auto [i, j] = local_edge_vertices(dim_, l);
            const std::uint64_t key = c[i] * nv + c[j];
            auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(edges_.size()));
            if (inserted)
                edges_.push_back({c[i], c[j]});
            cell_edges_[k][l] = it->second;
        }
    }

    if (dim_ == 3) {
        std::unordered_map<std::uint64_t, int> face_ids;
        face_ids.reserve(cells_.size() * 3);
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const auto& c = cells_[k];
            for (int l = 0; l < 4; ++l) {
                std::array<int, 3> f{};
                int m = 0;
                for (int a = 0; a < 4; ++a)
                    if (a != l)
                        f[m++] = c[a];
                const std::uint64_t key = (f[0] * nv + f[1]) * nv + f[2];
                auto [it, inserted] = face_ids.try_emplace(key, static_cast<int>(faces_.size()));
                if (inserted)
                    faces_.push_back(f);
                cell_faces_[k][l] = it->second;
            }
        }
    }

    facet_cells_.assign(num_facets(), {-1, -1});
    for (int k = 0; k < num_cells(); ++k) {
        for (int l = 0; l <= dim_; ++l) {
            auto& fc = facet_cells_[cell_facet(k, l)];
            if (fc[0] < 0)
                fc[0] = k;
            else if (fc[1] < 0)
                fc[1] = k;
            else
                throw InvalidArgument("SimplicialMesh: facet shared by more than two cells");
        }
    }

    edge_cell_offsets_.assign(edges_.size() + 1, 0);
    for (const auto& ce : cell_edges_)
        for (int l = 0; l < ne_loc; ++l)
            ++edge_cell_offsets_[ce[l] + 1];
    std::partial_sum(edge_cell_offsets_.begin(), edge_cell_offsets_.end(), edge_cell_offsets_.begin());
    edge_cell_list_.resize(edge_cell_offsets_.back());
    std::vector<int> fill(edge_cell_offsets_.begin(), edge_cell_offsets_.end() - 1);
    for (int k = 0; k < num_cells(); ++k)
        for (int l = 0; l < ne_loc; ++l)
            edge_cell_list_[fill[cell_edges_[k][l]]++] = k;

    edge_boundary_.assign(edges_.size(), 0);
    vertex_boundary_.assign(vertices_.size(), 0);
    for (int f = 0; f < num_facets(); ++f) {
        if (!facet_on_boundary(f))
            continue;
        const auto fv = facet(f);
        for (int a = 0; a < dim_; ++a)
            vertex_boundary_[fv[a]] = 1;
        if (dim_ == 2) {
            edge_boundary_[f] = 1;
        } else {
            const int k = facet_cells_[f][0];
            const int l = local_facet_index(k, f);
            for (int e = 0; e < 6; ++e) {
                const auto [i, j] = kTetEdges[e];
                if (i != l && j != l)
                    edge_boundary_[cell_edges_[k][e]] = 1;
            }
        }
    }
}

void SimplicialMesh::build_geometry()
{
    maps_.resize(cells_.size());
    orientation_.resize(cells_.size());
    volumes_.resize(cells_.size());
    diameters_.resize(cells_.size());
    for (int k = 0; k < num_cells(); ++k) {
        std::array<Vec3, 4> v;
        for (int a = 0; a <= dim_; ++a)
            v[a] = vertices_[cells_[k][a]];
        maps_[k] = AffineCellMap(dim_, std::span<const Vec3>(v.data(), dim_ + 1));
        orientation_[k] = maps_[k].det > 0 ? 1 : -1;
        volumes_[k] = std::abs(maps_[k].det) / factorial(dim_);
        double h = 0.0;
        for (int a = 0; a <= dim_; ++a)
            for (int b = a + 1; b <= dim_; ++b)
                h = std::max(h, (v[a] - v[b]).norm());
        diameters_[k] = h;
    }
}

std::array<int, 3> SimplicialMesh::facet(int f) const
{
    if (dim_ == 2)
        return {edges_[f][0], edges_[f][1], -1};
    return faces_[f];
}

int SimplicialMesh::cell_facet(int k, int local) const
{
    if (dim_ == 3)
        return cell_faces_[k][local];
    // facet opposite vertex `local`: (1,2) (0,2) (0,1) are local edges 2, 1, 0
    return cell_edges_[k][2 - local];
}

std::span<const int> SimplicialMesh::edge_cells(int e) const
{
    return {edge_cell_list_.data() + edge_cell_offsets_[e],
            static_cast<std::size_t>(edge_cell_offsets_[e + 1] - edge_cell_offsets_[e])};
}

int SimplicialMesh::local_facet_index(int k, int f) const
{
    for (int l = 0; l <= dim_; ++l)
        if (cell_facet(k, l) == f)
            return l;
    throw InvalidArgument("local_facet_index: facet not in cell");
}

int SimplicialMesh::local_edge_index(int k, int e) const
{
    for (int l = 0; l < edges_per_cell(); ++l)
        if (cell_edges_[k][l] == e)
            return l;
    throw InvalidArgument("local_edge_index: edge not in cell");
}

double SimplicialMesh::cell_inradius(int k) const
{
    double area = 0.0;
    for (int l = 0; l <= dim_; ++l)
        area += facet_measure(cell_facet(k, l));
    return dim_ * volumes_[k] / area;
}

Vec3 SimplicialMesh::cell_centroid(int k) const
{
    Vec3 c = Vec3::Zero();
    for (int a = 0; a <= dim_; ++a)
        c += vertices_[cells_[k][a]];
    return c / (dim_ + 1);
}

Simplex SimplicialMesh::cell_simplex(int k) const
{
    Simplex s;
    s.dim = dim_;
    for (int a = 0; a <= dim_; ++a)
        s.v[a] = vertices_[cells_[k][a]];
    return s;
}

double SimplicialMesh::h_max() const
{
    return *std::max_element(diameters_.begin(), diameters_.end());
}

double SimplicialMesh::total_volume() const
{
    double s = 0.0;
    for (double v : volumes_)
        s += v;
    return s;
}

double SimplicialMesh::domain_diameter() const
{
    Vec3 lo = vertices_.front(), hi = vertices_.front();
    for (const auto& v : vertices_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

double SimplicialMesh::facet_measure(int f) const
{
    const auto v = facet(f);
    if (dim_ == 2)
        return (vertices_[v[1]] - vertices_[v[0]]).norm();
    return 0.5 * (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).norm();
}

double SimplicialMesh::facet_diameter(int f) const
{
    const auto v = facet(f);
    double h = 0.0;
    for (int a = 0; a < dim_; ++a)
        for (int b = a + 1; b < dim_; ++b)
            h = std::max(h, (vertices_[v[a]] - vertices_[v[b]]).norm());
    return h;
}

Vec3 SimplicialMesh::facet_normal(int f) const
{
    const auto v = facet(f);
    if (dim_ == 2) {
        const Vec3 t = vertices_[v[1]] - vertices_[v[0]];
        return Vec3(t.y(), -t.x(), 0.0).normalized();
    }
    return (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).normalized();
}

Vec3 SimplicialMesh::outward_normal(int k, int local) const
{
    const int f = cell_facet(k, local);
    const Vec3 n = facet_normal(f);
    const Vec3& opposite = vertices_[cells_[k][local]];
    return (opposite - vertices_[facet(f)[0]]).dot(n) > 0 ? Vec3(-n) : n;
}

SimplicialMesh build_unit_cube_mesh(int n)
{
    return structured_mesh(3, Vec3::Zero(), {1, 1, 1}, n, [](int, int, int) { return true; });
}

SimplicialMesh build_unit_square_mesh(int n)
{
    return structured_mesh(2, Vec3::Zero(), {1, 1, 1}, n, [](int, int, int) { return true; });
}

SimplicialMesh build_lshape_mesh(int n)
{
    // block (1,0) is [0,1) x [-1,0)
    return structured_mesh(2, Vec3(-1, -1, 0), {2, 2, 1}, n,
                           [](int i, int j, int) { return !(i == 1 && j == 0); });
}

SimplicialMesh build_lprism_mesh(int n)
{
    return structured_mesh(3, Vec3(-1, -1, 0), {2, 2, 1}, n,
                           [](int i, int j, int) { return !(i == 1 && j == 0); });
}

SimplicialMesh build_fichera_mesh(int n)
{
    return structured_mesh(3, Vec3(-1, -1, -1), {2, 2, 2}, n,
                           [](int i, int j, int k) { return !(i == 1 && j == 1 && k == 1); });
}

SimplicialMesh build_domain_mesh(const std::string& name, int n)
{
    if (name == "cube")
        return build_unit_cube_mesh(n);
    if (name == "square")
        return build_unit_square_mesh(n);
    if (name == "lshape")
        return build_lshape_mesh(n);
    if (name == "lprism")
        return build_lprism_mesh(n);
    if (name == "fichera")
        return build_fichera_mesh(n);
    throw InvalidArgument("unknown domain '" + name + "'");
}

std::vector<std::string> domain_names()
{
    return {"cube", "square", "lshape", "lprism", "fichera"};
}

SimplicialMesh uniform_refine(const SimplicialMesh& mesh)
{
    const int dim = mesh.dim();
    const int nv = mesh.num_vertices();
    std::vector<Vec3> vertices = mesh.vertices();
    vertices.reserve(nv + mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& ed = mesh.edge(e);
        vertices.push_back(0.5 * (mesh.vertex(ed[0]) + mesh.vertex(ed[1])));
    }

    std::vector<SimplicialMesh::Cell> cells;
    cells.reserve(mesh.num_cells() * (dim == 2 ? 4 : 8));
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto& sorted = mesh.cell(k);
        const auto& r = mesh.refinement_order(k);
        auto pos = [&](int v) {
            for (int a = 0; a <= dim; ++a)
                if (sorted[a] == v)
                    return a;
            return -1;
        };
        auto mid = [&](int i, int j) {
            int a = pos(r[i]), b = pos(r[j]);
            if (a > b)
                std::swap(a, b);
            for (int l = 0; l < mesh.edges_per_cell(); ++l) {
                const auto le = SimplicialMesh::local_edge_vertices(dim, l);
                if (le[0] == a && le[1] == b)
                    return nv + mesh.cell_edge(k, l);
            }
            return -1;
        };
        if (dim == 2) {
            const int m01 = mid(0, 1), m02 = mid(0, 2), m12 = mid(1, 2);
            cells.push_back({r[0], m01, m02, -1});
            cells.push_back({m01, r[1], m12, -1});
            cells.push_back({m02, m12, r[2], -1});
            cells.push_back({m01, m02, m12, -1});
        } else {
            const int x01 = mid(0, 1), x02 = mid(0, 2), x03 = mid(0, 3);
            const int x12 = mid(1, 2), x13 = mid(1, 3), x23 = mid(2, 3);
            cells.push_back({r[0], x01, x02, x03});
            cells.push_back({x01, r[1], x12, x13});
            cells.push_back({x02, x12, r[2], x23});
            cells.push_back({x03, x13, x23, r[3]});
            cells.push_back({x01, x02, x03, x13});
            cells.push_back({x01, x02, x12, x13});
            cells.push_back({x02, x03, x13, x23});
            cells.push_back({x02, x12, x13, x23});
        }
    }
    return SimplicialMesh(dim, std::move(vertices), std::move(cells));
}

Patch edge_patch(const SimplicialMesh& mesh, int cell)
{
    if (cell < 0 || cell >= mesh.num_cells())
        throw InvalidArgument("edge_patch: invalid cell id");
    Patch p;
    p.anchor = cell;
    p.kind = PatchKind::Edge;
    for (int l = 0; l < mesh.edges_per_cell(); ++l)
        for (int c : mesh.edge_cells(mesh.cell_edge(cell, l)))
            p.members.push_back(c);
    std::sort(p.members.begin(), p.members.end());
    p.members.erase(std::unique(p.members.begin(), p.members.end()), p.members.end());
    return p;
}

Patch face_patch(const SimplicialMesh& mesh, int cell)
{
    if (cell < 0 || cell >= mesh.num_cells())
        throw InvalidArgument("face_patch: invalid cell id");
    Patch p;
    p.anchor = cell;
    p.kind = PatchKind::Face;
    p.members.push_back(cell);
    for (int l = 0; l < mesh.facets_per_cell(); ++l)
        for (int c : mesh.facet_cells(mesh.cell_facet(cell, l)))
            if (c >= 0 && c != cell)
                p.members.push_back(c);
    std::sort(p.members.begin(), p.members.end());
    return p;
}

double shape_regularity(const SimplicialMesh& mesh)
{
    double ratio = 0.0;
    for (int k = 0; k < mesh.num_cells(); ++k)
        ratio = std::max(ratio, mesh.cell_diameter(k) / mesh.cell_inradius(k));
    return ratio;
}

BoundarySummary classify_boundary(const SimplicialMesh& mesh)
{
    BoundarySummary s;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        s.boundary_vertices += mesh.vertex_on_boundary(v);
    for (int e = 0; e < mesh.num_edges(); ++e)
        s.boundary_edges += mesh.edge_on_boundary(e);
    for (int f = 0; f < mesh.num_facets(); ++f)
        s.boundary_facets += mesh.facet_on_boundary(f);
    return s;
}

void write_vtk(std::ostream& os, const SimplicialMesh& mesh, std::span<const Vec3> cell_vectors,
               const std::string& name)
{
    const int dim = mesh.dim();
    os << "# vtk DataFile Version 3.0\nlowreg mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    os.precision(17);
    for (const auto& v : mesh.vertices())
        os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    os << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() * (dim + 2) << '\n';
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto& c = mesh.cell(k);
        // VTK expects positively oriented cells
        std::array<int, 4> out = c;
        if (mesh.orientation(k) < 0)
            std::swap(out[0], out[1]);
        os << dim + 1;
        for (int a = 0; a <= dim; ++a)
            os << ' ' << out[a];
        os << '\n';
    }
    os << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (int k = 0; k < mesh.num_cells(); ++k)
        os << (dim == 2 ? 5 : 10) << '\n';
    if (!cell_vectors.empty()) {
        if (static_cast<int>(cell_vectors.size()) != mesh.num_cells())
            throw InvalidArgument("write_vtk: one vector per cell expected");
        os << "CELL_DATA " << mesh.num_cells() << "\nVECTORS " << name << " double\n";
        for (const auto& v : cell_vectors)
            os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
}

} // namespace lowreg
