#include "lowreg/interpolation.hpp"
#include "lowreg/norms.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

using namespace lowreg;

namespace {

AnalyticField affine_field(const std::string& name, int dim, const VectorFn& v)
{
    AnalyticField f;
    f.name = name;
    f.dim = dim;
    f.value = v;
    return f;
}

// a + b x x lies in the lowest-order Nedelec space, a + c x in RT0
AnalyticField nedelec_member(int dim)
{
    const Vec3 a(0.3, -0.7, dim == 3 ? 0.2 : 0.0);
    const Vec3 b = dim == 3 ? Vec3(0.5, 1.1, -0.4) : Vec3(0, 0, 0.9);
    return affine_field("ned", dim, [a, b](const Vec3& x) { return Vec3(a + b.cross(x)); });
}

AnalyticField rt_member(int dim)
{
    const Vec3 a(0.3, -0.7, dim == 3 ? 0.2 : 0.0);
    return affine_field("rt", dim, [a](const Vec3& x) { return Vec3(a + 1.7 * x); });
}

double max_l2_error(const SimplicialMesh& m, const AnalyticField& f, const FEFunction& u)
{
    double e = 0.0;
    for (int k = 0; k < m.num_cells(); ++k)
        e = std::max(e, l2_error_cell(f, u, k));
    return e;
}

FEFunction random_function(const SimplicialMesh& m, Family f, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    FEFunction v(m, f);
    for (int i = 0; i < v.coeffs.size(); ++i)
        v.coeffs[i] = u(rng);
    return v;
}

} // namespace

TEST(Canonical, ReproducesSpaceMembers)
{
    for (const auto& m : {build_lprism_mesh(1), build_lshape_mesh(2)}) {
        const AnalyticField ned = nedelec_member(m.dim());
        const AnalyticField rt = rt_member(m.dim());
        EXPECT_LT(max_l2_error(m, ned, canonical_interpolate(m, Family::Nedelec0, ned)), 1e-13);
        EXPECT_LT(max_l2_error(m, rt, canonical_interpolate(m, Family::RT0, rt)), 1e-13);
        EXPECT_LT(max_l2_error(m, ned, quasi_interpolate(m, Family::Nedelec0, ned, false)), 1e-12);
        EXPECT_LT(max_l2_error(m, rt, quasi_interpolate(m, Family::RT0, rt, false)), 1e-12);
    }
}

TEST(Canonical, RefusesEntitiesOnTheSingularLine)
{
    const SimplicialMesh m = build_lprism_mesh(1);
    EXPECT_THROW(canonical_interpolate(m, Family::Nedelec0, get_field("grad_power_line")), SingularTrace);
    EXPECT_NO_THROW(quasi_interpolate(m, Family::Nedelec0, get_field("grad_power_line"), true));
}

TEST(BrokenProjection, MatchesDenseOracle)
{
    // Whitney functions built from barycentric gradients of the physical cell
    const std::array<Vec3, 4> P = {Vec3(0.1, 0.0, 0.2), Vec3(1.3, 0.2, 0.1), Vec3(0.3, 0.9, -0.2),
                                   Vec3(0.2, 0.4, 1.1)};
    const SimplicialMesh m(3, {P.begin(), P.end()}, {{0, 1, 2, 3}});
    Mat3 E;
    for (int c = 0; c < 3; ++c)
        E.col(c) = P[c + 1] - P[0];
    const Mat3 G = E.inverse().transpose(); // columns: grad lambda_1..3
    std::array<Vec3, 4> grad;
    grad[1] = G.col(0);
    grad[2] = G.col(1);
    grad[3] = G.col(2);
    grad[0] = -(grad[1] + grad[2] + grad[3]);
    const VectorFn v = [](const Vec3& x) { return Vec3(x.x() * x.x(), x.y() * x.z(), std::sin(x.x() + x.z())); };

    const QuadratureRule& rule = simplex_rule(3, 8);
    const double vol = std::abs(E.determinant());
    Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3& xi = rule.points[q];
        const std::array<double, 4> lam = {1 - xi.sum(), xi[0], xi[1], xi[2]};
        std::array<Vec3, 6> phi;
        for (int e = 0; e < 6; ++e) {
            const auto ij = SimplicialMesh::local_edge_vertices(3, e);
            phi[e] = lam[ij[0]] * grad[ij[1]] - lam[ij[1]] * grad[ij[0]];
        }
        const Vec3 x = P[0] + E * xi;
        for (int i = 0; i < 6; ++i) {
            b[i] += rule.weights[q] * vol * v(x).dot(phi[i]);
            for (int j = 0; j < 6; ++j)
                M(i, j) += rule.weights[q] * vol * phi[i].dot(phi[j]);
        }
    }
    const Eigen::Matrix<double, 6, 1> oracle = M.fullPivLu().solve(b);
    const BrokenFEFunction u = broken_project(m, Family::Nedelec0, v, {8});
    for (int i = 0; i < 6; ++i)
        EXPECT_NEAR(u.coeffs(0, i), oracle[i], 1e-10) << i;
}

TEST(Averaging, HandComputedTwoTriangles)
{
    const SimplicialMesh m = build_unit_square_mesh(1);
    ASSERT_EQ(m.num_cells(), 2);
    BrokenFEFunction broken(m, Family::Nedelec0);
    broken.coeffs << 1, 2, 3, 4, 5, 6;
    int shared = -1;
    for (int e = 0; e < m.num_edges(); ++e)
        if (!m.edge_on_boundary(e))
            shared = e;
    ASSERT_GE(shared, 0);
    const double expect_shared = 0.5 * (broken.coeffs(0, m.local_edge_index(0, shared)) +
                                        broken.coeffs(1, m.local_edge_index(1, shared)));
    const FEFunction plain = average_dofs(broken, false);
    const FEFunction zero = average_dofs(broken, true);
    EXPECT_DOUBLE_EQ(plain.coeffs[shared], expect_shared);
    EXPECT_DOUBLE_EQ(zero.coeffs[shared], expect_shared);
    for (int e = 0; e < m.num_edges(); ++e) {
        if (e == shared)
            continue;
        const int k = m.edge_cells(e)[0];
        EXPECT_DOUBLE_EQ(plain.coeffs[e], broken.coeffs(k, m.local_edge_index(k, e)));
        EXPECT_EQ(zero.coeffs[e], 0.0);
    }
}

TEST(Averaging, ProjectionInvariance)
{
    for (const auto& m : {build_unit_cube_mesh(2), build_lshape_mesh(2)})
        for (Family f : {Family::Nedelec0, Family::RT0}) {
            const FEFunction v = random_function(m, f, 11);
            const FEFunction w = average_dofs(broken_project(v, f), false);
            EXPECT_LT((w.coeffs - v.coeffs).lpNorm<Eigen::Infinity>(), 1e-12);
        }
}

TEST(QuasiInterpolation, ConformingAndZeroBoundary)
{
    const SimplicialMesh m = build_lprism_mesh(1);
    const AnalyticField f = get_field("grad_power_line");
    const FEFunction ned = quasi_interpolate(m, Family::Nedelec0, f, true);
    const FEFunction rt = quasi_interpolate(m, Family::RT0, f, true);
    for (int g = 0; g < m.num_edges(); ++g)
        if (m.edge_on_boundary(g))
            EXPECT_EQ(ned.coeffs[g], 0.0);
    for (int face = 0; face < m.num_faces(); ++face) {
        if (m.facet_on_boundary(face)) {
            EXPECT_EQ(rt.coeffs[face], 0.0);
            EXPECT_LT(jump_norm_face(ned, face), 1e-12);
            EXPECT_LT(jump_norm_face(rt, face), 1e-12);
        } else {
            EXPECT_LT(jump_norm_face(ned, face), 1e-11);
            EXPECT_LT(jump_norm_face(rt, face), 1e-11);
        }
    }
    // the broken projection itself is not conforming
    const BrokenFEFunction b = broken_project(m, Family::Nedelec0, f);
    double jumps = 0.0;
    for (int face = 0; face < m.num_faces(); ++face)
        if (!m.facet_on_boundary(face))
            jumps += jump_norm_face(b, face);
    EXPECT_GT(jumps, 1e-3);
}

TEST(Rotation, RtQuasiMatchesRotatedNedelec)
{
    const SimplicialMesh m = build_lshape_mesh(3);
    for (const char* name : {"smooth_trig", "lshape_grad", "lshape_rot"}) {
        FieldParams p;
        if (std::string(name) == "smooth_trig")
            p["dim"] = 2;
        const AnalyticField v = get_field(name, p);
        const FEFunction rt = quasi_interpolate(m, Family::RT0, v, false);
        const FEFunction ned = quasi_interpolate(m, Family::Nedelec0, rotated_field(v), false);
        EXPECT_LT((rt.coeffs - ned.coeffs).lpNorm<Eigen::Infinity>(), 1e-12) << name;
        for (int k = 0; k < m.num_cells(); k += 5) {
            const Vec3 xhat(0.2, 0.3, 0);
            EXPECT_LT((rotate_quarter(rt.eval(k, xhat).value) - ned.eval(k, xhat).value).norm(), 1e-12);
        }
    }
}

TEST(BestApproximation, GalerkinOrthogonality)
{
    const SimplicialMesh m = build_unit_cube_mesh(2);
    const AnalyticField f = get_field("smooth_trig");
    const FEFunction u = best_approximation_l2(m, Family::Nedelec0, f, false, {6, 1e-13});
    auto err_sq = [&](const FEFunction& w) {
        double s = 0.0;
        for (int k = 0; k < m.num_cells(); ++k)
            s += std::pow(l2_error_cell(f, w, k), 2);
        return s;
    };
    const double e0 = err_sq(u);
    const FEFunction d = random_function(m, Family::Nedelec0, 5);
    double dn = 0.0;
    {
        const AnalyticField zero = affine_field("zero", 3, [](const Vec3&) { return Vec3::Zero(); });
        for (int k = 0; k < m.num_cells(); ++k)
            dn += std::pow(l2_error_cell(zero, d, k), 2);
    }
    for (double eps : {1e-2, -1e-2}) {
        FEFunction w = u;
        w.coeffs += eps * d.coeffs;
        // ||v - u - eps d||^2 = ||v - u||^2 + eps^2 ||d||^2 when v - u is orthogonal to d
        EXPECT_NEAR(err_sq(w), e0 + eps * eps * dn, 1e-9);
    }
    const FEFunction quasi = quasi_interpolate(m, Family::Nedelec0, f, false);
    EXPECT_LE(e0, err_sq(quasi));
}

TEST(BestApproximation, ZeroBoundaryReproducesInteriorMembers)
{
    const SimplicialMesh m = build_unit_cube_mesh(2);
    FEFunction v = random_function(m, Family::Nedelec0, 3);
    for (int e = 0; e < m.num_edges(); ++e)
        if (m.edge_on_boundary(e))
            v.coeffs[e] = 0.0;
    const VectorFn g = [&](const Vec3& x) {
        for (int k = 0; k < m.num_cells(); ++k) {
            const Vec3 xi = m.cell_map(k).to_reference(x);
            if (xi.minCoeff() >= -1e-12 && xi.sum() <= 1 + 1e-12)
                return v.eval(k, xi).value;
        }
        return Vec3(Vec3::Zero());
    };
    // quadrature points are interior, so point location is unambiguous
    const FEFunction u = best_approximation_l2(m, Family::Nedelec0, g, true, {4, 1e-14});
    EXPECT_LT((u.coeffs - v.coeffs).lpNorm<Eigen::Infinity>(), 1e-9);
}
