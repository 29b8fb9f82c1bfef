#include "lowreg/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lowreg;

namespace {

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

// int over the reference simplex of x^a y^b z^c
double monomial_integral(int dim, int a, int b, int c)
{
    return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + dim);
}

Simplex interval(double a, double b)
{
    Simplex s;
    s.dim = 1;
    s.v[0] = Vec3(a, 0, 0);
    s.v[1] = Vec3(b, 0, 0);
    return s;
}

double pair_sum(const PairRule& rule, double s)
{
    double sum = 0.0;
    for (const auto& n : rule.nodes)
        sum += n.w / std::pow((rule.x_points[n.ix] - rule.y_points[n.iy]).norm(), s);
    return sum;
}

} // namespace

TEST(SimplexRule, ReferenceMeasure)
{
    EXPECT_DOUBLE_EQ(reference_measure(1), 1.0);
    EXPECT_DOUBLE_EQ(reference_measure(2), 0.5);
    EXPECT_DOUBLE_EQ(reference_measure(3), 1.0 / 6.0);
}

TEST(SimplexRule, IntegratesMonomialsExactly)
{
    for (int dim = 1; dim <= 3; ++dim)
        for (int deg = 0; deg <= 10; ++deg) {
            const QuadratureRule& rule = simplex_rule(dim, deg);
            for (int a = 0; a <= deg; ++a)
                for (int b = 0; a + b <= deg && (dim >= 2 || b == 0); ++b)
                    for (int c = 0; a + b + c <= deg && (dim == 3 || c == 0); ++c) {
                        double s = 0.0;
                        for (std::size_t q = 0; q < rule.size(); ++q) {
                            const Vec3& x = rule.points[q];
                            s += rule.weights[q] * std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
                        }
                        EXPECT_NEAR(s, monomial_integral(dim, a, b, c), 1e-14)
                            << "dim " << dim << " deg " << deg << " (" << a << b << c << ")";
                    }
        }
}

TEST(SimplexRule, PointsInsideAndPositiveWeights)
{
    for (int dim = 1; dim <= 3; ++dim)
        for (int deg = 0; deg <= 10; ++deg)
            for (std::size_t q = 0; q < simplex_rule(dim, deg).size(); ++q) {
                const auto& r = simplex_rule(dim, deg);
                EXPECT_GT(r.weights[q], 0.0);
                EXPECT_GE(r.points[q].minCoeff(), -1e-15);
                EXPECT_LE(r.points[q].sum(), 1.0 + 1e-15);
            }
}

TEST(SimplexRule, RejectsBadDegree)
{
    EXPECT_THROW(simplex_rule(3, 11), InvalidArgument);
    EXPECT_THROW(simplex_rule(4, 2), InvalidArgument);
}

TEST(GaussJacobi, MatchesBetaIntegrals)
{
    // int_0^1 t^(beta+k) (1-t)^alpha = B(beta+k+1, alpha+1)
    const double alpha = 0.5, beta = 2.0;
    const LineRule r = gauss_jacobi01(6, alpha, beta);
    for (int k = 0; k <= 11; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.t.size(); ++i)
            s += r.w[i] * std::pow(r.t[i], k);
        const double exact = std::tgamma(beta + k + 1) * std::tgamma(alpha + 1) / std::tgamma(alpha + beta + k + 2);
        EXPECT_NEAR(s, exact, 1e-13) << k;
    }
}

TEST(Adjacency, Classification)
{
    EXPECT_EQ(classify_adjacency(interval(0, 1), interval(0, 1)), Adjacency::Identical);
    EXPECT_EQ(classify_adjacency(interval(0, 1), interval(1, 2)), Adjacency::SharedVertex);
    EXPECT_EQ(classify_adjacency(interval(0, 1), interval(2, 3)), Adjacency::Disjoint);

    Simplex a, b;
    a.dim = b.dim = 3;
    a.v = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    b.v = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1)};
    EXPECT_EQ(classify_adjacency(a, b), Adjacency::SharedFace);
    b.v = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0), Vec3(1, 1, -1)};
    EXPECT_EQ(classify_adjacency(a, b), Adjacency::SharedEdge);
    b.v = {Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(1, 1, 0), Vec3(1, 0, -1)};
    EXPECT_EQ(classify_adjacency(a, b), Adjacency::SharedVertex);
}

TEST(PairRule, DisjointIntervals)
{
    // int_0^1 int_2^3 (y-x)^(-3/2) dy dx
    const double exact = 4.0 * (2.0 * std::sqrt(2.0) - 1.0 - std::sqrt(3.0));
    const PairRule rule = pair_rule(interval(0, 1), interval(2, 3), Adjacency::Disjoint, 8, 1.5);
    EXPECT_NEAR(pair_sum(rule, 1.5), exact, 1e-10);
}

TEST(PairRule, TouchingIntervalsWeaklySingular)
{
    // int_0^1 int_1^2 (y-x)^(-1/2) dy dx
    const double exact = 4.0 / 3.0 * (2.0 * std::sqrt(2.0) - 2.0);
    const PairRule rule = pair_rule(interval(0, 1), interval(1, 2), Adjacency::SharedVertex, 8, 0.5);
    EXPECT_NEAR(pair_sum(rule, 0.5), exact, 1e-4 * exact);
}

TEST(PairRule, IdenticalWeightsSumToSquaredMeasure)
{
    for (int dim = 1; dim <= 3; ++dim) {
        const PairRule& rule = reference_identical_rule(dim, default_pair_level(dim), dim + 1.0);
        double s = 0.0;
        for (const auto& n : rule.nodes)
            s += n.w;
        EXPECT_NEAR(s, reference_measure(dim) * reference_measure(dim), 1e-12) << dim;
    }
}
