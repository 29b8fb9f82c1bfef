#pragma once

#include "lowreg/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace lowreg {

/// Quadrature on the reference simplex {x_i >= 0, sum x_i <= 1} of dimension 1, 2 or 3.
struct QuadratureRule {
    int dim = 0;
    int degree = 0;
    std::vector<Vec3> points;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

/// Measure of the reference simplex: 1, 1/2, 1/6.
double reference_measure(int dim);

/// Rule exact for polynomials of total degree <= `degree` (0..10).
/// Degrees 0-2 use the classical symmetric rules; higher degrees use
/// collapsed-coordinate Gauss-Jacobi products. Returned references stay valid
/// for the program lifetime.
const QuadratureRule& simplex_rule(int dim, int degree);

/// Collapsed Gauss-Jacobi product with `m` points per direction (exact to degree 2m-1).
QuadratureRule conical_rule(int dim, int m);

/// Gauss-Jacobi nodes/weights on [0,1] for the weight t^beta (1-t)^alpha.
struct LineRule {
    std::vector<double> t;
    std::vector<double> w;
};
LineRule gauss_jacobi01(int n, double alpha, double beta);
LineRule gauss_legendre01(int n);

/// A d-simplex given by its d+1 vertices (unused slots ignored).
struct Simplex {
    int dim = 0;
    std::array<Vec3, 4> v{};

    Vec3 map(const Vec3& ref) const;
    double measure() const;
    double diameter() const;
};

enum class Adjacency { Identical, SharedFace, SharedEdge, SharedVertex, Disjoint };

const char* to_string(Adjacency a);

/// Classifies two simplices of equal dimension by their coincident vertices
/// (coordinates compared with a tolerance relative to the larger diameter).
Adjacency classify_adjacency(const Simplex& a, const Simplex& b);

/// Quadrature for double integrals over K_a x K_b. Each node pairs an x point
/// (in K_a) with a y point (in K_b); points are stored once and shared.
struct PairRule {
    struct Node {
        int ix;
        int iy;
        double w;
    };
    Adjacency adjacency = Adjacency::Disjoint;
    std::vector<Vec3> x_points;
    std::vector<Vec3> y_points;
    std::vector<Node> nodes;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const
    {
        double s = 0.0;
        for (const auto& n : nodes)
            s += n.w * f(x_points[n.ix], y_points[n.iy]);
        return s;
    }
};

/// Double-simplex rule for integrands f(x,y) carrying the kernel |x-y|^{-kernel_exponent}.
///
/// Identical pairs: relative coordinates z = y - x over the cones of K - K;
/// the radial variable t of z is integrated by Gauss-Jacobi with the weight
/// that absorbs the kernel. When
/// the kernel alone is not integrable (kernel_exponent >= dim) the integrand is
/// assumed to vanish quadratically at x = y (Slobodeckij numerator).
/// Touching pairs: both cells are subdivided recursively toward the shared
/// entity; non-touching sub-pairs receive tensor rules.
/// Disjoint pairs: tensor product of two collapsed Gauss rules.
/// `level` >= 1 controls all point counts.
PairRule pair_rule(const Simplex& a, const Simplex& b, Adjacency adjacency, int level,
                   double kernel_exponent);

/// Identical-pair rule on the reference simplex (cached). Mapping it to a cell
/// K with affine map F gives nodes (F x, F y) with weights scaled by |det DF|^2.
const PairRule& reference_identical_rule(int dim, int level, double kernel_exponent);

/// Per-dimension default pair level. Smooth integrands come out to about
/// 1e-5 relative for d = 1, 2 and a few 1e-3 for d = 3.
int default_pair_level(int dim);

} // namespace lowreg
