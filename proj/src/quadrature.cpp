#include "lowreg/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace lowreg {

namespace {

constexpr int kMaxDegree = 10;

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

// Golub-Welsch on [-1,1] for the weight (1-x)^a (1+x)^b.
void gauss_jacobi_pm1(int n, double a, double b, std::vector<double>& x, std::vector<double>& w)
{
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        if (k == 0)
            T(0, 0) = (b - a) / (ab + 2.0);
        else
            T(k, k) = (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double beta;
        if (k == 1) {
            beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            const double s = 2.0 * k + ab;
            beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        T(k, k - 1) = T(k - 1, k) = std::sqrt(beta);
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0)
                                - std::lgamma(ab + 2.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    x.resize(n);
    w.resize(n);
    for (int k = 0; k < n; ++k) {
        x[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        w[k] = mu0 * v0 * v0;
    }
}

QuadratureRule symmetric_rule(int dim, int degree)
{
    QuadratureRule q;
    q.dim = dim;
    q.degree = degree;
    if (degree <= 1) {
        q.points.push_back(Vec3::Constant(1.0 / (dim + 1)).cwiseProduct(
            Vec3(1.0, dim >= 2 ? 1.0 : 0.0, dim >= 3 ? 1.0 : 0.0)));
        q.weights.push_back(reference_measure(dim));
        return q;
    }
    // degree 2
    if (dim == 2) {
        const double a = 1.0 / 6.0, b = 2.0 / 3.0;
        q.points = {Vec3(a, a, 0), Vec3(b, a, 0), Vec3(a, b, 0)};
        q.weights.assign(3, 1.0 / 6.0);
    } else {
        const double a = 0.1381966011250105, b = 0.5854101966249685;
        q.points = {Vec3(a, a, a), Vec3(b, a, a), Vec3(a, b, a), Vec3(a, a, b)};
        q.weights.assign(4, 1.0 / 24.0);
    }
    return q;
}

struct RuleTable {
    std::array<std::array<QuadratureRule, kMaxDegree + 1>, 4> rules;

    RuleTable()
    {
        for (int dim = 1; dim <= 3; ++dim) {
            for (int deg = 0; deg <= kMaxDegree; ++deg) {
                if (dim >= 2 && deg <= 2) {
                    rules[dim][deg] = symmetric_rule(dim, deg);
                } else {
                    rules[dim][deg] = conical_rule(dim, std::max(1, (deg + 2) / 2));
                    rules[dim][deg].degree = deg;
                }
            }
        }
    }
};

Simplex sub_simplex(int dim, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d)
{
    Simplex s;
    s.dim = dim;
    s.v = {a, b, c, d};
    return s;
}

// Red refinement (Bey's ordering in 3D).
std::vector<Simplex> subdivide(const Simplex& s)
{
    const auto& v = s.v;
    auto mid = [&](int i, int j) -> Vec3 { return 0.5 * (v[i] + v[j]); };
    std::vector<Simplex> out;
    const Vec3 z = Vec3::Zero();
    if (s.dim == 1) {
        const Vec3 m = mid(0, 1);
        out.push_back(sub_simplex(1, v[0], m, z, z));
        out.push_back(sub_simplex(1, m, v[1], z, z));
    } else if (s.dim == 2) {
        const Vec3 m01 = mid(0, 1), m02 = mid(0, 2), m12 = mid(1, 2);
        out.push_back(sub_simplex(2, v[0], m01, m02, z));
        out.push_back(sub_simplex(2, m01, v[1], m12, z));
        out.push_back(sub_simplex(2, m02, m12, v[2], z));
        out.push_back(sub_simplex(2, m01, m02, m12, z));
    } else {
        const Vec3 x01 = mid(0, 1), x02 = mid(0, 2), x03 = mid(0, 3);
        const Vec3 x12 = mid(1, 2), x13 = mid(1, 3), x23 = mid(2, 3);
        out.push_back(sub_simplex(3, v[0], x01, x02, x03));
        out.push_back(sub_simplex(3, x01, v[1], x12, x13));
        out.push_back(sub_simplex(3, x02, x12, v[2], x23));
        out.push_back(sub_simplex(3, x03, x13, x23, v[3]));
        out.push_back(sub_simplex(3, x01, x02, x03, x13));
        out.push_back(sub_simplex(3, x01, x02, x12, x13));
        out.push_back(sub_simplex(3, x02, x03, x13, x23));
        out.push_back(sub_simplex(3, x02, x12, x13, x23));
    }
    return out;
}

double jacobian_det(const Simplex& s)
{
    return factorial(s.dim) * s.measure();
}

void append_tensor(PairRule& rule, const Simplex& a, const Simplex& b, const QuadratureRule& q)
{
    const int x0 = static_cast<int>(rule.x_points.size());
    const int y0 = static_cast<int>(rule.y_points.size());
    const double ja = jacobian_det(a), jb = jacobian_det(b);
    for (const auto& p : q.points)
        rule.x_points.push_back(a.map(p));
    for (const auto& p : q.points)
        rule.y_points.push_back(b.map(p));
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            rule.nodes.push_back({x0 + static_cast<int>(i), y0 + static_cast<int>(j),
                                  q.weights[i] * ja * q.weights[j] * jb});
}

void append_touching(PairRule& rule, const Simplex& a, const Simplex& b, int depth,
                     const QuadratureRule& q)
{
    const auto ca = subdivide(a);
    const auto cb = subdivide(b);
    for (const auto& sa : ca) {
        for (const auto& sb : cb) {
            const Adjacency adj = classify_adjacency(sa, sb);
            if (adj != Adjacency::Disjoint && depth > 1)
                append_touching(rule, sa, sb, depth - 1, q);
            else
                append_tensor(rule, sa, sb, q);
        }
    }
}

int touching_depth(int dim, int level)
{
    switch (dim) {
    case 1: return level;
    case 2: return std::min(level, 4);
    default: return std::min(level, 2);
    }
}

int touching_points(int dim)
{
    switch (dim) {
    case 1: return 4;
    case 2: return 3;
    default: return 2;
    }
}

QuadratureRule point_or_conical(int dim, int m)
{
    if (dim >= 1)
        return conical_rule(dim, m);
    QuadratureRule r;
    r.points = {Vec3::Zero()};
    r.weights = {1.0};
    return r;
}

// Relative coordinates z = y - x. K - K is the union of cones over the faces
// conv(V_P) - conv(V_N), (P, N) a split of the vertices, and on the cone of
// such a face x = (1-t) xi + t beta, y = (1-t) xi + t alpha with xi in K,
// alpha in conv(V_P), beta in conv(V_N). The only singular factor left is a
// power of t, taken by the Gauss-Jacobi weight.
PairRule build_reference_identical(int dim, int level, double s)
{
    const int m = level + 1;
    const double beta = (s < dim) ? dim - 1.0 - s : dim + 1.0 - s;
    if (beta <= -1.0)
        throw InvalidArgument("pair_rule: kernel exponent too strong for an identical pair");

    std::array<Vec3, 4> ref;
    ref[0] = Vec3::Zero();
    for (int i = 1; i <= 3; ++i)
        ref[i] = (i <= dim) ? Vec3(Vec3::Unit(i - 1)) : Vec3(Vec3::Zero());

    const QuadratureRule cell = conical_rule(dim, m);
    const LineRule radial = gauss_jacobi01(m, dim, beta);

    PairRule rule;
    rule.adjacency = Adjacency::Identical;
    const int nv = dim + 1;
    for (int mask = 1; mask < (1 << nv) - 1; ++mask) {
        std::vector<int> P, N;
        for (int i = 0; i < nv; ++i)
            (mask >> i & 1 ? P : N).push_back(i);
        const int da = static_cast<int>(P.size()) - 1, db = static_cast<int>(N.size()) - 1;
        Mat3 D = Mat3::Identity();
        D.col(0) = ref[P[0]] - ref[N[0]];
        int c = 1;
        for (int k = 1; k <= da; ++k)
            D.col(c++) = ref[P[k]] - ref[P[0]];
        for (int k = 1; k <= db; ++k)
            D.col(c++) = ref[N[0]] - ref[N[k]];
        const double face_jac = std::abs(D.topLeftCorner(dim, dim).determinant());
        const QuadratureRule ra = point_or_conical(da, m), rb = point_or_conical(db, m);

        for (std::size_t ia = 0; ia < ra.size(); ++ia) {
            Vec3 alpha = ref[P[0]];
            for (int k = 1; k <= da; ++k)
                alpha += ra.points[ia][k - 1] * (ref[P[k]] - ref[P[0]]);
            for (std::size_t ib = 0; ib < rb.size(); ++ib) {
                Vec3 bet = ref[N[0]];
                for (int k = 1; k <= db; ++k)
                    bet += rb.points[ib][k - 1] * (ref[N[k]] - ref[N[0]]);
                const double wf = ra.weights[ia] * rb.weights[ib] * face_jac;
                for (std::size_t it = 0; it < radial.t.size(); ++it) {
                    const double t = radial.t[it];
                    const double wt = wf * radial.w[it] * std::pow(t, dim - 1.0 - beta);
                    for (std::size_t ix = 0; ix < cell.size(); ++ix) {
                        const Vec3 xi = cell.points[ix];
                        rule.x_points.push_back((1 - t) * xi + t * bet);
                        rule.y_points.push_back((1 - t) * xi + t * alpha);
                        const int id = static_cast<int>(rule.x_points.size()) - 1;
                        rule.nodes.push_back({id, id, wt * cell.weights[ix]});
                    }
                }
            }
        }
    }
    return rule;
}

} // namespace

double reference_measure(int dim)
{
    return 1.0 / factorial(dim);
}

LineRule gauss_jacobi01(int n, double alpha, double beta)
{
    if (n < 1)
        throw InvalidArgument("gauss_jacobi01: need at least one point");
    if (alpha <= -1.0 || beta <= -1.0)
        throw InvalidArgument("gauss_jacobi01: exponents must exceed -1");
    std::vector<double> x, w;
    // (1-x)^alpha (1+x)^beta on [-1,1]  ->  (1-t)^alpha t^beta on [0,1]
    gauss_jacobi_pm1(n, alpha, beta, x, w);
    const double scale = std::pow(2.0, -(alpha + beta + 1.0));
    LineRule r;
    r.t.resize(n);
    r.w.resize(n);
    for (int k = 0; k < n; ++k) {
        r.t[k] = 0.5 * (1.0 + x[k]);
        r.w[k] = w[k] * scale;
    }
    return r;
}

LineRule gauss_legendre01(int n)
{
    return gauss_jacobi01(n, 0.0, 0.0);
}

QuadratureRule conical_rule(int dim, int m)
{
    QuadratureRule q;
    q.dim = dim;
    q.degree = 2 * m - 1;
    if (dim == 1) {
        const auto g = gauss_legendre01(m);
        for (int i = 0; i < m; ++i) {
            q.points.emplace_back(g.t[i], 0.0, 0.0);
            q.weights.push_back(g.w[i]);
        }
    } else if (dim == 2) {
        const auto gu = gauss_jacobi01(m, 1.0, 0.0);
        const auto gv = gauss_legendre01(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double u = gu.t[i], v = gv.t[j];
                q.points.emplace_back(u, (1.0 - u) * v, 0.0);
                q.weights.push_back(gu.w[i] * gv.w[j]);
            }
    } else if (dim == 3) {
        const auto gu = gauss_jacobi01(m, 2.0, 0.0);
        const auto gv = gauss_jacobi01(m, 1.0, 0.0);
        const auto gw = gauss_legendre01(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    const double u = gu.t[i], v = gv.t[j], w = gw.t[k];
                    q.points.emplace_back(u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * w);
                    q.weights.push_back(gu.w[i] * gv.w[j] * gw.w[k]);
                }
    } else {
        throw InvalidArgument("conical_rule: dim must be 1, 2 or 3");
    }
    return q;
}

const QuadratureRule& simplex_rule(int dim, int degree)
{
    static const RuleTable table;
    if (dim < 1 || dim > 3)
        throw InvalidArgument("simplex_rule: dim must be 1, 2 or 3");
    if (degree < 0 || degree > kMaxDegree)
        throw InvalidArgument("simplex_rule: unsupported degree " + std::to_string(degree));
    return table.rules[dim][degree];
}

Vec3 Simplex::map(const Vec3& ref) const
{
    Vec3 x = v[0];
    for (int i = 0; i < dim; ++i)
        x += ref[i] * (v[i + 1] - v[0]);
    return x;
}

double Simplex::measure() const
{
    if (dim == 1)
        return (v[1] - v[0]).norm();
    if (dim == 2)
        return 0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm();
    return std::abs((v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0]))) / 6.0;
}

double Simplex::diameter() const
{
    double h = 0.0;
    for (int i = 0; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j)
            h = std::max(h, (v[i] - v[j]).norm());
    return h;
}

const char* to_string(Adjacency a)
{
    switch (a) {
    case Adjacency::Identical: return "identical";
    case Adjacency::SharedFace: return "shared_face";
    case Adjacency::SharedEdge: return "shared_edge";
    case Adjacency::SharedVertex: return "shared_vertex";
    case Adjacency::Disjoint: return "disjoint";
    }
    return "?";
}

Adjacency classify_adjacency(const Simplex& a, const Simplex& b)
{
    if (a.dim != b.dim)
        throw InvalidArgument("classify_adjacency: dimension mismatch");
    const double tol = 1e-12 * std::max(a.diameter(), b.diameter());
    int shared = 0;
    for (int i = 0; i <= a.dim; ++i)
        for (int j = 0; j <= b.dim; ++j)
            if ((a.v[i] - b.v[j]).norm() <= tol) {
                ++shared;
                break;
            }
    if (shared == a.dim + 1)
        return Adjacency::Identical;
    switch (shared) {
    case 0: return Adjacency::Disjoint;
    case 1: return Adjacency::SharedVertex;
    case 2: return Adjacency::SharedEdge;
    default: return Adjacency::SharedFace;
    }
}

const PairRule& reference_identical_rule(int dim, int level, double kernel_exponent)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, int, double>, std::unique_ptr<PairRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, level, kernel_exponent}];
    if (!slot)
        slot = std::make_unique<PairRule>(build_reference_identical(dim, level, kernel_exponent));
    return *slot;
}

PairRule pair_rule(const Simplex& a, const Simplex& b, Adjacency adjacency, int level,
                   double kernel_exponent)
{
    if (level < 1)
        throw InvalidArgument("pair_rule: level must be >= 1");
    if (a.dim != b.dim)
        throw InvalidArgument("pair_rule: dimension mismatch");
    const int dim = a.dim;
    PairRule rule;
    rule.adjacency = adjacency;

    if (adjacency == Adjacency::Identical) {
        const PairRule& ref = reference_identical_rule(dim, level, kernel_exponent);
        const double j = jacobian_det(a);
        rule.x_points.reserve(ref.x_points.size());
        rule.y_points.reserve(ref.y_points.size());
        for (const auto& p : ref.x_points)
            rule.x_points.push_back(a.map(p));
        for (const auto& p : ref.y_points)
            rule.y_points.push_back(a.map(p));
        rule.nodes = ref.nodes;
        for (auto& n : rule.nodes)
            n.w *= j * j;
        return rule;
    }
    if (adjacency == Adjacency::Disjoint) {
        append_tensor(rule, a, b, conical_rule(dim, level + 1));
        return rule;
    }
    append_touching(rule, a, b, touching_depth(dim, level), conical_rule(dim, touching_points(dim)));
    return rule;
}

int default_pair_level(int dim)
{
    switch (dim) {
    case 1: return 8;
    case 2: return 4;
    default: return 2;
    }
}

} // namespace lowreg
