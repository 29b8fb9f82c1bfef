#include "lowreg/fields.hpp"

#include <cmath>

namespace lowreg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCutInner = 0.25;
constexpr double kCutOuter = 0.45;

double param(const FieldParams& p, const std::string& key, double fallback)
{
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

int param_dim(const FieldParams& p, int fallback)
{
    const double d = param(p, "dim", fallback);
    if (d != 2.0 && d != 3.0)
        throw InvalidArgument("field parameter 'dim' must be 2 or 3");
    return static_cast<int>(d);
}

Vec3 nan_vec()
{
    return Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
}

// 1 on [0, inner], 0 beyond outer.
double cutoff(double s)
{
    return 1.0 - smooth_step((s - kCutInner) / (kCutOuter - kCutInner));
}

double cutoff_derivative(double s)
{
    return -smooth_step_derivative((s - kCutInner) / (kCutOuter - kCutInner)) / (kCutOuter - kCutInner);
}

// psi = chi(rho) rho^lambda sin(2 theta / 3) around the origin of the xy-plane,
// with theta in (-pi/2, 3pi/2]. Returns psi and its planar gradient.
struct Planar {
    double psi;
    Vec3 grad;
};

Planar corner_power(double x, double y, double lambda)
{
    const double rho = std::hypot(x, y);
    if (rho == 0.0)
        return {0.0, nan_vec()};
    double theta = std::atan2(y, x);
    if (theta <= -kPi / 2)
        theta += 2 * kPi;
    const double s = std::sin(2 * theta / 3), ds = (2.0 / 3.0) * std::cos(2 * theta / 3);
    const double chi = cutoff(rho), dchi = cutoff_derivative(rho);
    const double rl = std::pow(rho, lambda);
    const double g = chi * rl;
    const double dg = dchi * rl + chi * lambda * rl / rho;
    const double c = x / rho, sn = y / rho;
    const Vec3 e_rho(c, sn, 0.0), e_theta(-sn, c, 0.0);
    return {g * s, dg * s * e_rho + (g / rho) * ds * e_theta};
}

void validate_lambda(double lambda)
{
    if (!(lambda > 0.0 && lambda < 1.0))
        throw InvalidArgument("field parameter 'lambda' must lie in (0,1)");
}

Vec3 grad_power_line_value(const Vec3& x, double lambda)
{
    const auto pl = corner_power(x.x(), x.y(), lambda);
    const double dz = x.z() - 0.5;
    const double zeta = cutoff(std::abs(dz));
    const double dzeta = cutoff_derivative(std::abs(dz)) * (dz < 0 ? -1.0 : 1.0);
    Vec3 v = zeta * pl.grad;
    v.z() = pl.psi * dzeta;
    return v;
}

AnalyticField make_grad_power_line(double lambda)
{
    validate_lambda(lambda);
    AnalyticField f;
    f.name = "grad_power_line";
    f.dim = 3;
    f.value = [lambda](const Vec3& x) { return grad_power_line_value(x, lambda); };
    f.curl = [](const Vec3&) { return Vec3::Zero().eval(); };
    f.r_star = lambda;
    f.q_ok = 2.0;
    f.tangential_trace_zero = true;
    f.curl_free = true;
    f.locus = SingularLocus::Line;
    f.locus_point = Vec3::Zero();
    f.locus_direction = Vec3::UnitZ();
    return f;
}

// b = xy(1-x^2)(1-y^2) z(1-z), vanishing on every plane bounding the L-prism.
double bump(const Vec3& p)
{
    const double x = p.x(), y = p.y(), z = p.z();
    return x * y * (1 - x * x) * (1 - y * y) * z * (1 - z);
}

Vec3 bump_gradient(const Vec3& p)
{
    const double x = p.x(), y = p.y(), z = p.z();
    const double X = x * (1 - x * x), Y = y * (1 - y * y), Z = z * (1 - z);
    return {(1 - 3 * x * x) * Y * Z, X * (1 - 3 * y * y) * Z, X * Y * (1 - 2 * z)};
}

Vec3 bump_curl_curl(const Vec3& p)
{
    // curl curl (b e_z) = grad(db/dz) - (laplace b) e_z
    const double x = p.x(), y = p.y(), z = p.z();
    const double X = x * (1 - x * x), Y = y * (1 - y * y), Z = z * (1 - z);
    const double dX = 1 - 3 * x * x, dY = 1 - 3 * y * y, dZ = 1 - 2 * z;
    const double ddX = -6 * x, ddY = -6 * y, ddZ = -2.0;
    const Vec3 grad_bz(dX * Y * dZ, X * dY * dZ, X * Y * ddZ);
    const double lap = ddX * Y * Z + X * ddY * Z + X * Y * ddZ;
    return grad_bz - Vec3(0, 0, lap);
}

AnalyticField make_smooth_trig(int dim)
{
    AnalyticField f;
    f.name = "smooth_trig";
    f.dim = dim;
    f.r_star = std::numeric_limits<double>::infinity();
    f.tangential_trace_zero = true;
    f.div_free = true;
    f.div = [](const Vec3&) { return 0.0; };
    if (dim == 3) {
        f.value = [](const Vec3& p) {
            const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y()), sz = std::sin(kPi * p.z());
            return Vec3(sy * sz, sx * sz, sx * sy);
        };
        f.curl = [](const Vec3& p) {
            const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y()), sz = std::sin(kPi * p.z());
            const double cx = std::cos(kPi * p.x()), cy = std::cos(kPi * p.y()), cz = std::cos(kPi * p.z());
            return Vec3(kPi * sx * (cy - cz), kPi * sy * (cz - cx), kPi * sz * (cx - cy));
        };
        f.jacobian = [](const Vec3& p) {
            const double sx = std::sin(kPi * p.x()), sy = std::sin(kPi * p.y()), sz = std::sin(kPi * p.z());
            const double cx = std::cos(kPi * p.x()), cy = std::cos(kPi * p.y()), cz = std::cos(kPi * p.z());
            Mat3 J;
            J << 0, cy * sz, sy * cz, cx * sz, 0, sx * cz, cx * sy, sx * cy, 0;
            return Mat3(kPi * J);
        };
        f.curl_curl = [v = f.value](const Vec3& p) { return Vec3(2 * kPi * kPi * v(p)); };
    } else {
        f.value = [](const Vec3& p) { return Vec3(std::sin(kPi * p.y()), std::sin(kPi * p.x()), 0.0); };
        f.curl = [](const Vec3& p) {
            return Vec3(0, 0, kPi * (std::cos(kPi * p.x()) - std::cos(kPi * p.y())));
        };
        f.jacobian = [](const Vec3& p) {
            Mat3 J = Mat3::Zero();
            J(0, 1) = kPi * std::cos(kPi * p.y());
            J(1, 0) = kPi * std::cos(kPi * p.x());
            return J;
        };
        f.curl_curl = [v = f.value](const Vec3& p) { return Vec3(kPi * kPi * v(p)); };
    }
    return f;
}

} // namespace

double smooth_step(double t)
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smooth_step_derivative(double t)
{
    if (t <= 0.0 || t >= 1.0)
        return 0.0;
    return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

Vec3 rotate_quarter(const Vec3& v)
{
    return {-v.y(), v.x(), 0.0};
}

AnalyticField rotated_field(const AnalyticField& field)
{
    if (field.dim != 2)
        throw InvalidArgument("rotated_field: 2D fields only");
    AnalyticField g = field;
    g.name = field.name + "_rotated";
    g.value = [v = field.value](const Vec3& x) { return rotate_quarter(v(x)); };
    g.curl = field.div ? VectorFn([d = field.div](const Vec3& x) { return Vec3(0, 0, d(x)); }) : VectorFn();
    g.div = field.curl ? ScalarFn([c = field.curl](const Vec3& x) { return -c(x).z(); }) : ScalarFn();
    if (field.jacobian) {
        g.jacobian = [J = field.jacobian](const Vec3& x) {
            const Mat3 a = J(x);
            Mat3 r = Mat3::Zero();
            r.row(0) = -a.row(1);
            r.row(1) = a.row(0);
            return r;
        };
    }
    g.curl_curl = nullptr;
    std::swap(g.tangential_trace_zero, g.normal_trace_zero);
    std::swap(g.curl_free, g.div_free);
    return g;
}

bool AnalyticField::segment_meets_locus(const Vec3& a, const Vec3& b) const
{
    if (locus == SingularLocus::None)
        return false;
    const double scale = std::max({1.0, a.norm(), b.norm()});
    const double tol = 1e-12 * scale;
    Vec3 pa = a - locus_point, pb = b - locus_point;
    if (locus == SingularLocus::Line) {
        const Vec3 d = locus_direction.normalized();
        pa -= pa.dot(d) * d;
        pb -= pb.dot(d) * d;
    }
    const Vec3 e = pb - pa;
    const double len2 = e.squaredNorm();
    const double t = len2 > 0 ? std::clamp(-pa.dot(e) / len2, 0.0, 1.0) : 0.0;
    return (pa + t * e).norm() <= tol;
}

bool AnalyticField::triangle_meets_locus(const Vec3& a, const Vec3& b, const Vec3& c) const
{
    if (locus == SingularLocus::None)
        return false;
    if (segment_meets_locus(a, b) || segment_meets_locus(b, c) || segment_meets_locus(a, c))
        return true;
    const double scale = std::max({1.0, a.norm(), b.norm(), c.norm()});
    const double tol = 1e-12 * scale;
    Vec3 pa = a - locus_point, pb = b - locus_point, pc = c - locus_point;
    if (locus == SingularLocus::Line) {
        // project along the line: the locus becomes the origin of a plane
        const Vec3 d = locus_direction.normalized();
        pa -= pa.dot(d) * d;
        pb -= pb.dot(d) * d;
        pc -= pc.dot(d) * d;
    } else {
        const Vec3 n = (pb - pa).cross(pc - pa);
        if (n.norm() == 0.0)
            return false;
        if (std::abs(pa.dot(n.normalized())) > tol)
            return false;
    }
    const Vec3 n = (pb - pa).cross(pc - pa);
    const double area2 = n.squaredNorm();
    if (area2 <= tol * tol)
        return false;
    // barycentric test of the origin
    const double l0 = pb.cross(pc).dot(n), l1 = pc.cross(pa).dot(n), l2 = pa.cross(pb).dot(n);
    return l0 >= 0 && l1 >= 0 && l2 >= 0;
}

AnalyticField get_field(const std::string& name, const FieldParams& params)
{
    if (name == "constant") {
        const int dim = param_dim(params, 3);
        const Vec3 c(param(params, "c0", 1.0), param(params, "c1", 1.0), dim == 3 ? param(params, "c2", 1.0) : 0.0);
        AnalyticField f;
        f.name = name;
        f.dim = dim;
        f.value = [c](const Vec3&) { return c; };
        f.curl = [](const Vec3&) { return Vec3::Zero().eval(); };
        f.div = [](const Vec3&) { return 0.0; };
        f.jacobian = [](const Vec3&) { return Mat3::Zero().eval(); };
        f.curl_curl = [](const Vec3&) { return Vec3::Zero().eval(); };
        f.curl_free = f.div_free = true;
        f.tangential_trace_zero = f.normal_trace_zero = c.isZero(0.0);
        return f;
    }
    if (name == "linear_non_nedelec") {
        const int dim = param_dim(params, 3);
        AnalyticField f;
        f.name = name;
        f.dim = dim;
        f.value = [dim](const Vec3& x) { return dim == 3 ? x : Vec3(x.x(), x.y(), 0.0); };
        f.curl = [](const Vec3&) { return Vec3::Zero().eval(); };
        f.div = [dim](const Vec3&) { return static_cast<double>(dim); };
        f.jacobian = [dim](const Vec3&) {
            Mat3 J = Mat3::Identity();
            if (dim == 2)
                J(2, 2) = 0.0;
            return J;
        };
        f.curl_curl = [](const Vec3&) { return Vec3::Zero().eval(); };
        f.curl_free = true;
        return f;
    }
    if (name == "smooth_trig")
        return make_smooth_trig(param_dim(params, 3));
    if (name == "shear_trig") {
        AnalyticField f;
        f.name = name;
        f.dim = 3;
        f.value = [](const Vec3& p) { return Vec3(std::sin(kPi * p.y()) * std::sin(kPi * p.z()), 0, 0); };
        f.curl = [](const Vec3& p) {
            return Vec3(0, kPi * std::sin(kPi * p.y()) * std::cos(kPi * p.z()),
                        -kPi * std::cos(kPi * p.y()) * std::sin(kPi * p.z()));
        };
        f.div = [](const Vec3&) { return 0.0; };
        f.jacobian = [](const Vec3& p) {
            Mat3 J = Mat3::Zero();
            J(0, 1) = kPi * std::cos(kPi * p.y()) * std::sin(kPi * p.z());
            J(0, 2) = kPi * std::sin(kPi * p.y()) * std::cos(kPi * p.z());
            return J;
        };
        f.curl_curl = [v = f.value](const Vec3& p) { return Vec3(2 * kPi * kPi * v(p)); };
        f.tangential_trace_zero = true;
        f.div_free = true;
        return f;
    }
    if (name == "grad_power_line")
        return make_grad_power_line(param(params, "lambda", 0.3));
    if (name == "mixed_singular") {
        AnalyticField f = make_grad_power_line(param(params, "lambda", 0.3));
        f.name = name;
        f.value = [g = f.value](const Vec3& x) { return Vec3(g(x) + Vec3(0, 0, bump(x))); };
        f.curl = [](const Vec3& x) {
            const Vec3 gb = bump_gradient(x);
            return Vec3(gb.y(), -gb.x(), 0.0);
        };
        f.curl_curl = [](const Vec3& x) { return bump_curl_curl(x); };
        f.curl_free = false;
        return f;
    }
    if (name == "lshape_grad" || name == "lshape_rot") {
        const double lambda = param(params, "lambda", 2.0 / 3.0);
        validate_lambda(lambda);
        AnalyticField f;
        f.name = name;
        f.dim = 2;
        f.r_star = lambda;
        f.locus = SingularLocus::Point;
        f.locus_point = Vec3::Zero();
        if (name == "lshape_grad") {
            f.value = [lambda](const Vec3& x) { return corner_power(x.x(), x.y(), lambda).grad; };
            f.curl = [](const Vec3&) { return Vec3::Zero().eval(); };
            f.curl_free = true;
            f.tangential_trace_zero = true;
        } else {
            f.value = [lambda](const Vec3& x) {
                const Vec3 g = corner_power(x.x(), x.y(), lambda).grad;
                return Vec3(g.y(), -g.x(), 0.0);
            };
            f.div = [](const Vec3&) { return 0.0; };
            f.div_free = true;
            f.normal_trace_zero = true;
        }
        return f;
    }
    throw InvalidArgument("unknown field '" + name + "'");
}

std::vector<FieldInfo> list_fields()
{
    return {
        {"constant", "constant vector (c0,c1,c2), default (1,1,1); params dim, c0, c1, c2"},
        {"linear_non_nedelec", "v = x, outside the lowest-order Nedelec space; param dim"},
        {"smooth_trig", "(sin pi y sin pi z, sin pi x sin pi z, sin pi x sin pi y), zero tangential trace on the unit cube; dim=2 gives (sin pi y, sin pi x)"},
        {"shear_trig", "(sin pi y sin pi z, 0, 0), zero tangential trace on the unit cube"},
        {"grad_power_line", "gradient of a cut-off corner power rho^lambda sin(2 theta/3) along the re-entrant edge of the L-prism; param lambda in (0,1), default 0.3"},
        {"mixed_singular", "grad_power_line plus a smooth non-gradient part along z; param lambda"},
        {"lshape_grad", "2D gradient of rho^lambda sin(2 theta/3) at the re-entrant L-shape corner; param lambda, default 2/3"},
        {"lshape_rot", "2D rotated gradient of the same potential: divergence-free with zero normal trace; param lambda"},
    };
}

} // namespace lowreg
