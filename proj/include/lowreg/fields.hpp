#pragma once

#include "lowreg/common.hpp"

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace lowreg {

using VectorFn = std::function<Vec3(const Vec3&)>;
using ScalarFn = std::function<double(const Vec3&)>;
using MatrixFn = std::function<Mat3(const Vec3&)>;

/// Named numeric parameters of a catalog field ("lambda", "dim", "c0", ...).
using FieldParams = std::map<std::string, double>;

enum class SingularLocus { None, Line, Point };

/// Closed-form vector field with regularity metadata. In 2D the curl is the
/// scalar rot v stored in the z component.
struct AnalyticField {
    std::string name;
    int dim = 3;
    VectorFn value;
    VectorFn curl;
    ScalarFn div;
    MatrixFn jacobian;  // J(i,j) = d v_i / d x_j; empty when not provided
    VectorFn curl_curl; // empty when not provided

    double r_star = std::numeric_limits<double>::infinity();
    double q_ok = 2.0;
    bool tangential_trace_zero = false;
    bool normal_trace_zero = false;
    bool curl_free = false;
    bool div_free = false;

    SingularLocus locus = SingularLocus::None;
    Vec3 locus_point = Vec3::Zero();
    Vec3 locus_direction = Vec3::UnitZ();

    bool has_curl() const { return static_cast<bool>(curl); }
    bool has_div() const { return static_cast<bool>(div); }

    /// True when the closed segment [a,b] meets the singular locus.
    bool segment_meets_locus(const Vec3& a, const Vec3& b) const;
    /// True when the closed triangle (a,b,c) meets the singular locus.
    bool triangle_meets_locus(const Vec3& a, const Vec3& b, const Vec3& c) const;
};

/// Catalog lookup. Throws InvalidArgument for unknown names or parameters out of range.
AnalyticField get_field(const std::string& name, const FieldParams& params = {});

struct FieldInfo {
    std::string name;
    std::string description;
};
std::vector<FieldInfo> list_fields();

/// R^T v = (-v_y, v_x): maps 2D Raviart-Thomas data to Nedelec data.
Vec3 rotate_quarter(const Vec3& v);
/// Field rotated by rotate_quarter (2D only); curl and divergence are exchanged.
AnalyticField rotated_field(const AnalyticField& field);

/// C^2 quintic step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
double smooth_step_derivative(double t);

} // namespace lowreg
