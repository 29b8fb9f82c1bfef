#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lowreg {

// All geometry is carried in three components. Two-dimensional meshes and
// fields keep z = 0; a planar curl is stored in the z component.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Raised when a trace functional (edge or face DOF) is requested on an
/// entity that meets the singular locus of a field.
class SingularTrace : public Error {
public:
    using Error::Error;
};

class DegenerateCell : public Error {
public:
    using Error::Error;
};

/// Iterative solver failure. `indefinite` is set when a non-positive
/// curvature direction was met during conjugate gradients.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual, int iterations, bool indefinite)
        : Error(what), residual_(residual), iterations_(iterations), indefinite_(indefinite) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }
    bool indefinite() const { return indefinite_; }

private:
    double residual_;
    int iterations_;
    bool indefinite_;
};

/// Number of OpenMP threads used by the per-cell loops. 0 leaves the runtime default.
void set_num_threads(int n);
int num_threads();

} // namespace lowreg
