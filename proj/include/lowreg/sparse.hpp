#pragma once

#include "lowreg/common.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace lowreg {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Stops when the residual falls
/// below `tol` relative to |b|. Throws SolverError on a non-positive curvature
/// direction (indefinite flag set) or when `max_iterations` is exhausted.
CgResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            double tol, int max_iterations);

/// Smallest eigenvalue of a symmetric matrix by dense factorization.
double min_eigenvalue(const SparseMatrix& A);

} // namespace lowreg
