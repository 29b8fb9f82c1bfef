#include "lowreg/sparse.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <omp.h>

namespace lowreg {

void set_num_threads(int n)
{
    if (n > 0)
        omp_set_num_threads(n);
}

int num_threads()
{
    return omp_get_max_threads();
}

CgResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            double tol, int max_iterations)
{
    const Eigen::Index n = b.size();
    if (A.rows() != n || A.cols() != n)
        throw InvalidArgument("conjugate_gradient: dimension mismatch");
    CgResult res;
    if (x.size() != n)
        x = Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    if (n == 0 || bnorm == 0.0) {
        x.setZero();
        return res;
    }
    Eigen::VectorXd inv_diag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = A.coeff(i, i);
        inv_diag[i] = d > 0 ? 1.0 / d : 1.0;
    }
    Eigen::VectorXd r = b - A * x;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd Ap(n);
    double rz = r.dot(z);
    res.relative_residual = r.norm() / bnorm;
    while (res.relative_residual > tol) {
        if (res.iterations >= max_iterations)
            throw SolverError("conjugate gradients did not converge", res.relative_residual,
                              res.iterations, false);
        Ap.noalias() = A * p;
        const double curvature = p.dot(Ap);
        if (!(curvature > 0.0))
            throw SolverError("conjugate gradients met a non-positive curvature direction",
                              res.relative_residual, res.iterations, true);
        const double alpha = rz / curvature;
        x += alpha * p;
        r -= alpha * Ap;
        z = inv_diag.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        ++res.iterations;
        res.relative_residual = r.norm() / bnorm;
    }
    return res;
}

double min_eigenvalue(const SparseMatrix& A)
{
    if (A.rows() == 0)
        throw InvalidArgument("min_eigenvalue: empty matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(A), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace lowreg
