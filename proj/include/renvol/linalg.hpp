#pragma once

#include "renvol/common.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <functional>

namespace renvol {

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for a symmetric positive definite
/// operator given as a callable y = A x. diag holds the Jacobi preconditioner.
/// Stops once |r| <= max(tol |b|, atol); throws ConvergenceError after max_iter steps.
template <typename Op>
CgResult conjugate_gradient(const Op& apply, const Eigen::VectorXd& diag, const Eigen::VectorXd& b,
                            Eigen::VectorXd& x, double tol, int max_iter, double atol = 0.0)
{
    CgResult res;
    const double bnorm = b.norm();
    const double stop = std::max(tol * bnorm, atol);
    if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
    if (bnorm <= atol || bnorm == 0.0) {
        x.setZero();
        return res;
    }
    Eigen::VectorXd r = b - apply(x);
    Eigen::VectorXd z = r.cwiseQuotient(diag);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    for (int k = 0; k < max_iter; ++k) {
        double rn = r.norm();
        res.relative_residual = rn / bnorm;
        if (rn <= stop) {
            res.iterations = k;
            return res;
        }
        Eigen::VectorXd Ap = apply(p);
        double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) throw ConvergenceError("conjugate gradient: operator not positive definite", res.relative_residual);
        double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        z = r.cwiseQuotient(diag);
        double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    res.relative_residual = r.norm() / bnorm;
    res.iterations = max_iter;
    if (r.norm() <= stop) return res;
    throw ConvergenceError("conjugate gradient did not converge", res.relative_residual);
}

} // namespace renvol
