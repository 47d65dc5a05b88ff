#pragma once

#include "renvol/grid.hpp"

namespace renvol {

struct OneForm {
    Grid x, y;
};

/// Symmetric 2-tensor in chart coordinates.
struct Sym2 {
    Grid xx, xy, yy;
};

/// Endomorphism acting on coordinate column vectors: [[m00, m01], [m10, m11]].
struct Endo {
    Grid m00, m01, m10, m11;
};

Sym2 sym2_zero(const GridDomain& d);
Sym2 sym2_sample(const GridDomain& d, const std::function<double(double, double)>& xx,
                 const std::function<double(double, double)>& xy, const std::function<double(double, double)>& yy);
Endo endo_zero(const GridDomain& d);
Endo endo_constant(const GridDomain& d, double a00, double a01, double a10, double a11);
Sym2 operator+(const Sym2& a, const Sym2& b);
Sym2 operator-(const Sym2& a, const Sym2& b);
Sym2 operator*(double c, const Sym2& a);
Endo operator+(const Endo& a, const Endo& b);
Endo operator-(const Endo& a, const Endo& b);
Endo operator*(double c, const Endo& a);
OneForm operator-(const OneForm& a, const OneForm& b);
/// Pointwise f * s.
Sym2 scale(const Grid& f, const Sym2& s);

/// Throws PreconditionError unless h is positive definite (det > 1e-10) at every node.
void check_metric(const GridDomain& d, const Sym2& h);

Grid metric_det(const Sym2& h);
Sym2 metric_inverse(const Sym2& h);

/// Christoffel symbols G[k][i][j] = Gamma^k_ij.
struct Christoffel {
    Grid g[2][2][2];
};
Christoffel christoffel(const GridDomain& d, const Sym2& h);

Grid gauss_curvature(const GridDomain& d, const Sym2& h);

OneForm differential(const GridDomain& d, const Grid& f);
/// Positive Laplacian d*d f = -(1/sqrt g) d_i (sqrt g h^ij d_j f).
Grid laplacian(const GridDomain& d, const Sym2& h, const Grid& f);
/// d* of a 1-form, -(1/sqrt g) d_i (sqrt g h^ij xi_j).
Grid codifferential(const GridDomain& d, const Sym2& h, const OneForm& xi);
/// Divergence operator on symmetric 2-tensors with the sign making it the
/// adjoint of sym_gradient: (delta s)_k = -h^ij (nabla_i s)_jk.
OneForm divergence(const GridDomain& d, const Sym2& h, const Sym2& s);
/// Symmetrized covariant derivative of a 1-form.
Sym2 sym_gradient(const GridDomain& d, const Sym2& h, const OneForm& xi);
/// Lie derivative of h along the vector field (vx, vy).
Sym2 lie_derivative(const GridDomain& d, const Sym2& h, const Grid& vx, const Grid& vy);

Grid trace(const Sym2& h, const Sym2& s);
Grid trace(const Endo& a);
Grid det(const Endo& a);
Sym2 trace_free(const Sym2& h, const Sym2& s);
/// h(A., .) as a symmetric 2-tensor (symmetrized).
Sym2 lower(const Sym2& h, const Endo& a);
/// h^-1 s as an endomorphism.
Endo raise(const Sym2& h, const Sym2& s);
Endo compose(const Endo& a, const Endo& b);

/// Pointwise norms with respect to h.
Grid norm(const Sym2& h, const Sym2& s);
Grid norm(const Sym2& h, const OneForm& xi);
/// Frobenius norm of an h-self-adjoint endomorphism, sqrt(tr(A^2)).
Grid norm(const Endo& a);

/// Codazzi residual delta(h(A.,.)) + d tr A.
OneForm codazzi_residual(const GridDomain& d, const Sym2& h, const Endo& a);

/// Transverse-traceless part of s: the trace-free part minus the trace-free
/// symmetrized gradient closest to it in the h-weighted least-squares norm.
/// Conjugate gradients on the exact discrete normal equations. Intended for
/// TORUS with non-positive (hence zero) curvature; on other tori the discrete
/// conformal Killing fields are only approximately null and the solve loses
/// accuracy. Parallel TT parts are left untouched.
Sym2 tt_project(const GridDomain& d, const Sym2& h, const Sym2& s, double tol = 1e-12);

/// First-order change of the curvature of a hyperbolic metric h along hdot:
/// ((Delta + 1) tr hdot + d* delta hdot) / 2. Requires |kappa + 1| <= 1e-6.
Grid curvature_variation_lhs(const GridDomain& d, const Sym2& h, const Sym2& hdot);

/// Integral of f against the area form of h; TORUS only.
double integrate(const GridDomain& d, const Sym2& h, const Grid& f);

} // namespace renvol
