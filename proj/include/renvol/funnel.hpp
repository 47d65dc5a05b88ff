#pragma once

#include "renvol/tensorcalc.hpp"

namespace renvol {

/// Boundary data of a funnel [0, inf) x Sigma with metric dt^2 + h((cosh t + A sinh t)^2 ., .).
struct FunnelData {
    GridDomain domain;
    Sym2 h;
    Endo A;
};

/// Flat metric dx^2 + dy^2 with constant symmetric A.
FunnelData flat_torus_constA(const GridDomain& d, double a11, double a12, double a22);
/// Flat metric with A = I; h_t = e^{2t} h.
FunnelData horospherical(const GridDomain& d);
/// A = 0 over the given metric.
FunnelData geodesic(const GridDomain& d, const Sym2& h);

/// Throws PreconditionError unless h is a metric, A is h-symmetric to 1e-12
/// and A + I is positive definite at every node.
void check_funnel(const FunnelData& fd);

struct ConstraintReport {
    Grid gauss;                 // det A - kappa_h - 1
    OneForm codazzi;            // delta(h(A., .)) + d tr A
    double gauss_norm = 0.0;
    double codazzi_norm = 0.0;
    bool codazzi_checked = true;
    bool gauss_pass = false;
    bool codazzi_pass = false;
    bool pass = false;
};

/// Gauss and Codazzi residuals over the evaluation set.
ConstraintReport validate(const FunnelData& fd, double tol);

struct Evolution {
    Sym2 h;
    Endo A;
    double gauss_residual = 0.0;   // sup |kappa_{h_t} - det A_t + 1|
};

Evolution evolve(const FunnelData& fd, double t);

/// h_t and A_t without the curvature check.
Sym2 evolved_metric(const FunnelData& fd, double t);
Endo evolved_weingarten(const FunnelData& fd, double t);

/// s-derivatives of h_t and A_t along a family with derivative (hdot, adot) at fd.
struct EvolutionDerivative {
    Sym2 h;
    Endo A;
};
EvolutionDerivative evolve_derivative(const FunnelData& fd, const Sym2& hdot, const Endo& adot, double t);

/// h_inf = h((1 + A)^2 ., .) / 4.
Sym2 metric_at_infinity(const FunnelData& fd);

/// Surface integrals from which every t-integral of the funnel is assembled.
struct FunnelIntegrals {
    double area = 0.0;   // int 1
    double mean = 0.0;   // int H
    double det = 0.0;    // int det A
};

/// TORUS only.
FunnelIntegrals funnel_integrals(const FunnelData& fd);

/// a e^{2T} + b T + c + d e^{-2T}
struct ExpPoly {
    double e2 = 0.0, lin = 0.0, c0 = 0.0, em2 = 0.0;
    double operator()(double T) const;
};

/// Exact antiderivative in T of int det(cosh t + A sinh t) dvol_h, vanishing at T = 0.
ExpPoly segment_volume_profile(const FunnelIntegrals& I);
double segment_volume(const FunnelIntegrals& I, double T);
double segment_volume(const FunnelData& fd, double T);

struct RenormalizedVolume {
    double finite_part = 0.0;     // -int H / 4
    double subtraction = 0.0;     // V(T) - c2 e^{2T} - c1 T at T
    double difference = 0.0;
    double c2 = 0.0;              // coefficient of e^{2T}
    double c1 = 0.0;              // coefficient of T, the topological term
    double T = 0.0;
};

RenormalizedVolume renormalized_funnel_volume(const FunnelIntegrals& I, double T = 20.0);

/// volK - sum int H / 4.
double assemble_volr(double volK, const std::vector<FunnelIntegrals>& funnels);

} // namespace renvol
