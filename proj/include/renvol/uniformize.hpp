#pragma once

#include "renvol/bolza_fem.hpp"
#include "renvol/grid.hpp"
#include "renvol/tensorcalc.hpp"

namespace renvol {

struct LiouvilleOptions {
    double tol = 1e-10;            // on sup |Delta w + kappa + 4 e^{2w}|, relative to 1 + sup |kappa|
    int max_iter = 12;
    double cg_tol = 1e-12;
};

struct LiouvilleSolution {
    std::vector<double> omega;
    std::vector<double> history;   // residual per iterate, starting with the initial guess
    int iterations = 0;
    double residual = 0.0;
    /// r_{k+1} / r_k^2 over the steps where r_k < 1 and r_{k+1} is above round-off.
    std::vector<double> quadratic_ratios;
};

/// Conformal factor w with curvature(e^{2w} h) = -4, from the equation
/// kappa + Delta w + 4 e^{2w} = 0 discretized as K w + M (kappa + 4 e^{2w}) = 0.
/// Damped Newton (halving on the residual) with CG inner solves.
/// Throws GaussBonnetError when the total curvature is non-negative and
/// ConvergenceError when Newton stalls.
LiouvilleSolution liouville_solve(const BolzaFem& fem, const std::vector<double>& kappa,
                                  const std::vector<double>& initial = {}, const LiouvilleOptions& opt = {});

/// Grid metrics live on tori, where the Euler characteristic is zero: always throws GaussBonnetError.
LiouvilleSolution liouville_solve(const GridDomain& d, const Sym2& h);

/// -(1/4) int (|dw|^2 + 2 kappa w) for the metric of fem.
double polyakov_difference(const BolzaFem& fem, const std::vector<double>& kappa, const std::vector<double>& omega);

/// -(1/2) (Delta + 8)^{-1} kdd; kappa0 must be -4 to 1e-6.
std::vector<double> omega2_predict(const BolzaFem& fem, const std::vector<double>& kappa0, const std::vector<double>& kdd);

/// At a minimum of w, 4 e^{2w} = -kappa - Delta w >= min(-kappa); at a maximum <= max(-kappa).
struct MaximumPrinciple {
    double lower = 0.0, upper = 0.0;   // bounds for w
    double min_omega = 0.0, max_omega = 0.0;
    bool holds(double eps) const { return min_omega >= lower - eps && max_omega <= upper + eps; }
};
MaximumPrinciple maximum_principle(const std::vector<double>& kappa, const std::vector<double>& omega);

} // namespace renvol
