#pragma once

#include "renvol/bolza_fem.hpp"
#include "renvol/funnel.hpp"

namespace renvol {

/// Disk-model hyperbolic metric rho^2 (dx^2 + dy^2), rho^2 = 4 / (1 - |z|^2)^2.
Sym2 poincare_disk_metric(const GridDomain& d);

/// s Re(q dz^2) as a symmetric 2-tensor.
Sym2 quadratic_differential_tensor(const std::vector<cplx>& q, double s);

/// q sampled at the grid nodes, z = x + iy.
std::vector<cplx> sample_complex(const GridDomain& d, const std::function<cplx(cplx)>& q);

struct NewtonOptions {
    double tol = 1e-11;
    int max_iter = 30;
};

/// Minimal-surface data h = e^{2u} h0, II = s Re(q dz^2), A = h^-1 II, where u
/// solves the Gauss equation Delta_{h0} u - 1 + e^{2u} + s^2 |q|^2_{h0} e^{-2u} = 0.
/// PATCH only: h0 must be conformally flat with curvature -1; u = 0 is imposed
/// on the two outermost node rings and the equation is solved at every other
/// node with the fourth-order five-point Laplacian.
struct UhlenbeckResult {
    FunnelData fd;
    Grid u;
    std::vector<double> history;   // sup of the scaled residual per Newton step
};

UhlenbeckResult uhlenbeck_construct(const GridDomain& d, const Sym2& h0, const std::vector<cplx>& q, double s,
                                    const NewtonOptions& opt = {});

/// The same construction over the Bolza surface, h = e^{2u} h_P for a weight-4
/// differential q given at the chart vertices.
struct BolzaFunnel {
    std::shared_ptr<const BolzaMesh> mesh;
    std::vector<double> u;          // per degree of freedom
    std::vector<cplx> q;            // per chart vertex
    double s = 0.0;
    std::vector<double> qnorm2;     // |q|^2 / rho^4 per degree of freedom
    std::vector<double> history;

    BolzaMetric metric() const { return BolzaMetric::conformal(mesh, u); }
    /// det A = -s^2 e^{-4u} |q|^2_P
    std::vector<double> weingarten_det() const;
    /// kappa_h from the conformal change rule on the Poincare stiffness.
    std::vector<double> curvature() const;
};

BolzaFunnel uhlenbeck_construct(std::shared_ptr<const BolzaMesh> mesh, const std::vector<cplx>& q, double s,
                                const NewtonOptions& opt = {});

/// Gauss-only validation: sup |det A - kappa_h - 1| over degrees of freedom.
double gauss_residual(const BolzaFunnel& f);

FunnelIntegrals funnel_integrals(const BolzaFunnel& f);

/// h_inf = (1 - det A) e^{2u} h_P / 4 + Re(s q dz^2) / 2.
BolzaMetric metric_at_infinity(const BolzaFunnel& f);

/// Curvature of h_inf from that of h, kappa_inf = 4 - 8 / (2 + kappa_h); valid
/// for minimal (trace-free) data satisfying Gauss and Codazzi.
std::vector<double> curvature_at_infinity(const BolzaFunnel& f);

} // namespace renvol
