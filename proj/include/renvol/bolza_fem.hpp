#pragma once

#include "renvol/bolza_mesh.hpp"

#include <Eigen/SparseCore>

namespace renvol {

/// Metric on the Bolza surface, sigma * h_P + Re(phi dz^2): sigma is a scalar
/// per degree of freedom, phi a weight-4 field per chart vertex (empty for a
/// conformal metric).
struct BolzaMetric {
    std::shared_ptr<const BolzaMesh> mesh;
    std::vector<double> sigma;
    std::vector<cplx> phi;

    static BolzaMetric poincare(std::shared_ptr<const BolzaMesh> mesh);
    /// e^{2 psi} h_P
    static BolzaMetric conformal(std::shared_ptr<const BolzaMesh> mesh, const std::vector<double>& psi);
    bool is_conformal() const { return phi.empty(); }
};

/// P1 stiffness and lumped mass of a Bolza metric. The stiffness freezes the
/// metric per triangle at its centroid. The lumped mass of a vertex is a third
/// of the midpoint-rule Poincare area of its triangles times the area density
/// dvol / dvol_P at the vertex, so for conformal metrics the discrete
/// Gauss-Bonnet identity holds exactly.
struct BolzaFem {
    Eigen::SparseMatrix<double> stiffness;
    std::vector<double> mass;
    std::vector<double> density;   // dvol / dvol_P per degree of freedom
};

BolzaFem assemble(const BolzaMetric& metric);

/// Integral of a per-vertex function, sum_i m_i f_i with pairwise summation.
double integrate(const BolzaFem& fem, const std::vector<double>& f);

/// Lumped Laplacian M^-1 K f (positive operator).
std::vector<double> laplacian(const BolzaFem& fem, const std::vector<double>& f);

/// Curvature of e^{2 psi} h_P: e^{-2 psi} (-1 + Delta_P psi), using the
/// Poincare stiffness and mass. Its integral is exactly -area(h_P).
std::vector<double> conformal_curvature(const BolzaFem& poincare_fem, const std::vector<double>& psi);

/// |q|^2 / rho^4 at one chart vertex per degree of freedom.
std::vector<double> quadratic_norm2(const BolzaMesh& mesh, const std::vector<cplx>& q);

} // namespace renvol
