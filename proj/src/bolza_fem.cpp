#include "renvol/bolza_fem.hpp"

#include <Eigen/Dense>

namespace renvol {

BolzaMetric BolzaMetric::poincare(std::shared_ptr<const BolzaMesh> mesh)
{
    BolzaMetric m;
    m.sigma.assign(mesh->num_dofs(), 1.0);
    m.mesh = std::move(mesh);
    return m;
}

BolzaMetric BolzaMetric::conformal(std::shared_ptr<const BolzaMesh> mesh, const std::vector<double>& psi)
{
    require(psi.size() == mesh->num_dofs(), "BolzaMetric::conformal: one value per degree of freedom expected");
    BolzaMetric m;
    m.sigma.resize(psi.size());
    for (size_t i = 0; i < psi.size(); ++i) m.sigma[i] = std::exp(2.0 * psi[i]);
    m.mesh = std::move(mesh);
    return m;
}

BolzaFem assemble(const BolzaMetric& metric)
{
    const BolzaMesh& M = *metric.mesh;
    require(metric.sigma.size() == M.num_dofs(), "assemble: sigma must have one value per degree of freedom");
    require(metric.phi.empty() || metric.phi.size() == M.num_chart_vertices(), "assemble: phi must have one value per chart vertex");
    const size_t nt = M.num_triangles(), nd = M.num_dofs();
    BolzaFem fem;
    fem.density.resize(nd);
    for (size_t d = 0; d < nd; ++d) {
        double sig = metric.sigma[d];
        double p2 = 0.0;
        if (!metric.phi.empty()) {
            int v = M.representative(static_cast<int>(d));
            double r2 = poincare_rho2(M.chart(v));
            p2 = std::norm(metric.phi[v]) / (r2 * r2);
        }
        if (!(sig > 0.0) || !(sig * sig - p2 > 1e-10 * sig * sig)) throw PreconditionError("Bolza metric is not positive definite");
        fem.density[d] = std::sqrt(sig * sig - p2);
    }
    fem.mass.assign(nd, 0.0);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * nt);
    for (size_t t = 0; t < nt; ++t) {
        const auto& tri = M.triangle(t);
        cplx c = M.centroid(t);
        double sig = 0.0;
        cplx ph = 0.0;
        for (int a = 0; a < 3; ++a) {
            sig += metric.sigma[M.dof(tri[a])] / 3.0;
            if (!metric.phi.empty()) ph += metric.phi[tri[a]] / 3.0;
        }
        double r2 = poincare_rho2(c);
        double lam = sig * r2;
        Eigen::Matrix2d G;
        G << lam + ph.real(), -ph.imag(), -ph.imag(), lam - ph.real();
        double det = G.determinant();
        if (!(det > 1e-10 * lam * lam) || !(G(0, 0) > 0.0)) throw PreconditionError("Bolza metric is not positive definite");
        double poincare_area = M.chart_area(t) * r2;
        for (int a = 0; a < 3; ++a) fem.mass[M.dof(tri[a])] += poincare_area / 3.0 * fem.density[M.dof(tri[a])];
        Eigen::Matrix2d W = M.chart_area(t) * std::sqrt(det) * G.inverse();
        const auto& g = M.gradients(t);
        for (int a = 0; a < 3; ++a) {
            Eigen::Vector2d ga(g[a].real(), g[a].imag());
            for (int b = 0; b < 3; ++b) {
                Eigen::Vector2d gb(g[b].real(), g[b].imag());
                trip.emplace_back(M.dof(tri[a]), M.dof(tri[b]), ga.dot(W * gb));
            }
        }
    }
    fem.stiffness.resize(static_cast<Eigen::Index>(nd), static_cast<Eigen::Index>(nd));
    fem.stiffness.setFromTriplets(trip.begin(), trip.end());
    return fem;
}

double integrate(const BolzaFem& fem, const std::vector<double>& f)
{
    require(f.size() == fem.mass.size(), "integrate: one value per degree of freedom expected");
    std::vector<double> w(f.size());
    for (size_t i = 0; i < f.size(); ++i) w[i] = fem.mass[i] * f[i];
    return pairwise_sum(w);
}

std::vector<double> laplacian(const BolzaFem& fem, const std::vector<double>& f)
{
    Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
    Eigen::VectorXd k = fem.stiffness * x;
    std::vector<double> out(f.size());
    for (size_t i = 0; i < f.size(); ++i) out[i] = k[static_cast<Eigen::Index>(i)] / fem.mass[i];
    return out;
}

std::vector<double> conformal_curvature(const BolzaFem& poincare_fem, const std::vector<double>& psi)
{
    std::vector<double> lap = laplacian(poincare_fem, psi);
    std::vector<double> k(psi.size());
    for (size_t i = 0; i < psi.size(); ++i) k[i] = std::exp(-2.0 * psi[i]) * (-1.0 + lap[i]);
    return k;
}

std::vector<double> quadratic_norm2(const BolzaMesh& mesh, const std::vector<cplx>& q)
{
    require(q.size() == mesh.num_chart_vertices(), "quadratic_norm2: one value per chart vertex expected");
    std::vector<double> out(mesh.num_dofs());
    for (size_t d = 0; d < out.size(); ++d) {
        int v = mesh.representative(static_cast<int>(d));
        double r2 = poincare_rho2(mesh.chart(v));
        out[d] = std::norm(q[v]) / (r2 * r2);
    }
    return out;
}

} // namespace renvol
