#include "renvol/uhlenbeck.hpp"

#include <Eigen/SparseCholesky>

namespace renvol {

namespace {

// Damped Newton for F(u) = 0 with an SPD Jacobian. residual(u) returns the sup
// of the scaled residual; system(u, J, F) fills Jacobian and residual.
template <typename Residual, typename System>
std::vector<double> newton(Eigen::VectorXd& u, Residual&& residual, System&& system, const NewtonOptions& opt,
                           const char* what)
{
    std::vector<double> history{residual(u)};
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    for (int it = 0; it < opt.max_iter && history.back() > opt.tol; ++it) {
        Eigen::SparseMatrix<double> J;
        Eigen::VectorXd F;
        system(u, J, F);
        if (it == 0) ldlt.analyzePattern(J);
        ldlt.factorize(J);
        if (ldlt.info() != Eigen::Success) throw ConstructionError(std::string(what) + ": Jacobian is not positive definite");
        Eigen::VectorXd du = ldlt.solve(-F);
        double step = 1.0, r = 0.0;
        for (int k = 0; k < 30; ++k) {
            r = residual(u + step * du);
            if (std::isfinite(r) && r < history.back()) break;
            step *= 0.5;
        }
        if (!(std::isfinite(r) && r < history.back()))
            throw ConstructionError(std::string(what) + ": Newton iteration diverged (last residual " +
                                    std::to_string(history.back()) + ")");
        u += step * du;
        history.push_back(r);
    }
    if (!(history.back() <= opt.tol))
        throw ConstructionError(std::string(what) + ": Newton iteration did not converge (last residual " +
                                std::to_string(history.back()) + ")");
    return history;
}

} // namespace

Sym2 poincare_disk_metric(const GridDomain& d)
{
    auto rho2 = [](double x, double y) { return poincare_rho2(cplx(x, y)); };
    return sym2_sample(d, rho2, [](double, double) { return 0.0; }, rho2);
}

Sym2 quadratic_differential_tensor(const std::vector<cplx>& q, double s)
{
    Sym2 t{Grid(q.size()), Grid(q.size()), Grid(q.size())};
    for (size_t k = 0; k < q.size(); ++k) {
        t.xx[k] = s * q[k].real();
        t.xy[k] = -s * q[k].imag();
        t.yy[k] = -s * q[k].real();
    }
    return t;
}

std::vector<cplx> sample_complex(const GridDomain& d, const std::function<cplx(cplx)>& q)
{
    std::vector<cplx> out(d.size());
    for (int j = 0; j < d.side(); ++j)
        for (int i = 0; i < d.side(); ++i) out[d.index(i, j)] = q(cplx(d.x(i), d.y(j)));
    return out;
}

UhlenbeckResult uhlenbeck_construct(const GridDomain& d, const Sym2& h0, const std::vector<cplx>& q, double s,
                                    const NewtonOptions& opt)
{
    if (d.mode() != DomainMode::Patch) throw UnsupportedDomainError("grid Uhlenbeck construction runs on PATCH domains");
    require(q.size() == d.size() && h0.xx.size() == d.size(), "uhlenbeck_construct: fields do not match the domain");
    check_metric(d, h0);
    for (size_t k = 0; k < d.size(); ++k)
        require(std::abs(h0.xy[k]) <= 1e-12 * h0.xx[k] && std::abs(h0.xx[k] - h0.yy[k]) <= 1e-12 * h0.xx[k],
                "uhlenbeck_construct: h0 must be conformally flat");
    Grid k0 = gauss_curvature(d, h0);
    for (size_t k : d.evaluation_set())
        require(std::abs(k0[k] + 1.0) <= 1e-6, "uhlenbeck_construct: h0 is not hyperbolic");

    const int side = d.side();
    const int lo = 2, hi = side - 3;
    const int m = hi - lo + 1;
    auto unknown = [&](int i, int j) { return (j - lo) * m + (i - lo); };
    const double cx = 1.0 / (12.0 * d.dx() * d.dx()), cy = 1.0 / (12.0 * d.dy() * d.dy());
    const double w[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};

    // -L as a sparse matrix on the unknowns (Dirichlet zero outside)
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = lo; j <= hi; ++j)
        for (int i = lo; i <= hi; ++i) {
            int r = unknown(i, j);
            for (int o = -2; o <= 2; ++o) {
                if (i + o >= lo && i + o <= hi) trip.emplace_back(r, unknown(i + o, j), -w[o + 2] * cx);
                if (j + o >= lo && j + o <= hi) trip.emplace_back(r, unknown(i, j + o), -w[o + 2] * cy);
            }
        }
    const int N = m * m;
    Eigen::SparseMatrix<double> negL(N, N);
    negL.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd rho2(N), qq(N);
    for (int j = lo; j <= hi; ++j)
        for (int i = lo; i <= hi; ++i) {
            size_t k = d.index(i, j);
            rho2[unknown(i, j)] = h0.xx[k];
            qq[unknown(i, j)] = s * s * std::norm(q[k]) / (h0.xx[k] * h0.xx[k]);
        }

    auto F = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd nl = (-1.0 + (2.0 * u).array().exp() + qq.array() * (-2.0 * u).array().exp()).matrix();
        return negL * u + rho2.cwiseProduct(nl);
    };
    auto residual = [&](const Eigen::VectorXd& u) { return F(u).cwiseQuotient(rho2).cwiseAbs().maxCoeff(); };
    auto system = [&](const Eigen::VectorXd& u, Eigen::SparseMatrix<double>& J, Eigen::VectorXd& f) {
        f = F(u);
        Eigen::VectorXd dg = rho2.cwiseProduct(
            (2.0 * (2.0 * u).array().exp() - 2.0 * qq.array() * (-2.0 * u).array().exp()).matrix());
        J = negL;
        for (int r = 0; r < N; ++r) J.coeffRef(r, r) += dg[r];
    };
    Eigen::VectorXd uu = Eigen::VectorXd::Zero(N);
    UhlenbeckResult res;
    res.history = newton(uu, residual, system, opt, "uhlenbeck_construct");

    res.u.assign(d.size(), 0.0);
    for (int j = lo; j <= hi; ++j)
        for (int i = lo; i <= hi; ++i) res.u[d.index(i, j)] = uu[unknown(i, j)];
    Grid e2u(d.size());
    for (size_t k = 0; k < d.size(); ++k) e2u[k] = std::exp(2.0 * res.u[k]);
    Sym2 h = scale(e2u, h0);
    res.fd = FunnelData{d, h, raise(h, quadratic_differential_tensor(q, s))};
    check_funnel(res.fd);
    return res;
}

std::vector<double> BolzaFunnel::weingarten_det() const
{
    std::vector<double> out(u.size());
    for (size_t i = 0; i < u.size(); ++i) out[i] = -s * s * std::exp(-4.0 * u[i]) * qnorm2[i];
    return out;
}

std::vector<double> BolzaFunnel::curvature() const
{
    return conformal_curvature(assemble(BolzaMetric::poincare(mesh)), u);
}

BolzaFunnel uhlenbeck_construct(std::shared_ptr<const BolzaMesh> mesh, const std::vector<cplx>& q, double s,
                                const NewtonOptions& opt)
{
    require(q.size() == mesh->num_chart_vertices(), "uhlenbeck_construct: q must have one value per chart vertex");
    BolzaFunnel f;
    f.mesh = mesh;
    f.q = q;
    f.s = s;
    f.qnorm2 = quadratic_norm2(*mesh, q);
    BolzaFem P = assemble(BolzaMetric::poincare(mesh));
    const int N = static_cast<int>(mesh->num_dofs());
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(P.mass.data(), N);
    Eigen::VectorXd qq = s * s * Eigen::Map<const Eigen::VectorXd>(f.qnorm2.data(), N);

    auto F = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd nl = (-1.0 + (2.0 * u).array().exp() + qq.array() * (-2.0 * u).array().exp()).matrix();
        return P.stiffness * u + m.cwiseProduct(nl);
    };
    auto residual = [&](const Eigen::VectorXd& u) { return F(u).cwiseQuotient(m).cwiseAbs().maxCoeff(); };
    auto system = [&](const Eigen::VectorXd& u, Eigen::SparseMatrix<double>& J, Eigen::VectorXd& r) {
        r = F(u);
        Eigen::VectorXd dg =
            m.cwiseProduct((2.0 * (2.0 * u).array().exp() - 2.0 * qq.array() * (-2.0 * u).array().exp()).matrix());
        J = P.stiffness;
        for (int i = 0; i < N; ++i) J.coeffRef(i, i) += dg[i];
    };
    Eigen::VectorXd uu = Eigen::VectorXd::Zero(N);
    f.history = newton(uu, residual, system, opt, "uhlenbeck_construct");
    f.u.assign(uu.data(), uu.data() + N);
    return f;
}

double gauss_residual(const BolzaFunnel& f)
{
    auto k = f.curvature();
    auto da = f.weingarten_det();
    double r = 0.0;
    for (size_t i = 0; i < k.size(); ++i) r = std::max(r, std::abs(da[i] - k[i] - 1.0));
    return r;
}

FunnelIntegrals funnel_integrals(const BolzaFunnel& f)
{
    BolzaFem fem = assemble(f.metric());
    std::vector<double> one(fem.mass.size(), 1.0);
    return FunnelIntegrals{integrate(fem, one), 0.0, integrate(fem, f.weingarten_det())};
}

BolzaMetric metric_at_infinity(const BolzaFunnel& f)
{
    BolzaMetric m;
    m.mesh = f.mesh;
    auto da = f.weingarten_det();
    m.sigma.resize(f.u.size());
    for (size_t i = 0; i < f.u.size(); ++i) m.sigma[i] = 0.25 * (1.0 - da[i]) * std::exp(2.0 * f.u[i]);
    if (f.s != 0.0) {
        m.phi.resize(f.q.size());
        for (size_t v = 0; v < f.q.size(); ++v) m.phi[v] = 0.5 * f.s * f.q[v];
    }
    return m;
}

std::vector<double> curvature_at_infinity(const BolzaFunnel& f)
{
    auto k = f.curvature();
    for (double& v : k) v = 4.0 - 8.0 / (2.0 + v);
    return k;
}

} // namespace renvol
