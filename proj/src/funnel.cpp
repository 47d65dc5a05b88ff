#include "renvol/funnel.hpp"

#include "renvol/parallel.hpp"

#include <Eigen/Dense>

namespace renvol {

namespace {

using M2 = Eigen::Matrix2d;

M2 metric_at(const Sym2& h, size_t k)
{
    M2 m;
    m << h.xx[k], h.xy[k], h.xy[k], h.yy[k];
    return m;
}

M2 endo_at(const Endo& a, size_t k)
{
    M2 m;
    m << a.m00[k], a.m01[k], a.m10[k], a.m11[k];
    return m;
}

void store(Sym2& h, size_t k, const M2& m)
{
    h.xx[k] = m(0, 0);
    h.xy[k] = 0.5 * (m(0, 1) + m(1, 0));
    h.yy[k] = m(1, 1);
}

void store(Endo& a, size_t k, const M2& m)
{
    a.m00[k] = m(0, 0);
    a.m01[k] = m(0, 1);
    a.m10[k] = m(1, 0);
    a.m11[k] = m(1, 1);
}

Sym2 sym2_like(size_t n) { return Sym2{Grid(n), Grid(n), Grid(n)}; }
Endo endo_like(size_t n) { return Endo{Grid(n), Grid(n), Grid(n), Grid(n)}; }

template <typename F>
void for_nodes(size_t n, F&& f)
{
    parallel_for(n, [&](size_t b, size_t e) {
        for (size_t k = b; k < e; ++k) f(k);
    }, 1024);
}

} // namespace

FunnelData flat_torus_constA(const GridDomain& d, double a11, double a12, double a22)
{
    FunnelData fd{d, sym2_sample(d, [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                                 [](double, double) { return 1.0; }),
                  endo_constant(d, a11, a12, a12, a22)};
    return fd;
}

FunnelData horospherical(const GridDomain& d) { return flat_torus_constA(d, 1.0, 0.0, 1.0); }

FunnelData geodesic(const GridDomain& d, const Sym2& h) { return FunnelData{d, h, endo_zero(d)}; }

void check_funnel(const FunnelData& fd)
{
    const size_t n = fd.domain.size();
    require(fd.h.xx.size() == n && fd.A.m00.size() == n, "funnel data does not match its domain");
    check_metric(fd.domain, fd.h);
    for (size_t k = 0; k < n; ++k) {
        M2 h = metric_at(fd.h, k), a = endo_at(fd.A, k);
        M2 ha = h * a;
        double scale = 1.0 + h.norm() * a.norm();
        if (std::abs(ha(0, 1) - ha(1, 0)) > 1e-12 * scale) throw PreconditionError("A is not symmetric with respect to h");
        M2 p = a + M2::Identity();
        if (!(p.trace() > 0.0 && p.determinant() > 0.0))
            throw PreconditionError("A + I is not positive definite; the funnel is undefined");
    }
}

ConstraintReport validate(const FunnelData& fd, double tol)
{
    check_funnel(fd);
    const auto& d = fd.domain;
    ConstraintReport r;
    Grid kappa = gauss_curvature(d, fd.h);
    Grid da = det(fd.A);
    r.gauss.resize(d.size());
    for (size_t k = 0; k < d.size(); ++k) r.gauss[k] = da[k] - kappa[k] - 1.0;
    r.codazzi = codazzi_residual(d, fd.h, fd.A);
    r.gauss_norm = sup_norm(r.gauss, d.evaluation_set());
    r.codazzi_norm = sup_norm(norm(fd.h, r.codazzi), d.evaluation_set());
    r.gauss_pass = r.gauss_norm <= tol;
    r.codazzi_pass = r.codazzi_norm <= tol;
    r.pass = r.gauss_pass && r.codazzi_pass;
    return r;
}

Sym2 evolved_metric(const FunnelData& fd, double t)
{
    const size_t n = fd.domain.size();
    const double c = std::cosh(t), s = std::sinh(t);
    Sym2 out = sym2_like(n);
    for_nodes(n, [&](size_t k) {
        M2 p = c * M2::Identity() + s * endo_at(fd.A, k);
        store(out, k, p.transpose() * metric_at(fd.h, k) * p);
    });
    return out;
}

Endo evolved_weingarten(const FunnelData& fd, double t)
{
    const size_t n = fd.domain.size();
    const double c = std::cosh(t), s = std::sinh(t);
    Endo out = endo_like(n);
    for_nodes(n, [&](size_t k) {
        M2 a = endo_at(fd.A, k);
        M2 p = c * M2::Identity() + s * a;
        store(out, k, p.inverse() * (s * M2::Identity() + c * a));
    });
    return out;
}

Evolution evolve(const FunnelData& fd, double t)
{
    require(t >= 0.0, "evolve: t must be non-negative");
    check_funnel(fd);
    Evolution ev{evolved_metric(fd, t), evolved_weingarten(fd, t), 0.0};
    for (size_t k = 0; k < fd.domain.size(); ++k)
        if (!(metric_at(ev.h, k).determinant() > 0.0 && ev.h.xx[k] > 0.0))
            throw Error("evolve: h_t lost positivity although A + I > 0");
    Grid kappa = gauss_curvature(fd.domain, ev.h);
    Grid da = det(ev.A);
    Grid r(kappa.size());
    for (size_t k = 0; k < r.size(); ++k) r[k] = kappa[k] - da[k] + 1.0;
    ev.gauss_residual = sup_norm(r, fd.domain.evaluation_set());
    return ev;
}

EvolutionDerivative evolve_derivative(const FunnelData& fd, const Sym2& hdot, const Endo& adot, double t)
{
    const size_t n = fd.domain.size();
    const double c = std::cosh(t), s = std::sinh(t);
    EvolutionDerivative out{sym2_like(n), endo_like(n)};
    for_nodes(n, [&](size_t k) {
        M2 h = metric_at(fd.h, k), hd = metric_at(hdot, k);
        M2 a = endo_at(fd.A, k), ad = endo_at(adot, k);
        M2 p = c * M2::Identity() + s * a, pd = s * ad;
        M2 q = s * M2::Identity() + c * a, qd = c * ad;
        M2 pi = p.inverse();
        store(out.h, k, p.transpose() * hd * p + pd.transpose() * h * p + p.transpose() * h * pd);
        store(out.A, k, -pi * pd * pi * q + pi * qd);
    });
    return out;
}

Sym2 metric_at_infinity(const FunnelData& fd)
{
    check_funnel(fd);
    const size_t n = fd.domain.size();
    Sym2 out = sym2_like(n);
    for_nodes(n, [&](size_t k) {
        M2 p = M2::Identity() + endo_at(fd.A, k);
        store(out, k, 0.25 * p.transpose() * metric_at(fd.h, k) * p);
    });
    return out;
}

FunnelIntegrals funnel_integrals(const FunnelData& fd)
{
    if (fd.domain.mode() != DomainMode::Torus)
        throw UnsupportedDomainError("funnel integrals need a closed domain (TORUS, or the Bolza funnel type)");
    check_funnel(fd);
    Grid one(fd.domain.size(), 1.0);
    return FunnelIntegrals{integrate(fd.domain, fd.h, one), integrate(fd.domain, fd.h, trace(fd.A)),
                           integrate(fd.domain, fd.h, det(fd.A))};
}

double ExpPoly::operator()(double T) const
{
    return e2 * std::exp(2.0 * T) + lin * T + c0 + em2 * std::exp(-2.0 * T);
}

ExpPoly segment_volume_profile(const FunnelIntegrals& I)
{
    // det(cosh t + A sinh t) = cosh^2 t + H sinh t cosh t + det A sinh^2 t, with
    //   int_0^T cosh^2    = T/2 + e^{2T}/8 - e^{-2T}/8
    //   int_0^T sinh cosh = e^{2T}/8 + e^{-2T}/8 - 1/4
    //   int_0^T sinh^2    = -T/2 + e^{2T}/8 - e^{-2T}/8
    ExpPoly p;
    p.e2 = (I.area + I.mean + I.det) / 8.0;
    p.lin = (I.area - I.det) / 2.0;
    p.c0 = -I.mean / 4.0;
    p.em2 = (-I.area + I.mean - I.det) / 8.0;
    return p;
}

double segment_volume(const FunnelIntegrals& I, double T)
{
    require(T >= 0.0, "segment_volume: T must be non-negative");
    if (T == 0.0) return 0.0;
    return segment_volume_profile(I)(T);
}

double segment_volume(const FunnelData& fd, double T) { return segment_volume(funnel_integrals(fd), T); }

RenormalizedVolume renormalized_funnel_volume(const FunnelIntegrals& I, double T)
{
    RenormalizedVolume r;
    r.T = T;
    r.finite_part = -0.25 * I.mean;
    r.c2 = 0.125 * (I.area + I.mean + I.det);
    r.c1 = 0.5 * (I.area - I.det);
    // Subtracting c2 e^{2T} from the evaluated volume would cancel ~e^{40}
    // against itself; the divergent terms are removed coefficient-wise instead.
    ExpPoly p = segment_volume_profile(I);
    p.e2 -= r.c2;
    p.lin -= r.c1;
    r.subtraction = p(T);
    r.difference = r.subtraction - r.finite_part;
    return r;
}

double assemble_volr(double volK, const std::vector<FunnelIntegrals>& funnels)
{
    require(volK >= 0.0, "assemble_volr: volK must be non-negative");
    std::vector<double> terms;
    for (const auto& f : funnels) terms.push_back(-0.25 * f.mean);
    return volK + pairwise_sum(terms);
}

} // namespace renvol
