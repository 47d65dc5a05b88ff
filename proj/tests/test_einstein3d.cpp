#include "doctest.h"

#include "renvol/common.hpp"
#include "renvol/einstein3d.hpp"

#include <random>

using namespace renvol;
using namespace renvol::einstein3d;

namespace {

constexpr int kOrd = 3;

Geometry at(const Background& bg, double t, double x, double y)
{
    return Geometry(bg.metric()(jet_point(t, x, y, kOrd)));
}

double max_abs(const Tensor& a)
{
    double m = 0;
    for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k].value()));
    return m;
}

SurfaceSym2 constant_sym2(double xx, double xy, double yy)
{
    return [=](const Jet& x, const Jet&) {
        int n = x.order();
        return std::array<Jet, 3>{Jet(xx, n), Jet(xy, n), Jet(yy, n)};
    };
}

// random 1-form whose components are polynomials in e^t, e^-t, x, y
Field random_oneform(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<std::array<double, 6>, 3> c;
    for (auto& r : c)
        for (double& v : r) v = u(rng);
    return [c](const JetPoint& p) {
        Jet e = exp(p.t), em = exp(-p.t);
        Tensor V(1, p.t.order());
        for (int a = 0; a < 3; ++a) {
            const auto& k = c[a];
            V.at(a) = k[0] * e + k[1] * em + k[2] * e * p.x + k[3] * em * p.y + k[4] * p.x * p.y + k[5] * e * e * p.x * p.x;
        }
        return V;
    };
}

// random symmetric field, polynomial in (e^t, x, y), trace-free w.r.t. g when requested
Field random_sym2(const Background& bg, std::mt19937& rng, bool trace_free)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<std::array<double, 4>, 6> c;
    for (auto& r : c)
        for (double& v : r) v = u(rng);
    Field g = bg.metric();
    return [c, g, trace_free](const JetPoint& p) {
        Jet e = exp(0.5 * p.t);
        Tensor q(2, p.t.order());
        int k = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b, ++k) {
                const auto& w = c[static_cast<size_t>(k)];
                q.at(a, b) = w[0] + w[1] * e * p.x + w[2] * p.y * p.y + w[3] * e * e * p.x * p.y;
                q.at(b, a) = q.at(a, b);
            }
        if (!trace_free) return q;
        Geometry G(g(p));
        return lower_trace_free(G, q);
    };
}

} // namespace

TEST_CASE("jets differentiate composed expressions exactly")
{
    JetPoint p = jet_point(0.3, -0.2, 0.5, 4);
    Jet f = exp(p.x * p.y) * sin(p.t) + 1.0 / (2.0 + p.x);
    double t = 0.3, x = -0.2, y = 0.5;
    CHECK(f.value() == doctest::Approx(std::exp(x * y) * std::sin(t) + 1 / (2 + x)).epsilon(1e-14));
    CHECK(f.derivative(1).value() == doctest::Approx(y * std::exp(x * y) * std::sin(t) - 1 / ((2 + x) * (2 + x))).epsilon(1e-13));
    // d^2/dx dy of e^{xy} sin t = (1 + xy) e^{xy} sin t
    CHECK(f.derivative(1).derivative(2).value() == doctest::Approx((1 + x * y) * std::exp(x * y) * std::sin(t)).epsilon(1e-13));
    // fourth t-derivative of sin is sin
    CHECK(f.derivative(0).derivative(0).derivative(0).derivative(0).value() ==
          doctest::Approx(std::exp(x * y) * std::sin(t)).epsilon(1e-12));
    Jet s = sqrt(cosh(p.t) * cosh(p.t)) - cosh(p.t);
    Jet l = log(exp(p.y)) - p.y;
    for (int d = 0; d < 3; ++d) {
        CHECK(std::abs(s.derivative(d).derivative(d).value()) < 1e-13);
        CHECK(std::abs(l.derivative(d).value()) < 1e-14);
    }
    CHECK_THROWS_AS(Jet(1.0, 0).derivative(0), PreconditionError);
}

TEST_CASE("Koszul table and metric compatibility")
{
    auto pn = default_nodes(true);
    auto tn = default_nodes(false);
    Background geo = geodesic_background(poincare_disk());
    Background horo = horospherical_background();
    CHECK(metric_compatibility(geo, pn) < 1e-12);
    CHECK(metric_compatibility(horo, tn) < 1e-12);
    CHECK(metric_compatibility(flat_torus_background(1.7), tn) < 1e-12);
    CHECK(koszul_residual(geo, pn) < 1e-12);
    CHECK(koszul_residual(horo, tn) < 1e-12);
    CHECK_THROWS_AS(koszul_residual(flat_torus_background(1.7), tn), PreconditionError);

    CHECK(hyperbolicity_residual(geo, pn) < 1e-10);
    CHECK(hyperbolicity_residual(horo, tn) < 1e-10);
    CHECK(hyperbolicity_residual(flat_torus_background(1.7), tn) < 1e-10);
    // flat h with A = 0 is not hyperbolic
    CHECK(hyperbolicity_residual(geodesic_background(flat_metric()), tn) > 0.1);
}

TEST_CASE("ring operator algebra")
{
    Background geo = geodesic_background(poincare_disk());
    for (const auto& n : default_nodes(true)) {
        Geometry G = at(geo, n.t, n.x, n.y);
        double scale = max_abs(G.metric());
        // R g = -2 g
        CHECK(max_abs(ring(G, G.metric()) + 2.0 * G.metric()) < 1e-12 * scale);
        // trace-free symmetric tensors are fixed
        Tensor q(2, kOrd);
        q.at(0, 0) = Jet(0.7, kOrd);
        q.at(0, 1) = q.at(1, 0) = Jet(-0.3, kOrd);
        q.at(1, 2) = q.at(2, 1) = Jet(1.1, kOrd);
        q.at(2, 2) = Jet(0.4, kOrd);
        Tensor q0 = lower_trace_free(G, q);
        CHECK(std::abs(trace(G, q0).value()) < 1e-12);
        CHECK(max_abs(ring(G, q0) - q0) < 1e-12 * scale);
        CHECK(max_abs(ring(G, Tensor(2, kOrd))) == 0.0);
    }
    std::mt19937 rng(11);
    CHECK(ring_residual(geo, random_sym2(geo, rng, false), default_nodes(true)) < 1e-11);
    Background horo = horospherical_background();
    CHECK(ring_residual(horo, random_sym2(horo, rng, false), default_nodes(false)) < 1e-11);
}

TEST_CASE("funnel deformation closed forms")
{
    Background geo = geodesic_background(poincare_disk());
    Field zero = funnel_deformation(geo, constant_sym2(0, 0, 0), zero_endo());
    SurfaceSym2 hd = constant_sym2(0.3, -0.2, 0.5);
    Field cosh2 = funnel_deformation(geo, hd, zero_endo());
    for (const auto& n : default_nodes(true)) {
        JetPoint p = jet_point(n.t, n.x, n.y, kOrd);
        CHECK(max_abs(zero(p)) == 0.0);
        Tensor g = cosh2(p);
        double c2 = std::cosh(n.t) * std::cosh(n.t);
        CHECK(g.at(1, 1).value() == doctest::Approx(0.3 * c2).epsilon(1e-14));
        CHECK(g.at(1, 2).value() == doctest::Approx(-0.2 * c2).epsilon(1e-14));
        CHECK(g.at(2, 2).value() == doctest::Approx(0.5 * c2).epsilon(1e-14));
        CHECK(g.at(0, 0).value() == 0.0);
        CHECK(g.at(0, 1).value() == 0.0);
    }
}

TEST_CASE("linearized Einstein operator on exact families")
{
    // A(s) = diag(lambda(s), 1/lambda(s)) on the flat torus, lambda(0) = 1.7, lambda'(0) = 0.6
    double lam = 1.7, dl = 0.6;
    Background bg = flat_torus_background(lam);
    Field gdot = funnel_deformation(bg, constant_sym2(0, 0, 0), constant_endo(dl, 0, 0, -dl / (lam * lam)));
    auto nodes = default_nodes(false);
    for (const auto& n : nodes) {
        Tensor g = gdot(jet_point(n.t, n.x, n.y, kOrd));
        double c = std::cosh(n.t), s = std::sinh(n.t);
        CHECK(g.at(1, 1).value() == doctest::Approx(2 * (c + lam * s) * s * dl).epsilon(1e-13));
        CHECK(g.at(2, 2).value() == doctest::Approx(-2 * (c + s / lam) * s * dl / (lam * lam)).epsilon(1e-13));
    }
    CHECK(linearized_einstein_residual(bg, gdot, nodes) <= 1e-8);
    CHECK(linearized_einstein_residual(bg, funnel_deformation(bg, constant_sym2(0, 0, 0), zero_endo()), nodes) == 0.0);
    // moving A off the hyperbolic locus is detected
    Field off = funnel_deformation(bg, constant_sym2(0, 0, 0), constant_endo(1, 0, 0, 1));
    CHECK(linearized_einstein_residual(bg, off, nodes) > 1e-3);

    // holomorphic directions over the Poincare disk
    Background geo = geodesic_background(poincare_disk());
    auto pn = default_nodes(true);
    SurfaceSym2 tt = holomorphic_tt({{1.0, 0.2}, {0.5, -0.4}, {0.0, 0.3}});
    CHECK(linearized_einstein_residual(geo, funnel_deformation(geo, tt, zero_endo()), pn) <= 1e-8);
    CHECK(linearized_einstein_residual(geo, funnel_deformation(geo, constant_sym2(0, 0, 0), raise(poincare_disk(), tt)), pn) <= 1e-8);

    CHECK_THROWS_AS(linearized_einstein_residual(geodesic_background(flat_metric()), gdot, nodes), PreconditionError);
}

TEST_CASE("pure gauge directions are in the kernel")
{
    std::mt19937 rng(2024);
    std::vector<std::pair<Background, std::vector<Node>>> cases = {
        {flat_torus_background(1.7), default_nodes(false)},
        {horospherical_background(), default_nodes(false)},
        {geodesic_background(poincare_disk()), default_nodes(true)},
    };
    for (int k = 0; k < 10; ++k) {
        const auto& [bg, nodes] = cases[static_cast<size_t>(k) % cases.size()];
        Field V = random_oneform(rng);
        double r = linearized_einstein_residual(bg, gauge_direction(bg, V), nodes);
        CAPTURE(k);
        CHECK(r <= 1e-8);
        CHECK(vector_identity_residual(bg, V, nodes) <= 1e-8);
    }
}

TEST_CASE("trace and divergence of the funnel deformation")
{
    Background geo = geodesic_background(poincare_disk());
    auto pn = default_nodes(true);
    SurfaceSym2 tt = holomorphic_tt({{0.8, 0.1}, {-0.3, 0.6}});
    auto td = trace_div_3d(geo, funnel_deformation(geo, tt, zero_endo()), pn);
    CHECK(td.trace <= 1e-8);
    CHECK(td.divergence <= 1e-8);
    td = trace_div_3d(geo, funnel_deformation(geo, constant_sym2(0, 0, 0), raise(poincare_disk(), tt)), pn);
    CHECK(td.trace <= 1e-8);
    CHECK(td.divergence <= 1e-8);
    // constant trace-free data on the horospherical torus funnel
    Background horo = horospherical_background();
    td = trace_div_3d(horo, funnel_deformation(horo, constant_sym2(0.2, 0.1, -0.2), constant_endo(0.3, -0.1, -0.1, -0.3)),
                      default_nodes(false));
    CHECK(td.trace == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(td.divergence == 0.0);
    CHECK(bianchi_gauge_residual(geo, funnel_deformation(geo, tt, zero_endo()), pn) <= 1e-8);

    // h itself: the trace is 2 at every t
    Field pure = funnel_deformation(geo, poincare_disk(), zero_endo());
    for (const auto& n : pn) {
        Geometry G = at(geo, n.t, n.x, n.y);
        CHECK(trace(G, pure(jet_point(n.t, n.x, n.y, kOrd))).value() == doctest::Approx(2.0).epsilon(1e-13));
    }

    // a non-divergence-free hdot: the spatial part of delta_3 is delta_h hdot and the
    // t part is tanh(t) Tr_h hdot; delta_h is evaluated here with central differences
    SurfaceSym2 hdot = [](const Jet& x, const Jet& y) { return std::array<Jet, 3>{x * y + 1.0, x * x - y, 0.5 * y * y * x}; };
    Field gdot = funnel_deformation(geo, hdot, zero_endo());
    auto val = [](const SurfaceSym2& f, double x, double y) {
        auto a = f(Jet(x, 0), Jet(y, 0));
        return std::array<double, 3>{a[0].value(), a[1].value(), a[2].value()};
    };
    auto comp = [](const std::array<double, 3>& a, int i, int j) { return i == j ? a[static_cast<size_t>(2 * i)] : a[1]; };
    for (const auto& n : pn) {
        const double e = 1e-4;
        auto h0 = val(poincare_disk(), n.x, n.y);
        auto q0 = val(hdot, n.x, n.y);
        double det = h0[0] * h0[2] - h0[1] * h0[1];
        double hi[2][2] = {{h0[2] / det, -h0[1] / det}, {-h0[1] / det, h0[0] / det}};
        double dh[2][2][2], dq[2][2][2];   // d_l of component (i, j)
        for (int l = 0; l < 2; ++l) {
            double px = n.x + (l == 0 ? e : 0), py = n.y + (l == 1 ? e : 0);
            double mx = n.x - (l == 0 ? e : 0), my = n.y - (l == 1 ? e : 0);
            auto hp = val(poincare_disk(), px, py), hm = val(poincare_disk(), mx, my);
            auto qp = val(hdot, px, py), qm = val(hdot, mx, my);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    dh[l][i][j] = (comp(hp, i, j) - comp(hm, i, j)) / (2 * e);
                    dq[l][i][j] = (comp(qp, i, j) - comp(qm, i, j)) / (2 * e);
                }
        }
        double gam[2][2][2];   // Gamma^k_ij of h
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double s = 0;
                    for (int l = 0; l < 2; ++l) s += hi[k][l] * (dh[i][j][l] + dh[j][i][l] - dh[l][i][j]);
                    gam[k][i][j] = 0.5 * s;
                }
        double div[2] = {0, 0}, trh = 0;
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k) {
                    double nab = dq[i][k][j];
                    for (int l = 0; l < 2; ++l) nab -= gam[l][i][k] * comp(q0, l, j) + gam[l][i][j] * comp(q0, k, l);
                    div[j] -= hi[i][k] * nab;
                }
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) trh += hi[i][k] * comp(q0, i, k);

        Geometry G = at(geo, n.t, n.x, n.y);
        Tensor d3 = divergence(G, gdot(jet_point(n.t, n.x, n.y, kOrd)));
        CHECK(d3.at(0).value() == doctest::Approx(std::tanh(n.t) * trh).epsilon(1e-10));
        CHECK(d3.at(1).value() == doctest::Approx(div[0]).epsilon(1e-6));
        CHECK(d3.at(2).value() == doctest::Approx(div[1]).epsilon(1e-6));
    }
}

TEST_CASE("Bianchi operator on pure trace tensors")
{
    Background geo = geodesic_background(poincare_disk());
    Field g = geo.metric();
    for (const auto& n : default_nodes(true)) {
        JetPoint p = jet_point(n.t, n.x, n.y, kOrd);
        Geometry G(g(p));
        Jet a = exp(p.t) * (p.x * p.x + p.y) + 0.5;
        Tensor lhs = bianchi(G, a * G.metric());
        Tensor rhs = 0.5 * differential(G, a);
        CHECK(max_abs(lhs - rhs) < 1e-11 * (1 + max_abs(rhs)));
        CHECK(max_abs(bianchi(G, Tensor(2, kOrd))) == 0.0);
    }
}

TEST_CASE("Weitzenbock identities")
{
    std::mt19937 rng(7);
    auto constant_a = [](const JetPoint& p) { return Jet(2.5, p.t.order()); };
    auto zero_a = [](const JetPoint& p) { return Jet(0.0, p.t.order()); };
    Background horo = horospherical_background();
    auto tn = default_nodes(false);

    // constant TT data on the horospherical funnel
    Field q0 = funnel_deformation(horo, constant_sym2(0.4, 0.3, -0.4), zero_endo());
    auto w = weitzenbock_residual(horo, q0, constant_a, tn);
    CHECK(w.r1 <= 1e-8);
    CHECK(w.r2 <= 1e-12);
    auto zero = funnel_deformation(horo, constant_sym2(0, 0, 0), zero_endo());
    w = weitzenbock_residual(horo, zero, zero_a, tn);
    CHECK(w.r1 == 0.0);
    CHECK(w.r2 == 0.0);
    auto ta = [](const JetPoint& p) { return exp(2.0 * p.t) - 3.0 * exp(-p.t); };
    Background tor = flat_torus_background(1.7);
    Field tq = funnel_deformation(tor, constant_sym2(0.4, 0.3, -0.4), constant_endo(0.6, 0, 0, -0.6 / (1.7 * 1.7)));
    Field tq0 = [tor, tq](const JetPoint& p) { return lower_trace_free(Geometry(tor.metric()(p)), tq(p)); };
    w = weitzenbock_residual(tor, tq0, ta, tn);
    CHECK(w.r1 <= 1e-8);
    CHECK(w.r2 <= 1e-8);

    // random Sigma-dependent data over the Poincare disk
    Background geo = geodesic_background(poincare_disk());
    auto pn = default_nodes(true);
    auto pa = [](const JetPoint& p) { return exp(p.t) * p.x * p.y + sin(p.x) - p.t * p.t; };
    for (int k = 0; k < 3; ++k) {
        w = weitzenbock_residual(geo, random_sym2(geo, rng, true), pa, pn);
        CHECK(w.r1 <= 1e-8);
        CHECK(w.r2 <= 1e-8);
        CHECK(decomposition_residual(geo, random_sym2(geo, rng, false), pn) <= 1e-8);
    }
    CHECK_THROWS_AS(weitzenbock_residual(geo, random_sym2(geo, rng, false), pa, pn), PreconditionError);
}
