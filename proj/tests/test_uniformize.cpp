#include "doctest.h"

#include "renvol/bolza_context.hpp"
#include "renvol/report.hpp"
#include "renvol/uhlenbeck.hpp"
#include "renvol/uniformize.hpp"

#include <random>

using namespace renvol;

namespace {

const BolzaContext& ctx()
{
    static BolzaContext c = make_bolza_context(3, 6);
    return c;
}

std::vector<double> constant(size_t n, double v) { return std::vector<double>(n, v); }

double area(const BolzaFem& fem, const std::vector<double>& omega)
{
    std::vector<double> e(omega.size());
    for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(2 * omega[i]);
    return integrate(fem, e);
}

} // namespace

TEST_CASE("constant solutions")
{
    auto mesh = ctx().mesh;
    const size_t n = mesh->num_dofs();
    BolzaFem P = assemble(BolzaMetric::poincare(mesh));
    auto sol = liouville_solve(P, constant(n, -1.0));
    for (double w : sol.omega) CHECK(w == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(sol.iterations <= 12);

    auto psi = constant(n, -std::log(2.0));
    BolzaFem quarter = assemble(BolzaMetric::conformal(mesh, psi));
    auto k4 = conformal_curvature(P, psi);
    for (double k : k4) CHECK(k == doctest::Approx(-4.0).epsilon(1e-13));
    auto z = liouville_solve(quarter, k4);
    CHECK(z.iterations == 0);
    CHECK(max_abs(z.omega) == 0.0);
    // area of the curvature -4 metric is pi (g - 1) = pi
    CHECK(std::abs(area(quarter, z.omega) / kPi - 1) < 5e-3);
}

TEST_CASE("multi-start uniqueness and convergence")
{
    const auto& c = ctx();
    const size_t n = c.mesh->num_dofs();
    BolzaFem P = assemble(BolzaMetric::poincare(c.mesh));
    auto q0 = quadratic_norm2(*c.mesh, c.q);
    auto q2 = quadratic_norm2(*c.mesh, bolza_differential(c, 2));
    std::vector<double> psi(n);
    for (size_t i = 0; i < n; ++i) psi[i] = 0.1 * q0[i] - 0.08 * q2[i] + 0.1;
    BolzaFem fem = assemble(BolzaMetric::conformal(c.mesh, psi));
    auto kappa = conformal_curvature(P, psi);

    auto a = liouville_solve(fem, kappa);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    std::vector<double> init(n);
    for (auto& v : init) v = -std::log(2.0) + noise(rng);
    auto b = liouville_solve(fem, kappa, init);
    double d = 0;
    for (size_t i = 0; i < n; ++i) d = std::max(d, std::abs(a.omega[i] - b.omega[i]));
    CHECK(d < 1e-9);
    CHECK(a.iterations <= 12);
    CHECK(a.residual <= 1e-10 * (1 + max_abs(kappa)));
    REQUIRE(a.quadratic_ratios.size() >= 3);
    for (size_t i = a.quadratic_ratios.size() - 3; i < a.quadratic_ratios.size(); ++i) CHECK(a.quadratic_ratios[i] < 10.0);
    CHECK(std::abs(area(fem, a.omega) / kPi - 1) < 5e-3);
    CHECK(maximum_principle(kappa, a.omega).holds(1e-3));
    // a lower bound built from max(-kappa) instead of min(-kappa) fails on a genuine solution
    auto mp = maximum_principle(kappa, a.omega);
    CHECK(mp.min_omega < mp.upper);
}

TEST_CASE("Gauss-Bonnet obstruction")
{
    auto t = GridDomain::torus(16);
    Sym2 flat = sym2_sample(t, [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                            [](double, double) { return 1.0; });
    CHECK_THROWS_AS(liouville_solve(t, flat), GaussBonnetError);
    BolzaFem P = assemble(BolzaMetric::poincare(ctx().mesh));
    CHECK_THROWS_AS(liouville_solve(P, constant(P.mass.size(), 1.0)), GaussBonnetError);
}

TEST_CASE("Polyakov difference closed forms")
{
    auto mesh = ctx().mesh;
    const size_t n = mesh->num_dofs();
    BolzaFem quarter = assemble(BolzaMetric::conformal(mesh, constant(n, -std::log(2.0))));
    auto k4 = constant(n, -4.0);
    CHECK(polyakov_difference(quarter, k4, constant(n, 0.0)) == 0.0);
    double V0 = integrate(quarter, constant(n, 1.0));
    CHECK(polyakov_difference(quarter, k4, constant(n, 0.3)) == doctest::Approx(2 * 0.3 * V0).epsilon(1e-13));

    auto w0 = omega2_predict(quarter, k4, constant(n, 0.0));
    CHECK(max_abs(w0) == 0.0);
    auto wc = omega2_predict(quarter, k4, constant(n, 1.6));
    for (double w : wc) CHECK(w == doctest::Approx(-0.1).epsilon(1e-9));
    CHECK_THROWS_AS(omega2_predict(quarter, constant(n, -1.0), k4), PreconditionError);
}

TEST_CASE("second-order perturbation of the conformal factor")
{
    const auto& c = ctx();
    const size_t n = c.mesh->num_dofs();
    BolzaFem base = assemble(BolzaMetric::conformal(c.mesh, constant(n, -std::log(2.0))));
    auto qn = quadratic_norm2(*c.mesh, c.q);
    std::vector<double> kdd(n);
    for (size_t i = 0; i < n; ++i) kdd[i] = -16 * qn[i];   // -8 tr(Adot^2)
    auto w2 = omega2_predict(base, constant(n, -4.0), kdd);
    double ikdd = integrate(base, kdd);

    std::vector<double> ss{0.01, 0.02, 0.04}, dev, poly;
    for (double s : ss) {
        auto f = uhlenbeck_construct(c.mesh, c.q, s);
        BolzaFem fem = assemble(metric_at_infinity(f));
        auto kinf = curvature_at_infinity(f);
        auto sol = liouville_solve(fem, kinf);
        double e = 0;
        for (size_t i = 0; i < n; ++i) e = std::max(e, std::abs(sol.omega[i] - s * s * w2[i]));
        dev.push_back(e);
        double p = polyakov_difference(fem, kinf, sol.omega);
        poly.push_back(p);
        CHECK(p >= -1e-9);
        CHECK(p / (s * s) == doctest::Approx(-ikdd / 8).epsilon(0.02));
    }
    CHECK(fitted_order(ss, dev) >= 2.8);
}
