#include <doctest.h>

#include "renvol/report.hpp"
#include "renvol/tensorcalc.hpp"

using namespace renvol;

namespace {

constexpr double tp = 2 * kPi;

// Conformal metric e^{2 phi} |dz|^2 on the unit torus.
double phi(double x, double y) { return 0.2 * std::sin(tp * x) + 0.1 * std::cos(tp * y) * std::sin(tp * x); }
double flat_lap_phi(double x, double y)
{
    return -0.2 * tp * tp * std::sin(tp * x) - 0.2 * tp * tp * std::cos(tp * y) * std::sin(tp * x);
}

Sym2 conformal_torus(const GridDomain& d)
{
    return sym2_sample(d, [](double x, double y) { return std::exp(2 * phi(x, y)); }, [](double, double) { return 0.0; },
                       [](double x, double y) { return std::exp(2 * phi(x, y)); });
}

// Non-conformal periodic metric.
Sym2 skew_torus(const GridDomain& d)
{
    return sym2_sample(
        d, [](double x, double y) { return 1.3 + 0.2 * std::sin(tp * x); },
        [](double x, double y) { return 0.3 * std::cos(tp * (x + y)); },
        [](double x, double y) { return 1.0 + 0.25 * std::cos(tp * y) * std::sin(tp * x); });
}

double rho2(double x, double y)
{
    double s = 1 - x * x - y * y;
    return 4 / (s * s);
}

Sym2 hyperbolic_patch(const GridDomain& d)
{
    return sym2_sample(d, rho2, [](double, double) { return 0.0; }, rho2);
}

double inner(const GridDomain& d, const Sym2& h, const Sym2& a, const Sym2& b)
{
    Endo ra = raise(h, a), rb = raise(h, b);
    Grid f(d.size());
    for (size_t k = 0; k < d.size(); ++k) f[k] = ra.m00[k] * rb.m00[k] + ra.m01[k] * rb.m10[k] + ra.m10[k] * rb.m01[k] + ra.m11[k] * rb.m11[k];
    return integrate(d, h, f);
}

double inner(const GridDomain& d, const Sym2& h, const OneForm& a, const OneForm& b)
{
    Sym2 inv = metric_inverse(h);
    Grid f(d.size());
    for (size_t k = 0; k < d.size(); ++k)
        f[k] = inv.xx[k] * a.x[k] * b.x[k] + inv.xy[k] * (a.x[k] * b.y[k] + a.y[k] * b.x[k]) + inv.yy[k] * a.y[k] * b.y[k];
    return integrate(d, h, f);
}

} // namespace

TEST_CASE("gauss curvature of conformal torus metrics")
{
    std::vector<double> h, err;
    for (int n : {32, 64, 128}) {
        auto d = GridDomain::torus(n);
        Grid k = gauss_curvature(d, conformal_torus(d));
        Grid ex = sample(d, [](double x, double y) { return -std::exp(-2 * phi(x, y)) * flat_lap_phi(x, y); });
        double e = 0;
        for (size_t p = 0; p < d.size(); ++p) e = std::max(e, std::abs(k[p] - ex[p]));
        h.push_back(d.dx());
        err.push_back(e);
    }
    CHECK(err.back() < 1e-5 * 16.0);
    CHECK(fitted_order(h, err) > 3.5);
    // Gauss-Bonnet on the torus
    auto d = GridDomain::torus(64);
    Sym2 g = skew_torus(d);
    CHECK(std::abs(integrate(d, g, gauss_curvature(d, g))) < 1e-6);
}

TEST_CASE("hyperbolic patch has curvature -1 in the interior")
{
    auto d = GridDomain::patch(128, -0.3, -0.3, 0.6, 8);
    Grid k = gauss_curvature(d, hyperbolic_patch(d));
    double e = 0;
    for (size_t p : d.evaluation_set()) e = std::max(e, std::abs(k[p] + 1));
    CHECK(e < 1e-6);
    CHECK_THROWS_AS(integrate(d, hyperbolic_patch(d), k), UnsupportedDomainError);
}

TEST_CASE("laplacian sign and summation by parts")
{
    auto d = GridDomain::torus(64);
    Sym2 flat = sym2_sample(d, [](double, double) { return 1.0; }, [](double, double) { return 0.0; }, [](double, double) { return 1.0; });
    Grid f = sample(d, [](double x, double) { return std::sin(tp * x); });
    Grid lf = laplacian(d, flat, f);
    for (size_t p = 0; p < d.size(); p += 97) CHECK(lf[p] == doctest::Approx(tp * tp * f[p]).epsilon(1e-5));
    Sym2 h = skew_torus(d);
    Grid g = sample(d, [](double x, double y) { return std::cos(tp * (x - 2 * y)); });
    Grid lg = laplacian(d, h, g);
    double lhs = integrate(d, h, [&] { Grid t(d.size()); for (size_t p = 0; p < d.size(); ++p) t[p] = lg[p] * f[p]; return t; }());
    double rhs = inner(d, h, differential(d, g), differential(d, f));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // positive operator
    CHECK(inner(d, h, differential(d, g), differential(d, g)) > 0);
}

TEST_CASE("divergence is the exact adjoint of the symmetrized gradient")
{
    auto d = GridDomain::torus(48);
    Sym2 h = skew_torus(d);
    Sym2 s = sym2_sample(d, [](double x, double y) { return std::sin(tp * x) * std::cos(tp * y); },
                         [](double x, double y) { return 0.4 + std::cos(2 * tp * x); },
                         [](double x, double y) { return std::sin(tp * (x + 2 * y)); });
    OneForm xi{sample(d, [](double x, double y) { return std::cos(tp * y) + 0.3 * std::sin(tp * x); }),
               sample(d, [](double x, double y) { return std::sin(2 * tp * x - tp * y); })};
    double a = inner(d, h, divergence(d, h, s), xi);
    double b = inner(d, h, s, sym_gradient(d, h, xi));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("lie derivative against the coordinate formula")
{
    auto d = GridDomain::patch(128, -0.3, -0.3, 0.6, 8);
    Sym2 h = hyperbolic_patch(d);
    auto vx = [](double x, double y) { return 0.3 + x * y; };
    auto vy = [](double x, double y) { return x * x - 0.5 * y; };
    Sym2 L = lie_derivative(d, h, sample(d, vx), sample(d, vy));
    double e = 0;
    for (size_t p : d.evaluation_set()) {
        int i = static_cast<int>(p % d.side()), j = static_cast<int>(p / d.side());
        double x = d.x(i), y = d.y(j);
        double r = rho2(x, y), s = 1 - x * x - y * y;
        double rx = 16 * x / (s * s * s), ry = 16 * y / (s * s * s);
        // (L_V h)_ij = V.grad(rho2) delta_ij + rho2 (d_i V^j + d_j V^i)
        double vdr = vx(x, y) * rx + vy(x, y) * ry;
        double dxvx = y, dyvx = x, dxvy = 2 * x, dyvy = -0.5;
        double exx = vdr + 2 * r * dxvx, exy = r * (dyvx + dxvy), eyy = vdr + 2 * r * dyvy;
        e = std::max({e, std::abs(L.xx[p] - exx), std::abs(L.xy[p] - exy), std::abs(L.yy[p] - eyy)});
    }
    CHECK(e < 1e-6);
}

TEST_CASE("codazzi holds for holomorphic second fundamental forms")
{
    auto d = GridDomain::patch(64, -0.3, -0.3, 0.6, 8);
    Sym2 h = hyperbolic_patch(d);
    // II = Re(q dz^2), q = 1 + z^2
    auto re_q = [](double x, double y) { return 1 + x * x - y * y; };
    auto im_q = [](double x, double y) { return 2 * x * y; };
    Sym2 II = sym2_sample(d, re_q, [&](double x, double y) { return -im_q(x, y); }, [&](double x, double y) { return -re_q(x, y); });
    Endo A = raise(h, II);
    OneForm c = codazzi_residual(d, h, A);
    CHECK(sup_norm(norm(h, c), d.evaluation_set()) < 1e-6);
    auto t = GridDomain::torus(32);
    Sym2 flat = sym2_sample(t, [](double, double) { return 1.0; }, [](double, double) { return 0.0; }, [](double, double) { return 1.0; });
    OneForm c0 = codazzi_residual(t, flat, endo_constant(t, 0.7, 0.2, 0.2, -0.1));
    CHECK(sup_norm(norm(flat, c0), t.evaluation_set()) < 1e-13);
}

TEST_CASE("tt projection on flat tori")
{
    auto d = GridDomain::torus(32);
    Sym2 h = sym2_sample(d, [](double, double) { return 1.3; }, [](double, double) { return 0.3; }, [](double, double) { return 1.0; });
    Sym2 s = sym2_sample(d, [](double x, double y) { return std::sin(tp * x) * std::cos(tp * y); },
                         [](double x, double y) { return 0.4 + std::cos(2 * tp * x); },
                         [](double x, double y) { return std::sin(tp * (x + 2 * y)); });
    Sym2 tt = tt_project(d, h, s);
    CHECK(sup_norm(norm(h, divergence(d, h, tt)), d.evaluation_set()) < 1e-8);
    CHECK(sup_norm(trace(h, tt), d.evaluation_set()) < 1e-12);
    Sym2 tt2 = tt_project(d, h, tt);
    CHECK(sup_norm(norm(h, tt2 - tt), d.evaluation_set()) < 1e-8);
    // pure gauge tensors have no TT part
    Sym2 gauge = lie_derivative(d, h, sample(d, [](double x, double y) { return std::sin(tp * y); }),
                                sample(d, [](double x, double) { return std::cos(tp * x); }));
    CHECK(sup_norm(norm(h, tt_project(d, h, gauge)), d.evaluation_set()) < 1e-8);
    // pure trace has no TT part; parallel trace-free tensors are kept
    CHECK(sup_norm(norm(h, tt_project(d, h, scale(s.xx, h))), d.evaluation_set()) < 1e-8);
    Sym2 par = trace_free(h, sym2_sample(d, [](double, double) { return 0.5; }, [](double, double) { return -0.2; }, [](double, double) { return 0.1; }));
    CHECK(sup_norm(norm(h, tt_project(d, h, par) - par), d.evaluation_set()) < 1e-12);
}

TEST_CASE("curvature variation formula against a finite difference")
{
    auto d = GridDomain::patch(128, -0.3, -0.3, 0.6, 8);
    Sym2 h = hyperbolic_patch(d);
    Sym2 hdot = sym2_sample(d, [](double x, double y) { return 1 + x * y; }, [](double x, double y) { return 0.5 * x - y * y; },
                            [](double x, double y) { return 2 + std::sin(x); });
    Grid lhs = curvature_variation_lhs(d, h, hdot);
    const double e = 1e-4;
    Grid kp = gauss_curvature(d, h + e * hdot), km = gauss_curvature(d, h - e * hdot);
    Grid k2p = gauss_curvature(d, h + 2 * e * hdot), k2m = gauss_curvature(d, h - 2 * e * hdot);
    double err = 0, mag = 0;
    for (size_t p : d.evaluation_set()) {
        double fd = (8 * (kp[p] - km[p]) - (k2p[p] - k2m[p])) / (12 * e);
        err = std::max(err, std::abs(fd - lhs[p]));
        mag = std::max(mag, std::abs(fd));
    }
    CHECK(mag > 0.1);
    CHECK(err < 1e-6);
    CHECK_THROWS_AS(curvature_variation_lhs(d, 2.0 * h, hdot), PreconditionError);
}
