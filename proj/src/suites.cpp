#include "renvol/suites.hpp"
#include "renvol/einstein3d.hpp"
#include "renvol/field_io.hpp"
#include "renvol/uniformize.hpp"
#include "renvol/variation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

namespace renvol {

namespace {

constexpr double tp = 2 * kPi;

CheckResult thrown(std::string name, bool threw, std::string note)
{
    return make_check(std::move(name), threw ? 1.0 : 0.0, 1.0, 0.0, std::move(note));
}

void prefix(Report& r, const std::string& anchor)
{
    for (auto& c : r.checks) c.name = anchor + ": " + c.name;
    for (auto& s : r.sweeps) s.name = anchor + ": " + s.name;
}

Sym2 flat(const GridDomain& d)
{
    return sym2_sample(d, [](double, double) { return 1.0; }, [](double, double) { return 0.0; }, [](double, double) { return 1.0; });
}

double sup_diff(const Grid& a, const Grid& b, const std::vector<size_t>& set)
{
    double e = 0;
    for (size_t k : set) e = std::max(e, std::abs(a[k] - b[k]));
    return e;
}

double l2_inner(const GridDomain& d, const Sym2& h, const Sym2& a, const Sym2& b)
{
    Endo ra = raise(h, a), rb = raise(h, b);
    Grid f(d.size());
    for (size_t k = 0; k < d.size(); ++k)
        f[k] = ra.m00[k] * rb.m00[k] + ra.m01[k] * rb.m10[k] + ra.m10[k] * rb.m01[k] + ra.m11[k] * rb.m11[k];
    return integrate(d, h, f);
}

double l2_inner(const GridDomain& d, const Sym2& h, const OneForm& a, const OneForm& b)
{
    Sym2 inv = metric_inverse(h);
    Grid f(d.size());
    for (size_t k = 0; k < d.size(); ++k)
        f[k] = inv.xx[k] * a.x[k] * b.x[k] + inv.xy[k] * (a.x[k] * b.y[k] + a.y[k] * b.x[k]) + inv.yy[k] * a.y[k] * b.y[k];
    return integrate(d, h, f);
}

Sym2 skew_torus(const GridDomain& d)
{
    return sym2_sample(
        d, [](double x, double) { return 1.3 + 0.2 * std::sin(tp * x); }, [](double x, double y) { return 0.3 * std::cos(tp * (x + y)); },
        [](double x, double y) { return 1.0 + 0.25 * std::cos(tp * y) * std::sin(tp * x); });
}

cplx patch_q(cplx z) { return 1.0 + z + 0.5 * z * z; }

GridDomain patch_at(const Scene& s, int n) { return GridDomain::patch(n, s.patch_origin, s.patch_origin, s.patch_extent, s.patch_buffer); }

double bolza_area(const BolzaFem& fem, const std::vector<double>& omega)
{
    std::vector<double> e(omega.size());
    for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(2 * omega[i]);
    return integrate(fem, e);
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"fuchsian", "fields", "tensorcalc", "funnel", "uniformize", "einstein3d", "variation"};
    return names;
}

SuiteRunner::SuiteRunner(Scene scene) : m_scene(std::move(scene)) {}

const BolzaContext& SuiteRunner::bolza()
{
    if (!m_bolza) m_bolza = std::make_unique<BolzaContext>(make_bolza_context(m_scene.bolza_refinement, m_scene.word_length));
    return *m_bolza;
}

const std::vector<cplx>& SuiteRunner::second_differential()
{
    if (m_q2.empty()) m_q2 = bolza_differential(bolza(), 2);
    return m_q2;
}

Report SuiteRunner::run(const std::string& suite)
{
    if (suite == "all") {
        Report all;
        for (const auto& n : suite_names()) all.append(run(n));
        return all;
    }
    if (suite == "fuchsian") return fuchsian();
    if (suite == "fields") return fields();
    if (suite == "tensorcalc") return tensorcalc();
    if (suite == "funnel") return funnel();
    if (suite == "uniformize") return uniformize();
    if (suite == "einstein3d") return einstein3d();
    if (suite == "variation") return variation();
    throw InputError("unknown suite '" + suite + "'");
}

Report SuiteRunner::fuchsian()
{
    using namespace fuchsian;
    Report rep;
    const auto& ctx = bolza();
    const FuchsianGroup& G = *ctx.group;

    double angle = 0;
    for (int k = 0; k < 8; ++k) angle = std::max(angle, std::abs(interior_angle(G.vertices, k) - kPi / 4));
    rep.add(make_residual_check("bolza-octagon: interior angles are pi/4", angle, 1e-12));
    const double cot = 1.0 / std::tan(kPi / 8);
    rep.add(make_check("bolza-octagon: cosh of the circumradius is cot^2(pi/8)", std::cosh(2 * std::atanh(G.vertex_radius)),
                       cot * cot, 1e-12 * cot * cot));
    rep.add(make_check("bolza-octagon: cosh of the inradius is cot(pi/8)", std::cosh(2 * std::atanh(G.side_midpoint_radius)), cot,
                       1e-12 * cot));
    rep.add(make_residual_check("bolza-octagon: side pairings", G.side_pairing_residual(), 1e-12));
    rep.add(make_residual_check("bolza-octagon: relation word is the identity", G.relation_residual(), 1e-10));

    auto expect = growth_series_counts(m_scene.word_length);
    double miss = 0;
    for (size_t n = 0; n < expect.size(); ++n)
        miss += std::abs(static_cast<double>(ctx.ball->count_by_length.at(n)) - static_cast<double>(expect[n]));
    rep.add(make_residual_check("group-growth: word counts up to length " + std::to_string(m_scene.word_length), miss, 0.0,
                                "total elements " + std::to_string(ctx.ball->elements.size())));

    auto samples = octagon_samples(G, 100);
    PoincareSeries q0(ctx.group, ctx.ball, ctx.power), q1(ctx.group, ctx.ball, 1);
    auto v0 = q0.evaluate(samples), v1 = q1.evaluate(samples);
    double m0 = 0, m1 = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        m0 = std::max(m0, std::abs(v0[i]));
        m1 = std::max(m1, std::abs(v1[i]));
    }
    // z -> -z fixes every quadratic differential, so the odd series vanishes only in the limit
    rep.add(make_check("poincare-series: the odd seed z is at truncation level relative to z^" + std::to_string(ctx.power), m1 / m0,
                       0.0, 1e-3));
    rep.add(make_check("poincare-series: equivariance of the seed z^" + std::to_string(ctx.power) + " relative to its size",
                       q0.equivariance_residual(samples) / m0, 0.0, 1e-3));
    cplx z(0.1, 0.2);
    const double e = 1e-5;
    cplx dx = (q0.evaluate(z + e) - q0.evaluate(z - e)) / (2 * e);
    cplx dy = (q0.evaluate(z + cplx(0, e)) - q0.evaluate(z - cplx(0, e))) / (2 * e);
    rep.add(make_residual_check("poincare-series: Cauchy-Riemann", std::abs(dy - cplx(0, 1) * dx) / (1 + std::abs(dx)), 1e-6));

    // truncation error against word length, shorter balls re-enumerated
    Sweep sw{"poincare-series equivariance vs word length", "word_length", "relative_residual", {}, {}};
    Sweep odd{"poincare-series odd seed vs word length", "word_length", "relative_size", {}, {}};
    int increases = 0, odd_increases = 0;
    for (int L = std::max(2, m_scene.word_length - 3); L <= m_scene.word_length; ++L) {
        double r, o;
        if (L == m_scene.word_length) {
            r = q0.equivariance_residual(samples) / m0;
            o = m1 / m0;
        } else {
            auto ball = std::make_shared<const GroupBall>(enumerate_group(G, L));
            PoincareSeries q(ctx.group, ball, ctx.power), qo(ctx.group, ball, 1);
            auto v = q.evaluate(samples), vo = qo.evaluate(samples);
            double m = 0, mo = 0;
            for (size_t i = 0; i < v.size(); ++i) {
                m = std::max(m, std::abs(v[i]));
                mo = std::max(mo, std::abs(vo[i]));
            }
            r = q.equivariance_residual(samples) / m;
            o = mo / m;
        }
        if (!sw.y.empty() && r >= sw.y.back()) ++increases;
        if (!odd.y.empty() && o >= odd.y.back()) ++odd_increases;
        sw.x.push_back(L);
        sw.y.push_back(r);
        odd.x.push_back(L);
        odd.y.push_back(o);
    }
    rep.sweeps.push_back(sw);
    rep.sweeps.push_back(odd);
    rep.add(make_residual_check("poincare-series: equivariance improves with every word length", increases, 0.0));
    rep.add(make_residual_check("poincare-series: the odd seed shrinks with every word length", odd_increases, 0.0));
    return rep;
}

Report SuiteRunner::fields()
{
    Report rep;
    const auto& ctx = bolza();
    const BolzaMesh& M = *ctx.mesh;
    rep.add(make_check("bolza-mesh: Euler characteristic", M.euler_characteristic(), -2.0, 0.0));
    rep.add(make_check("bolza-mesh: hyperbolic area is 4 pi", M.hyperbolic_area(), 4 * kPi, 0.01 * 4 * kPi));
    Sweep area{"bolza-mesh area error vs max edge", "max_edge", "area_error", {}, {}};
    for (int r = 1; r <= m_scene.bolza_refinement; ++r) {
        auto m = r == m_scene.bolza_refinement ? M : BolzaMesh::build(ctx.group, r);
        area.x.push_back(m.max_edge());
        area.y.push_back(std::abs(m.hyperbolic_area() - 4 * kPi));
    }
    if (area.x.size() >= 2) {
        CheckResult c = make_lower_bound_check("bolza-mesh: area converges at second order", fitted_order(area.x, area.y), 1.9);
        c.order = c.lhs;
        rep.add(c);
    }
    rep.sweeps.push_back(area);
    ChartField rho{ChartRank::Density, 0, {}};
    for (auto z : M.chart_vertices()) rho.values.push_back(poincare_rho2(z));
    rep.add(make_residual_check("bolza-mesh: Poincare density is glued across every side", transition_residual(M, rho), 1e-9));

    Sweep tor{"torus derivative error vs spacing", "dx", "sup_error", {}, {}};
    for (int n : {16, 32, 64}) {
        auto d = GridDomain::torus(n);
        Grid f = sample(d, [](double x, double y) { return std::sin(tp * x) * std::cos(tp * y); });
        Grid fx = diff_x(d, f);
        Grid ex = sample(d, [](double x, double y) { return tp * std::cos(tp * x) * std::cos(tp * y); });
        tor.x.push_back(d.dx());
        tor.y.push_back(sup_diff(fx, ex, d.evaluation_set()));
    }
    CheckResult to = make_lower_bound_check("grid-derivatives: torus differences are fourth order", fitted_order(tor.x, tor.y), 3.5);
    to.order = to.lhs;
    rep.add(to);
    rep.sweeps.push_back(tor);

    auto d = GridDomain::patch(12, -0.3, -0.3, 0.6, 2);
    Grid f = sample(d, [](double x, double y) { return x * x * x * x - 2 * x * y + y * y * y; });
    Grid fx = diff_x(d, f), fy = diff_y(d, f);
    double e = 0;
    for (int j = 0; j < d.side(); ++j)
        for (int i = 0; i < d.side(); ++i) {
            double x = d.x(i), y = d.y(j);
            e = std::max({e, std::abs(fx[d.index(i, j)] - (4 * x * x * x - 2 * y)), std::abs(fy[d.index(i, j)] - (-2 * x + 3 * y * y))});
        }
    rep.add(make_residual_check("grid-derivatives: patch stencils are exact on quartics", e, 1e-10));
    Grid g = sample(d, [](double x, double y) { return std::cos(3 * x + y); });
    Grid gt = diff_x_transpose(d, g);
    double lhs = 0, rhs = 0;
    for (size_t k = 0; k < d.size(); ++k) {
        lhs += fx[k] * g[k];
        rhs += f[k] * gt[k];
    }
    rep.add(make_check("grid-derivatives: transpose is exact", lhs, rhs, 1e-12 * (1 + std::abs(rhs))));

    auto t = GridDomain::torus(8);
    Sym2 s = skew_torus(t);
    GriddedField out{DomainMode::Torus, 8, "sym2", {}, {}};
    for (int j = 0; j < t.side(); ++j)
        for (int i = 0; i < t.side(); ++i) {
            size_t k = t.index(i, j);
            out.coords.insert(out.coords.end(), {t.x(i), t.y(j)});
            out.values.insert(out.values.end(), {s.xx[k], s.xy[k], s.yy[k]});
        }
    GriddedField back = read_field(write_field(out));
    double mismatches = 0;
    for (size_t k = 0; k < out.values.size(); ++k) mismatches += back.values[k] != out.values[k] ? 1 : 0;
    rep.add(make_residual_check("field-io: round trip is bit exact", mismatches, 0.0));
    return rep;
}

Report SuiteRunner::tensorcalc()
{
    Report rep;
    const int P = m_scene.patch_resolution;

    // first-order curvature change against a Richardson-extrapolated s-difference
    Sweep sw{"curvature-variation convergence", "dx", "sup_residual", {}, {}};
    double tt_kdot = 0;
    for (int n : {3 * P / 4, P, 3 * P / 2}) {
        auto d = patch_at(m_scene, n);
        Sym2 h = poincare_disk_metric(d);
        std::vector<Sym2> dirs{
            sym2_sample(d, [](double x, double y) { return 1 + x * y; }, [](double x, double y) { return 0.5 * x - y * y; },
                        [](double x, double) { return 2 + std::sin(x); }),
            scale(sample(d, [](double x, double y) { return 0.3 + x * y + std::cos(2 * y); }), h),
            quadratic_differential_tensor(sample_complex(d, patch_q), 1.0)};
        double res = 0;
        for (size_t k = 0; k < dirs.size(); ++k) {
            Grid lhs = curvature_variation_lhs(d, h, dirs[k]);
            auto fd = s_derivative([&](double s) { return gauss_curvature(d, h + s * dirs[k]); }, 1, Stencil{0.01});
            res = std::max(res, sup_diff(fd.value, lhs, d.evaluation_set()));
            if (k == 2 && n == P) tt_kdot = sup_norm(fd.value, d.evaluation_set());
        }
        sw.x.push_back(d.dx());
        sw.y.push_back(res);
    }
    CheckResult order = make_lower_bound_check("curvature-variation: fitted order on hyperbolic patches", fitted_order(sw.x, sw.y), 3.5,
                                               "generic, pure-trace and TT directions");
    order.order = order.lhs;
    rep.add(order);
    rep.add(make_residual_check("curvature-variation: residual at the finest patch", sw.y.back(), 1e-6));
    rep.add(make_residual_check("curvature-variation: TT directions leave the curvature fixed", tt_kdot, 1e-6));
    rep.sweeps.push_back(sw);

    auto p = patch_at(m_scene, P);
    Sym2 hp = poincare_disk_metric(p);
    Grid kp = gauss_curvature(p, hp);
    double e = 0;
    for (size_t k : p.evaluation_set()) e = std::max(e, std::abs(kp[k] + 1));
    rep.add(make_residual_check("hyperbolic-patch: curvature is -1", e, 1e-6));
    Sym2 II = quadratic_differential_tensor(sample_complex(p, [](cplx z) { return 1.0 + z * z; }), 1.0);
    rep.add(make_residual_check("codazzi: holomorphic second fundamental forms",
                                sup_norm(norm(hp, codazzi_residual(p, hp, raise(hp, II))), p.evaluation_set()), 1e-6));

    auto phi = [](double x, double y) { return 0.2 * std::sin(tp * x) + 0.1 * std::cos(tp * y) * std::sin(tp * x); };
    Sweep cs{"conformal-torus curvature convergence", "dx", "sup_error", {}, {}};
    for (int n : {m_scene.torus_resolution / 4, m_scene.torus_resolution / 2, m_scene.torus_resolution}) {
        auto d = GridDomain::torus(n);
        Grid conf = sample(d, [&](double x, double y) { return std::exp(2 * phi(x, y)); });
        Grid kc = gauss_curvature(d, Sym2{conf, Grid(d.size(), 0.0), conf});
        Grid ex = sample(d, [&](double x, double y) {
            return std::exp(-2 * phi(x, y)) * 0.2 * tp * tp * (std::sin(tp * x) + std::cos(tp * y) * std::sin(tp * x));
        });
        cs.x.push_back(d.dx());
        cs.y.push_back(sup_diff(kc, ex, d.evaluation_set()));
    }
    CheckResult co = make_lower_bound_check("conformal-torus: curvature of e^{2 phi}|dz|^2 is fourth order", fitted_order(cs.x, cs.y), 3.5);
    co.order = co.lhs;
    rep.add(co);
    rep.sweeps.push_back(cs);
    auto t = GridDomain::torus(m_scene.torus_resolution);
    Sym2 sk = skew_torus(t);
    rep.add(make_residual_check("gauss-bonnet: total curvature of a torus", std::abs(integrate(t, sk, gauss_curvature(t, sk))), 1e-6));

    Sym2 s = sym2_sample(t, [](double x, double y) { return std::sin(tp * x) * std::cos(tp * y); },
                         [](double x, double) { return 0.4 + std::cos(2 * tp * x); },
                         [](double x, double y) { return std::sin(tp * (x + 2 * y)); });
    OneForm xi{sample(t, [](double x, double y) { return std::cos(tp * y) + 0.3 * std::sin(tp * x); }),
               sample(t, [](double x, double y) { return std::sin(2 * tp * x - tp * y); })};
    double a = l2_inner(t, sk, divergence(t, sk, s), xi), b = l2_inner(t, sk, s, sym_gradient(t, sk, xi));
    rep.add(make_check("divergence: adjoint of the symmetrized gradient", a, b, 1e-12 * (1 + std::abs(b))));

    auto t32 = GridDomain::torus(32);
    Sym2 h = sym2_sample(t32, [](double, double) { return 1.3; }, [](double, double) { return 0.3; }, [](double, double) { return 1.0; });
    Sym2 s32 = sym2_sample(t32, [](double x, double y) { return std::sin(tp * x) * std::cos(tp * y); },
                           [](double x, double) { return 0.4 + std::cos(2 * tp * x); },
                           [](double x, double y) { return std::sin(tp * (x + 2 * y)); });
    Sym2 tt = tt_project(t32, h, s32);
    rep.add(make_residual_check("tt-projection: divergence-free", sup_norm(norm(h, divergence(t32, h, tt)), t32.evaluation_set()), 1e-8));
    rep.add(make_residual_check("tt-projection: trace-free", sup_norm(trace(h, tt), t32.evaluation_set()), 1e-12));
    Sym2 gauge = lie_derivative(t32, h, sample(t32, [](double, double y) { return std::sin(tp * y); }),
                                sample(t32, [](double x, double) { return std::cos(tp * x); }));
    rep.add(make_residual_check("tt-projection: pure gauge tensors have no TT part",
                                sup_norm(norm(h, tt_project(t32, h, gauge)), t32.evaluation_set()), 1e-8));
    return rep;
}

Report SuiteRunner::funnel()
{
    Report rep;
    auto t = GridDomain::torus(m_scene.torus_resolution);
    const double vt = m_scene.validate_tol;
    auto horo = horospherical(t);
    auto vh = validate(horo, vt);
    rep.add(make_residual_check("constraints: horospherical torus, Gauss", vh.gauss_norm, vt));
    rep.add(make_residual_check("constraints: horospherical torus, Codazzi", vh.codazzi_norm, vt));
    auto stretched = flat_torus_constA(t, 2.0, 0.0, 0.5);
    rep.add(make_residual_check("constraints: flat torus A = diag(2, 1/2), Gauss", validate(stretched, vt).gauss_norm, vt));
    rep.add(make_check("constraints: flat torus A = diag(2, 1) misses Gauss by det A - 1",
                       validate(flat_torus_constA(t, 2.0, 0.0, 1.0), vt).gauss_norm, 1.0, 1e-12));
    auto p = patch_at(m_scene, m_scene.patch_resolution);
    rep.add(make_residual_check("constraints: geodesic hyperbolic patch, Gauss",
                                validate(geodesic(p, poincare_disk_metric(p)), vt).gauss_norm, vt));

    rep.add(make_residual_check("evolution: curvature of h_t at t = 1", evolve(stretched, 1.0).gauss_residual, 1e-10));
    Sym2 hinf = metric_at_infinity(horo);
    rep.add(make_residual_check("metric-at-infinity: horospherical h_inf = h",
                                std::max({sup_diff(hinf.xx, horo.h.xx, t.evaluation_set()), sup_diff(hinf.xy, horo.h.xy, t.evaluation_set()),
                                          sup_diff(hinf.yy, horo.h.yy, t.evaluation_set())}),
                                1e-15));
    rep.add(make_check("segment-volume: horospherical slab (e^2 - 1)/2", segment_volume(horo, 1.0), (std::exp(2.0) - 1) / 2, 1e-12));

    auto rv = renormalized_funnel_volume(funnel_integrals(horo));
    rep.add(make_check("renormalized-volume: unit horospherical torus is -1/2", rv.finite_part, -0.5, 1e-8));
    rep.add(make_check("renormalized-volume: counterterm route on the horospherical torus", rv.subtraction, rv.finite_part, 1e-8));
    auto rs = renormalized_funnel_volume(funnel_integrals(stretched));
    rep.add(make_check("renormalized-volume: counterterm route on A = diag(2, 1/2)", rs.subtraction, rs.finite_part, 1e-8));
    rep.values.emplace_back("volr of the unit horospherical torus", rv.finite_part);

    const auto& ctx = bolza();
    auto f = uhlenbeck_construct(ctx.mesh, ctx.q, 0.04);
    rep.add(make_residual_check("uhlenbeck: Gauss equation on the Bolza surface", gauss_residual(f), 1e-10));
    auto ru = renormalized_funnel_volume(funnel_integrals(f));
    rep.add(make_check("renormalized-volume: counterterm route on Bolza Uhlenbeck data", ru.subtraction, ru.finite_part, 1e-6));
    rep.add(make_check("assemble: volK = 1 with the unit horospherical torus", assemble_volr(1.0, {funnel_integrals(horo)}), 0.5, 1e-12));

    auto hp = poincare_disk_metric(p);
    auto up = uhlenbeck_construct(p, hp, sample_complex(p, patch_q), 0.02);
    auto vu = validate(up.fd, vt);
    rep.add(make_residual_check("uhlenbeck: patch data, Gauss", vu.gauss_norm, vt));
    rep.add(make_residual_check("uhlenbeck: patch data, Codazzi", vu.codazzi_norm, vt));
    rep.add(make_residual_check("uhlenbeck: patch data is minimal", sup_norm(trace(up.fd.A), p.evaluation_set()), 1e-14));
    Sweep nh{"uhlenbeck newton history", "iteration", "residual", {}, {}};
    for (size_t i = 0; i < up.history.size(); ++i) {
        nh.x.push_back(static_cast<double>(i));
        nh.y.push_back(up.history[i]);
    }
    rep.sweeps.push_back(nh);
    return rep;
}

Report SuiteRunner::uniformize()
{
    Report rep;
    const auto& ctx = bolza();
    const size_t n = ctx.mesh->num_dofs();
    BolzaFem P = assemble(BolzaMetric::poincare(ctx.mesh));

    auto minus_one = liouville_solve(P, std::vector<double>(n, -1.0));
    double c = 0;
    for (double w : minus_one.omega) c = std::max(c, std::abs(w + std::log(2.0)));
    rep.add(make_residual_check("liouville: curvature -1 gives omega = -log 2", c, 1e-12));

    auto q0 = quadratic_norm2(*ctx.mesh, ctx.q);
    auto q2 = quadratic_norm2(*ctx.mesh, second_differential());
    std::vector<double> psi(n);
    for (size_t i = 0; i < n; ++i) psi[i] = 0.1 * q0[i] - 0.08 * q2[i] + 0.1;
    BolzaFem fem = assemble(BolzaMetric::conformal(ctx.mesh, psi));
    auto kappa = conformal_curvature(P, psi);
    auto sol = liouville_solve(fem, kappa);
    rep.add(make_residual_check("liouville: residual from the zero start", sol.residual, 1e-10 * (1 + max_abs(kappa))));
    rep.add(make_lower_bound_check("liouville: at most 12 damped Newton iterations", 12 - sol.iterations, 0.0,
                                   std::to_string(sol.iterations) + " iterations"));
    double ratio = sol.quadratic_ratios.size() >= 3 ? 0.0 : INFINITY;
    for (size_t i = sol.quadratic_ratios.size() >= 3 ? sol.quadratic_ratios.size() - 3 : 0; i < sol.quadratic_ratios.size(); ++i)
        ratio = std::max(ratio, sol.quadratic_ratios[i]);
    rep.add(make_residual_check("liouville: r_{k+1}/r_k^2 bounded over the last three steps", ratio, 10.0));
    int bumps = 0;
    for (size_t i = 3; i < sol.history.size(); ++i) bumps += sol.history[i] < sol.history[i - 1] ? 0 : 1;
    rep.add(make_residual_check("liouville: Newton history strictly decreasing after iteration 2", bumps, 0.0));
    Sweep nh{"liouville newton history", "iteration", "residual", {}, {}};
    for (size_t i = 0; i < sol.history.size(); ++i) {
        nh.x.push_back(static_cast<double>(i));
        nh.y.push_back(sol.history[i]);
    }
    rep.sweeps.push_back(nh);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    double spread = 0;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> init(n);
        for (auto& v : init) v = -std::log(2.0) + noise(rng);
        auto b = liouville_solve(fem, kappa, init);
        for (size_t i = 0; i < n; ++i) spread = std::max(spread, std::abs(sol.omega[i] - b.omega[i]));
    }
    rep.add(make_residual_check("liouville: multi-start solutions agree", spread, 1e-9));
    rep.add(make_check("gauss-bonnet: uniformized area is pi", bolza_area(fem, sol.omega), kPi, 0.005 * kPi));
    auto mp = maximum_principle(kappa, sol.omega);
    rep.add(make_residual_check("liouville: maximum principle bounds",
                                std::max({0.0, mp.lower - mp.min_omega, mp.max_omega - mp.upper}), 1e-3));

    auto f = uhlenbeck_construct(ctx.mesh, ctx.q, 0.04);
    BolzaFem inf = assemble(metric_at_infinity(f));
    auto si = liouville_solve(inf, curvature_at_infinity(f));
    rep.add(make_check("gauss-bonnet: uniformized area of h_inf is pi", bolza_area(inf, si.omega), kPi, 0.005 * kPi));

    bool threw = false;
    try {
        auto t = GridDomain::torus(16);
        liouville_solve(t, flat(t));
    } catch (const GaussBonnetError&) {
        threw = true;
    }
    rep.add(thrown("gauss-bonnet: torus metrics have no hyperbolic uniformization", threw, "GaussBonnetError"));

    BolzaFem quarter = assemble(BolzaMetric::conformal(ctx.mesh, std::vector<double>(n, -std::log(2.0))));
    double V0 = integrate(quarter, std::vector<double>(n, 1.0));
    rep.add(make_check("polyakov: constant shift by 0.3", polyakov_difference(quarter, std::vector<double>(n, -4.0), std::vector<double>(n, 0.3)),
                       0.6 * V0, 1e-13 * 0.6 * V0));
    return rep;
}

Report SuiteRunner::einstein3d()
{
    using namespace einstein3d;
    Report rep;
    constexpr int ord = 3;
    auto pn = default_nodes(true), tn = default_nodes(false);
    Background geo = geodesic_background(poincare_disk());
    Background horo = horospherical_background();
    Background tor = flat_torus_background(1.7);
    auto csym = [](double xx, double xy, double yy) -> SurfaceSym2 {
        return [=](const Jet& x, const Jet&) {
            int n = x.order();
            return std::array<Jet, 3>{Jet(xx, n), Jet(xy, n), Jet(yy, n)};
        };
    };

    rep.add(make_residual_check("funnel-metric: hyperbolic, Poincare disk geodesic funnel", hyperbolicity_residual(geo, pn), 1e-10));
    rep.add(make_residual_check("funnel-metric: hyperbolic, flat torus A = diag(1.7, 1/1.7)", hyperbolicity_residual(tor, tn), 1e-10));
    rep.add(make_residual_check("funnel-metric: Koszul table of the warped product", std::max(koszul_residual(geo, pn), koszul_residual(horo, tn)),
                                1e-12));
    rep.add(make_residual_check("funnel-metric: metric compatibility", metric_compatibility(tor, tn), 1e-12));

    double gmax = 0, tf = 0;
    for (const auto& n : pn) {
        Geometry G(geo.metric()(jet_point(n.t, n.x, n.y, ord)));
        Tensor q(2, ord);
        q.at(0, 0) = Jet(0.7, ord);
        q.at(0, 1) = q.at(1, 0) = Jet(-0.3, ord);
        q.at(1, 2) = q.at(2, 1) = Jet(1.1, ord);
        q.at(2, 2) = Jet(0.4, ord);
        Tensor q0 = lower_trace_free(G, q);
        Tensor a = ring(G, G.metric()) + 2.0 * G.metric(), b = ring(G, q0) - q0;
        for (size_t k = 0; k < a.size(); ++k) {
            gmax = std::max(gmax, std::abs(a[k].value()));
            tf = std::max(tf, std::abs(b[k].value()));
        }
    }
    rep.add(make_residual_check("ring-operator: R(ag) = -2ag", gmax, 1e-12));
    rep.add(make_residual_check("ring-operator: R q0 = q0 for trace-free q0", tf, 1e-12));

    const double lam = 1.7, dl = 0.6;
    Field gdot = funnel_deformation(tor, csym(0, 0, 0), constant_endo(dl, 0, 0, -dl / (lam * lam)));
    rep.add(make_residual_check("linearized-einstein: constant flat-torus family", linearized_einstein_residual(tor, gdot, tn), 1e-8));
    SurfaceSym2 tt = holomorphic_tt({{1.0, 0.2}, {0.5, -0.4}, {0.0, 0.3}});
    rep.add(make_residual_check("linearized-einstein: holomorphic hdot over the disk",
                                linearized_einstein_residual(geo, funnel_deformation(geo, tt, zero_endo()), pn), 1e-8));
    Field V = [](const JetPoint& p) {
        Jet e = exp(p.t), em = exp(-p.t);
        Tensor v(1, p.t.order());
        v.at(0) = 0.3 * e + 0.2 * p.x * p.y;
        v.at(1) = em * p.y - 0.5 * e * p.x + 0.1;
        v.at(2) = 0.4 * e * e * p.x * p.x - em;
        return v;
    };
    double gauge = 0;
    for (const auto* bg : {&tor, &horo}) gauge = std::max(gauge, linearized_einstein_residual(*bg, gauge_direction(*bg, V), tn));
    gauge = std::max(gauge, linearized_einstein_residual(geo, gauge_direction(geo, V), pn));
    rep.add(make_residual_check("linearized-einstein: pure gauge directions", gauge, 1e-8));
    rep.add(make_residual_check("vector-identity: (2 delta + d Tr) delta* V", vector_identity_residual(geo, V, pn), 1e-8));

    auto td = trace_div_3d(geo, funnel_deformation(geo, tt, zero_endo()), pn);
    rep.add(make_residual_check("tt-deformation: trace of the holomorphic deformation", td.trace, 1e-8));
    rep.add(make_residual_check("tt-deformation: divergence of the holomorphic deformation", td.divergence, 1e-8));
    auto th = trace_div_3d(horo, funnel_deformation(horo, csym(0.2, 0.1, -0.2), constant_endo(0.3, -0.1, -0.1, -0.3)), tn);
    rep.add(make_residual_check("tt-deformation: constant trace-free data on the horospherical torus", std::max(th.trace, th.divergence), 1e-8));
    rep.add(make_residual_check("bianchi: holomorphic deformation is in Bianchi gauge",
                                bianchi_gauge_residual(geo, funnel_deformation(geo, tt, zero_endo()), pn), 1e-8));

    auto ca = [](const JetPoint& p) { return Jet(2.5, p.t.order()); };
    auto w = weitzenbock_residual(horo, funnel_deformation(horo, csym(0.4, 0.3, -0.4), zero_endo()), ca, tn);
    rep.add(make_residual_check("weitzenbock: trace-free part on constant horospherical data", w.r1, 1e-8));
    rep.add(make_residual_check("weitzenbock: pure trace part on constant horospherical data", w.r2, 1e-8));
    Field tq = funnel_deformation(tor, csym(0.4, 0.3, -0.4), constant_endo(0.6, 0, 0, -0.6 / (lam * lam)));
    Field tq0 = [tor, tq](const JetPoint& p) { return lower_trace_free(Geometry(tor.metric()(p)), tq(p)); };
    auto ta = [](const JetPoint& p) { return exp(2.0 * p.t) - 3.0 * exp(-p.t); };
    auto wt = weitzenbock_residual(tor, tq0, ta, tn);
    rep.add(make_residual_check("weitzenbock: constant flat-torus data", std::max(wt.r1, wt.r2), 1e-8));
    Field mixed = [](const JetPoint& p) {
        Tensor q(2, p.t.order());
        Jet e = exp(0.5 * p.t);
        q.at(0, 0) = 0.3 + e * p.x;
        q.at(0, 1) = q.at(1, 0) = p.y * p.y - 0.2;
        q.at(1, 1) = e * e * p.x * p.y + 1.0;
        q.at(1, 2) = q.at(2, 1) = 0.4 * e;
        q.at(2, 2) = p.x - 0.7;
        return q;
    };
    rep.add(make_residual_check("ring-operator: R q = q - Tr(q) g", ring_residual(geo, mixed, pn), 1e-11));
    rep.add(make_residual_check("decomposition: Bianchi-gauge system on q0 + ag", decomposition_residual(geo, mixed, pn), 1e-8));
    return rep;
}

Report SuiteRunner::variation()
{
    Report rep;
    const Stencil st{m_scene.stencil_step};

    auto p = patch_at(m_scene, m_scene.patch_resolution);
    auto pfam = uhlenbeck_family(p, poincare_disk_metric(p), sample_complex(p, patch_q));
    pfam.stencil = st;
    Report first = first_variation_checks(pfam);
    prefix(first, "first-variation");
    rep.append(first);
    Report second = second_variation_checks(pfam);
    prefix(second, "curvature-at-infinity-chain");
    rep.append(second);

    const auto& ctx = bolza();
    auto bfam = bolza_family(ctx.mesh, ctx.q);
    bfam.stencil = st;
    Report bsec = second_variation_checks(bfam, m_scene.s_sweep);
    prefix(bsec, "curvature-at-infinity-chain");
    rep.append(bsec);

    auto t = GridDomain::torus(m_scene.torus_resolution);
    auto exp_family = flat_torus_family(t, [](double s) { return 1.5 * std::exp(2 * s); }, 3.0);
    auto scaling = horospherical_scaling(t);
    exp_family.stencil = scaling.stencil = st;
    for (const auto* fam : {&exp_family, &scaling}) {
        Report s = schlafli_check(*fam, 1.0);
        prefix(s, "schlafli");
        rep.append(s);
    }

    // Hessian lower bound over random combinations of two differentials
    const auto& q2 = second_differential();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<std::vector<cplx>> qs;
    double lmin = INFINITY, eq = 0, sc = 0, raw_ratio = 0;
    for (int k = 0; k < 10; ++k) {
        double a = u(rng), b = u(rng);
        std::vector<cplx> q(q2.size()), ql(q2.size());
        for (size_t i = 0; i < q.size(); ++i) {
            q[i] = a * ctx.q[i] + b * q2[i];
            ql[i] = -2.5 * q[i];
        }
        qs.push_back(q);
        auto h = hessian_report(bolza_family(ctx.mesh, q));
        lmin = std::min(lmin, h.lower_bound);
        eq = std::max(eq, std::abs(h.lower_bound - h.l2_norm2 / 4) / std::max(1.0, h.lower_bound));
        sc = std::max(sc, std::abs(hessian_report(bolza_family(ctx.mesh, ql)).lower_bound / (6.25 * h.lower_bound) - 1));
        raw_ratio = std::max(raw_ratio, std::abs(h.raw / h.lower_bound - 4));
    }
    rep.add(make_lower_bound_check("hessian-bound: positive on ten random constructions", lmin, std::numeric_limits<double>::min(),
                                   "(1/4) int Tr(Adot^2) dvol_h"));
    rep.add(make_residual_check("hessian-bound: equals a quarter of the L2 norm squared", eq, 1e-10));
    rep.add(make_residual_check("hessian-bound: quadratic under Adot -> -2.5 Adot", sc, 1e-13));
    rep.add(make_residual_check("hessian-bound: raw integral is four times the bound", raw_ratio, 1e-12,
                                "both normalizations are reported"));
    Eigen::MatrixXd G = hessian_gram(ctx.mesh, qs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    rep.add(make_lower_bound_check("hessian-bound: polarized Gram matrix is positive semidefinite", es.eigenvalues().minCoeff(),
                                   -1e-12 * es.eigenvalues().maxCoeff()));
    Eigen::MatrixXd G2 = hessian_gram(ctx.mesh, {ctx.q, q2});
    rep.add(make_lower_bound_check("hessian-bound: Gram matrix of two independent differentials is definite", G2.determinant(), std::numeric_limits<double>::min()));
    auto h0 = hessian_report(bfam);
    rep.values.emplace_back("hessian lower bound (1/4) int Tr(Adot^2)", h0.lower_bound);
    rep.values.emplace_back("hessian raw int Tr(Adot^2)", h0.raw);

    std::vector<double> grid{0.0};
    for (double s : m_scene.s_sweep) grid.insert(grid.end(), {-s, s});
    Report scan = volr_inequality_scan(bfam, grid);
    prefix(scan, "volr-inequality");
    rep.append(scan);
    std::vector<std::vector<double>> basis{quadratic_norm2(*ctx.mesh, ctx.q), quadratic_norm2(*ctx.mesh, q2)};
    Report sanity = volr_sanity_scan(ctx.mesh, basis, 4, 99);
    prefix(sanity, "volr-inequality sanity");
    rep.append(sanity);
    return rep;
}

void rescale_tolerances(Report& report, double scale)
{
    require(scale > 0 && std::isfinite(scale), "tolerance scale must be positive");
    for (auto& c : report.checks) {
        if (c.skipped) continue;
        c.tolerance *= scale;
        c.pass = std::isfinite(c.residual) && c.residual <= c.tolerance;
    }
}

} // namespace renvol
