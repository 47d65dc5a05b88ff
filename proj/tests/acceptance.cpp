// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "renvol/suites.hpp"
#include "renvol/uhlenbeck.hpp"
#include "renvol/uniformize.hpp"
#include "renvol/variation.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace renvol;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Accumulates the sub-conditions of one criterion.
struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void need(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
    }
};

std::string sci(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

std::vector<const CheckResult*> matching(const Report& r, const std::string& part)
{
    std::vector<const CheckResult*> out;
    for (const auto& c : r.checks)
        if (c.name.find(part) != std::string::npos) out.push_back(&c);
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double area(const BolzaFem& fem, const std::vector<double>& omega)
{
    std::vector<double> e(omega.size());
    for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(2 * omega[i]);
    return integrate(fem, e);
}

Scene default_scene() { return load_scene(std::string(RENVOL_SOURCE_DIR) + "/scenes/default.scene"); }

GridDomain default_patch(const Scene& s)
{
    return GridDomain::patch(s.patch_resolution, s.patch_origin, s.patch_origin, s.patch_extent, s.patch_buffer);
}

struct Shared {
    Scene scene = default_scene();
    SuiteRunner runner{scene};
    double context_seconds = 0;

    // group ball, mesh and differentials; the build time is charged to the area criterion
    const BolzaContext& bolza()
    {
        auto t0 = Clock::now();
        const auto& ctx = runner.bolza();
        context_seconds += seconds_since(t0);
        return ctx;
    }
};

Verdict renormalized_volume(Shared& sh)
{
    Verdict v;
    auto t0 = Clock::now();
    auto t = GridDomain::torus(sh.scene.torus_resolution);
    auto horo = renormalized_funnel_volume(funnel_integrals(horospherical(t)));
    v.need(std::abs(horo.subtraction - horo.finite_part) <= 1e-8, "unit torus routes differ by " + sci(std::abs(horo.subtraction - horo.finite_part)));
    v.need(std::abs(horo.finite_part + 0.5) <= 1e-8, "finite part " + sci(horo.finite_part));
    auto st = renormalized_funnel_volume(funnel_integrals(flat_torus_constA(t, 2.0, 0.0, 0.5)));
    v.need(std::abs(st.subtraction - st.finite_part) <= 1e-8, "diag(2, 1/2) routes differ by " + sci(std::abs(st.subtraction - st.finite_part)));
    const auto& ctx = sh.bolza();
    auto ru = renormalized_funnel_volume(funnel_integrals(uhlenbeck_construct(ctx.mesh, ctx.q, 0.04)));
    v.need(std::abs(ru.subtraction - ru.finite_part) <= 1e-6, "Bolza Uhlenbeck routes differ by " + sci(std::abs(ru.subtraction - ru.finite_part)));
    double dt = seconds_since(t0) - sh.context_seconds;
    v.need(dt < 5, "runtime " + sci(dt) + " s without the shared group ball");
    return v;
}

Verdict uniformized_area(Shared& sh)
{
    Verdict v;
    auto t0 = Clock::now();
    const auto& ctx = sh.bolza();
    double a = ctx.mesh->hyperbolic_area();
    v.need(std::abs(a - 4 * kPi) <= 0.01 * 4 * kPi, "mesh area / 4pi - 1 = " + sci(a / (4 * kPi) - 1));
    auto f = uhlenbeck_construct(ctx.mesh, ctx.q, 0.04);
    BolzaFem fem = assemble(metric_at_infinity(f));
    double u = area(fem, liouville_solve(fem, curvature_at_infinity(f)).omega);
    v.need(std::abs(u - kPi) <= 0.005 * kPi, "uniformized area of h_inf / pi - 1 = " + sci(u / kPi - 1));
    double dt = seconds_since(t0) + sh.context_seconds;
    v.need(dt < 30, "runtime " + sci(dt) + " s including the group ball");
    return v;
}

Verdict liouville_newton(Shared& sh)
{
    Verdict v;
    // a conformal metric far enough from hyperbolic that Newton takes several steps
    const auto& ctx = sh.bolza();
    const size_t dofs = ctx.mesh->num_dofs();
    auto n0 = quadratic_norm2(*ctx.mesh, ctx.q), n2 = quadratic_norm2(*ctx.mesh, sh.runner.second_differential());
    std::vector<double> psi(dofs);
    for (size_t i = 0; i < dofs; ++i) psi[i] = 0.35 * n0[i] - 0.3 * n2[i] + 0.2;
    BolzaFem fem = assemble(BolzaMetric::conformal(ctx.mesh, psi));
    auto kappa = conformal_curvature(assemble(BolzaMetric::poincare(ctx.mesh)), psi);
    auto sol = liouville_solve(fem, kappa);
    v.need(sol.residual <= 1e-10 * (1 + max_abs(kappa)), "residual " + sci(sol.residual));
    v.need(sol.iterations <= 12, std::to_string(sol.iterations) + " iterations");
    const size_t n = sol.quadratic_ratios.size();
    double worst = n >= 3 ? 0.0 : INFINITY;
    for (size_t i = n >= 3 ? n - 3 : 0; i < n; ++i) worst = std::max(worst, sol.quadratic_ratios[i]);
    v.need(worst < 10, "max r_{k+1}/r_k^2 over the last three " + sci(worst));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    double spread = 0;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> init(sol.omega.size());
        for (auto& w : init) w = -std::log(2.0) + noise(rng);
        spread = std::max(spread, max_abs_diff(sol.omega, liouville_solve(fem, kappa, init).omega));
    }
    v.need(spread <= 1e-9, "multi-start spread " + sci(spread));
    return v;
}

Verdict curvature_variation(Shared& sh)
{
    Verdict v;
    Report r = sh.runner.tensorcalc();
    auto order = matching(r, "curvature-variation: fitted order");
    auto tt = matching(r, "curvature-variation: TT directions");
    v.need(order.size() == 1 && order[0]->lhs >= 3.5, "fitted order " + (order.empty() ? "missing" : sci(order[0]->lhs)));
    v.need(tt.size() == 1 && tt[0]->residual <= 1e-6, "TT kappa-dot " + (tt.empty() ? "missing" : sci(tt[0]->residual)));
    return v;
}

Verdict curvature_at_infinity_chain(Shared& sh)
{
    Verdict v;
    const auto& ctx = sh.bolza();
    auto p = default_patch(sh.scene);
    auto pfam = uhlenbeck_family(p, poincare_disk_metric(p), sample_complex(p, [](cplx z) { return 1.0 + z + 0.5 * z * z; }));
    pfam.stencil = Stencil{sh.scene.stencil_step};
    auto bfam = bolza_family(ctx.mesh, ctx.q);
    bfam.stencil = pfam.stencil;
    Report r = second_variation_checks(pfam);
    r.append(second_variation_checks(bfam, sh.scene.s_sweep));
    auto second = matching(r, "second derivative of kappa_inf");
    bool ok = second.size() == 2;
    for (const auto* c : second) ok = ok && c->pass;
    v.need(ok, std::to_string(second.size()) + " families within 1e-4 |Adot|^2_inf");
    double pointwise = 0;
    int evaluated = 0;
    for (const std::string part : {"Tr(A^2) = -2 kappa - 2", "kappa_inf = 4 - 8/(2 + kappa)"})
        for (const auto* c : matching(r, part)) {
            if (c->skipped) continue;
            ++evaluated;
            pointwise = std::max(pointwise, c->residual);
        }
    v.need(evaluated >= 3 && pointwise <= 1e-5, "pointwise identities " + sci(pointwise) + " over " + std::to_string(evaluated) + " checks");
    return v;
}

Verdict quadratic_correction(Shared& sh)
{
    Verdict v;
    const auto& ctx = sh.bolza();
    auto bfam = bolza_family(ctx.mesh, ctx.q);
    bfam.stencil = Stencil{sh.scene.stencil_step};
    Report r = second_variation_checks(bfam, {0.01, 0.02, 0.04});
    auto ratio = matching(r, "correction / s^2");
    double worst = 0;
    for (const auto* c : ratio) worst = std::max(worst, std::abs(c->lhs - c->rhs) / std::abs(c->rhs));
    v.need(ratio.size() == 3 && worst <= 0.02, "worst relative gap " + sci(worst));
    auto sign = matching(r, "correction sign");
    double low = INFINITY;
    for (const auto* c : sign) low = std::min(low, c->lhs);
    v.need(sign.size() == 3 && low >= -1e-9, "smallest correction " + sci(low));
    auto trend = matching(r, "deviation is O(s^3)");
    v.need(trend.size() == 1 && trend[0]->lhs >= 3, "deviation order " + (trend.empty() ? "missing" : sci(trend[0]->lhs)));
    return v;
}

Verdict schlafli(Shared& sh)
{
    Verdict v;
    auto t = GridDomain::torus(sh.scene.torus_resolution);
    auto a = flat_torus_family(t, [](double s) { return 1.5 * std::exp(2 * s); }, 3.0);
    auto b = horospherical_scaling(t);
    a.stencil = b.stencil = Stencil{sh.scene.stencil_step};
    for (const auto* fam : {&a, &b}) {
        Report r = schlafli_check(*fam, 1.0);
        double d = r.checks.empty() ? INFINITY : std::abs(r.checks[0].lhs - r.checks[0].rhs);
        v.need(d <= 1e-8, fam->name + " gap " + sci(d));
    }
    return v;
}

Verdict einstein_identities(Shared& sh)
{
    Verdict v;
    Report r = sh.runner.einstein3d();
    double worst = 0, loosest = 0;
    for (const auto& c : r.checks) {
        worst = std::max(worst, c.residual);
        loosest = std::max(loosest, c.tolerance);
    }
    v.need(r.all_pass() && loosest <= 1e-8, std::to_string(r.checks.size()) + " identities, worst residual " + sci(worst));
    double ring = 0;
    for (const auto* c : matching(r, "ring-operator: R")) ring = std::max(ring, c->residual);
    v.need(ring <= 1e-11, "ring algebra " + sci(ring));
    return v;
}

Verdict hessian_bound(Shared& sh)
{
    Verdict v;
    const auto& ctx = sh.bolza();
    const auto& q2 = sh.runner.second_differential();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1, 1);
    double low = INFINITY, eq = 0, sc = 0;
    for (int k = 0; k < 10; ++k) {
        double a = u(rng), b = u(rng);
        std::vector<cplx> q(q2.size()), ql(q2.size());
        for (size_t i = 0; i < q.size(); ++i) {
            q[i] = a * ctx.q[i] + b * q2[i];
            ql[i] = 1.7 * q[i];
        }
        auto h = hessian_report(bolza_family(ctx.mesh, q));
        low = std::min(low, h.lower_bound);
        eq = std::max(eq, std::abs(h.lower_bound - h.l2_norm2 / 4) / std::max(1.0, h.lower_bound));
        sc = std::max(sc, std::abs(hessian_report(bolza_family(ctx.mesh, ql)).lower_bound / (1.7 * 1.7 * h.lower_bound) - 1));
    }
    v.need(low > 0, "smallest bound " + sci(low));
    v.need(eq <= 1e-10, "gap to |Adot|^2/4 " + sci(eq));
    v.need(sc <= 1e-12, "scaling defect " + sci(sc));
    return v;
}

Verdict default_scene_run(Shared&)
{
    Verdict v;
    namespace fs = std::filesystem;
    fs::path out = fs::temp_directory_path() / "renvol_acceptance.json";
    std::string cmd = std::string(RENVOL_CLI) + " verify " + RENVOL_SOURCE_DIR + "/scenes/default.scene --suite all --out " + out.string() +
                      " 2>/dev/null >/dev/null";
    auto t0 = Clock::now();
    int st = std::system(cmd.c_str());
    double dt = seconds_since(t0);
    int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    v.need(code == 0, "exit " + std::to_string(code));
    size_t named = 0;
    try {
        std::ifstream in(out);
        auto j = nlohmann::json::parse(in);
        for (const auto& c : j["checks"])
            if (!c["name"].get<std::string>().empty()) ++named;
    } catch (const std::exception&) {
    }
    v.need(named >= 40, std::to_string(named) + " named checks");
    v.need(dt < 180, "wall time " + sci(dt) + " s");
    return v;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict(Shared&)>>> criteria{
        {"renormalized funnel volume identity", renormalized_volume},
        {"Gauss-Bonnet and uniformized area", uniformized_area},
        {"Liouville Newton convergence", liouville_newton},
        {"curvature-variation formula", curvature_variation},
        {"curvature-at-infinity chain", curvature_at_infinity_chain},
        {"quadratic Vol_R correction", quadratic_correction},
        {"Schlafli formula", schlafli},
        {"3D identities on exact funnels", einstein_identities},
        {"Hessian lower bound", hessian_bound},
        {"full default-scene run", default_scene_run},
    };
    Shared sh;
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        auto t0 = Clock::now();
        try {
            v = criteria[i].second(sh);
        } catch (const std::exception& e) {
            v.need(false, std::string("threw: ") + e.what());
        }
        failures += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << " (" << v.detail.str() << ") ["
                  << sci(seconds_since(t0)) << " s]" << std::endl;
    }
    std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
