// renvol: scene-driven verification front end.
//
//   renvol validate   <scene>                 Gauss and Codazzi residuals of the scene funnel
//   renvol volr       <scene> [--volK v]      renormalized volume volK - sum int H / 4
//   renvol uniformize <scene>                 hyperbolic uniformization of h_inf (BOLZA)
//   renvol verify     <scene> [--suite s]     verification suites
//
// Exit status: 0 every check passed, 1 a check failed, 2 bad input.

#include "renvol/field_io.hpp"
#include "renvol/hash.hpp"
#include "renvol/suites.hpp"
#include "renvol/uhlenbeck.hpp"
#include "renvol/uniformize.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

using namespace renvol;

namespace {

struct Options {
    std::string command;
    std::string scene_path;
    std::optional<std::string> suite;
    std::optional<double> volK;
    std::optional<std::string> out;
    std::optional<std::string> plots;
    std::optional<double> tol_scale;
    bool no_timing = false;
};

// Bolza Uhlenbeck data named by the scene: uhlenbeck(q_seed, s), seed < 0 picks the first non-degenerate series.
BolzaFunnel bolza_funnel(SuiteRunner& runner)
{
    FamilyCall call = parse_family_call(runner.scene().funnel);
    const auto& ctx = runner.bolza();
    if (call.name == "geodesic") return uhlenbeck_construct(ctx.mesh, ctx.q, 0.0);
    if (call.name != "uhlenbeck") throw InputError("mode bolza supports the families geodesic and uhlenbeck");
    const int seed = static_cast<int>(call.args[0]);
    std::vector<cplx> q = seed < 0 || seed == ctx.power ? ctx.q : bolza_differential(ctx, seed);
    return uhlenbeck_construct(ctx.mesh, q, call.args[1]);
}

Report validate_command(SuiteRunner& runner)
{
    Report rep;
    const Scene& s = runner.scene();
    if (s.mode == DomainMode::Bolza) {
        auto f = bolza_funnel(runner);
        rep.add(make_residual_check("constraints: Gauss", gauss_residual(f), s.validate_tol));
        CheckResult c;
        c.name = "constraints: Codazzi";
        c.skipped = true;
        c.note = "holds by construction for holomorphic q";
        rep.add(c);
        return rep;
    }
    auto v = validate(scene_funnel(s), s.validate_tol);
    rep.add(make_residual_check("constraints: Gauss", v.gauss_norm, s.validate_tol));
    CheckResult c = make_residual_check("constraints: Codazzi", v.codazzi_norm, s.validate_tol);
    if (!v.codazzi_checked) {
        c.skipped = true;
        c.note = "not evaluated on this domain";
    }
    rep.add(c);
    return rep;
}

Report volr_command(SuiteRunner& runner, double volK)
{
    Report rep;
    const Scene& s = runner.scene();
    FunnelIntegrals I = s.mode == DomainMode::Bolza ? funnel_integrals(bolza_funnel(runner)) : funnel_integrals(scene_funnel(s));
    auto rv = renormalized_funnel_volume(I);
    rep.add(make_check("renormalized-volume: counterterm route", rv.subtraction, rv.finite_part, 1e-6 * (1 + std::abs(rv.finite_part))));
    const double v = assemble_volr(volK, {I});
    rep.values.emplace_back("volK", volK);
    rep.values.emplace_back("finite_part", rv.finite_part);
    rep.values.emplace_back("volr", v);
    std::cout << std::setprecision(12) << v << "\n";
    return rep;
}

Report uniformize_command(SuiteRunner& runner)
{
    Report rep;
    const Scene& s = runner.scene();
    if (s.mode != DomainMode::Bolza) {
        bool threw = false;
        std::string what;
        try {
            auto d = s.domain();
            liouville_solve(d, scene_funnel(s).h);
        } catch (const GaussBonnetError& e) {
            threw = true;
            what = e.what();
        }
        CheckResult c = make_check("gauss-bonnet: total curvature is negative", threw ? 0.0 : 1.0, 1.0, 0.0, what);
        rep.add(c);
        return rep;
    }
    auto f = bolza_funnel(runner);
    BolzaFem fem = assemble(metric_at_infinity(f));
    auto kappa = curvature_at_infinity(f);
    auto sol = liouville_solve(fem, kappa);
    rep.add(make_residual_check("liouville: residual", sol.residual, 1e-10 * (1 + max_abs(kappa))));
    rep.add(make_lower_bound_check("liouville: at most 12 damped Newton iterations", 12 - sol.iterations, 0.0));
    std::vector<double> e(sol.omega.size());
    for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(2 * sol.omega[i]);
    rep.add(make_check("gauss-bonnet: uniformized area is pi", integrate(fem, e), kPi, 0.005 * kPi));
    rep.values.emplace_back("iterations", sol.iterations);
    rep.values.emplace_back("polyakov_difference", polyakov_difference(fem, kappa, sol.omega));
    Sweep nh{"liouville newton history", "iteration", "residual", {}, {}};
    for (size_t i = 0; i < sol.history.size(); ++i) {
        nh.x.push_back(static_cast<double>(i));
        nh.y.push_back(sol.history[i]);
    }
    rep.sweeps.push_back(nh);

    GriddedField w{DomainMode::Bolza, s.bolza_refinement, "scalar", {}, {}};
    const auto& mesh = *f.mesh;
    for (size_t d = 0; d < mesh.num_dofs(); ++d) {
        cplx z = mesh.chart(mesh.representative(static_cast<int>(d)));
        w.coords.insert(w.coords.end(), {z.real(), z.imag()});
        w.values.push_back(sol.omega[d]);
    }
    save_field(w, s.omega);
    return rep;
}

int run(const Options& o)
{
    auto start = std::chrono::steady_clock::now();
    Scene scene = load_scene(o.scene_path);
    if (o.suite) scene.suite = *o.suite;
    if (o.volK) scene.volK = *o.volK;
    if (o.tol_scale) scene.tol_scale = *o.tol_scale;
    if (o.out) scene.report = *o.out;
    if (o.plots) scene.plots = *o.plots;

    SuiteRunner runner(scene);
    Report rep;
    if (o.command == "validate") rep = validate_command(runner);
    else if (o.command == "volr") rep = volr_command(runner, scene.volK);
    else if (o.command == "uniformize") rep = uniformize_command(runner);
    else rep = runner.run(scene.suite);
    if (scene.tol_scale != 1.0) rescale_tolerances(rep, scene.tol_scale);

    std::ostringstream key;
    key << scene.source << "\n#command " << o.command << " suite " << scene.suite << " volK " << std::setprecision(17) << scene.volK
        << " tol-scale " << scene.tol_scale;
    rep.command = o.command;
    rep.scene_hash = content_hash(key.str());
    if (!o.no_timing) rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string json = rep.to_json();
    if (!scene.report.empty()) {
        std::ofstream out(scene.report);
        if (!out) throw InputError("cannot write report " + scene.report);
        out << json;
    } else if (o.command != "volr") {
        std::cout << json;
    }
    if (!scene.plots.empty()) emit_plotdata(rep, scene.plots);
    std::cerr << o.command << ": " << rep.checks.size() << " checks, " << rep.passed() << " passed, " << rep.failed() << " failed\n";
    for (const auto& c : rep.checks)
        if (!c.pass && !c.skipped && !c.report_only) std::cerr << "  FAIL " << c.name << " (residual " << c.residual << ", tolerance " << c.tolerance << ")\n";
    return rep.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"renormalized volume verification"};
    app.require_subcommand(1);
    Options o;
    for (const char* name : {"validate", "volr", "uniformize", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("scene", o.scene_path, "scene file")->required();
        sub->add_option("--out", o.out, "write the JSON report here");
        sub->add_option("--plots", o.plots, "write sweep column files into this directory");
        sub->add_option("--tol-scale", o.tol_scale, "multiply every tolerance");
        sub->add_flag("--no-timing", o.no_timing, "omit the wall time so reports are byte-reproducible");
        if (std::string(name) == "volr") sub->add_option("--volK", o.volK, "volume of the convex core");
        if (std::string(name) == "verify") sub->add_option("--suite", o.suite, "all, " + [] {
            std::string s;
            for (const auto& n : suite_names()) s += (s.empty() ? "" : ", ") + n;
            return s;
        }());
        sub->callback([&o, sub] { o.command = sub->get_name(); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return run(o);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedDomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
