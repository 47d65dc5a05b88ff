#include "renvol/report.hpp"
#include "renvol/scene.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace renvol;
namespace fs = std::filesystem;

namespace {

fs::path scratch()
{
    fs::path dir = fs::temp_directory_path() / "renvol_test_cli";
    fs::create_directories(dir);
    return dir;
}

fs::path write_scene(const std::string& name, const std::string& text)
{
    fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

struct Run {
    int status;
    std::string out;
};

Run run_cli(const std::string& args)
{
    std::string cmd = std::string(RENVOL_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    int st = pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmallTorus = "[domain]\nmode = torus\ntorus_resolution = 32\n";

} // namespace

TEST_CASE("scene parser names the line and key of an unknown key")
{
    try {
        parse_scene("[domain]\nmode = torus\n\nbogus = 3\n");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        std::string what = e.what();
        CHECK(what.find("line 4") != std::string::npos);
        CHECK(what.find("'bogus'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scene("[nowhere]\n"), InputError);
    CHECK_THROWS_AS(parse_scene("mode = torus\n"), InputError);
    CHECK_THROWS_AS(parse_scene("[domain]\ntorus_resolution = 12x\n"), InputError);
    CHECK_THROWS_AS(parse_scene("[funnel]\nh_file = /nonexistent/h.field\n"), InputError);
}

TEST_CASE("scene parser reads every section")
{
    Scene s = parse_scene("# comment\n[domain]\nmode = bolza   # trailing\nbolza_refinement = 2\nword_length = 5\n"
                          "[funnel]\nfamily = uhlenbeck(-1, 0.03)\n[family]\ns_sweep = 0.01, 0.03\nstencil_step = 0.01\n"
                          "[tolerances]\nvalidate = 1e-7\nscale = 2\n[volr]\nvolK = 1.5\n[suite]\nname = funnel\n"
                          "[output]\nreport = r.json\nplots = plots\nomega = w.field\n");
    CHECK(s.mode == DomainMode::Bolza);
    CHECK(s.bolza_refinement == 2);
    CHECK(s.word_length == 5);
    CHECK(s.funnel == "uhlenbeck(-1, 0.03)");
    CHECK(s.s_sweep == std::vector<double>{0.01, 0.03});
    CHECK(s.stencil_step == 0.01);
    CHECK(s.validate_tol == 1e-7);
    CHECK(s.tol_scale == 2);
    CHECK(s.volK == 1.5);
    CHECK(s.suite == "funnel");
    CHECK(s.report == "r.json");
    CHECK(s.omega == "w.field");
    CHECK_THROWS_AS(s.domain(), UnsupportedDomainError);
}

TEST_CASE("family calls check their arity")
{
    auto c = parse_family_call("flat_torus_constA(2, 0, 0.5)");
    CHECK(c.name == "flat_torus_constA");
    CHECK(c.args == std::vector<double>{2, 0, 0.5});
    CHECK_THROWS_AS(parse_family_call("flat_torus_constA(2, 0)"), InputError);
    CHECK_THROWS_AS(parse_family_call("horospherical(1)"), InputError);
    CHECK_THROWS_AS(parse_family_call("moebius"), InputError);
    CHECK_THROWS_AS(parse_family_call("uhlenbeck(2, x)"), InputError);
}

TEST_CASE("volr of the unit horospherical torus with volK = 1 is 0.5")
{
    auto p = write_scene("horo.scene", std::string(kSmallTorus) + "[funnel]\nfamily = horospherical\n[volr]\nvolK = 1\n");
    Run r = run_cli("volr " + p.string());
    CHECK(r.status == 0);
    CHECK(std::stod(r.out) == doctest::Approx(0.5).epsilon(1e-12));
    Run k = run_cli("volr " + p.string() + " --volK 3");
    CHECK(std::stod(k.out) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("validate fails on A = diag(2, 1) and passes on diag(2, 1/2)")
{
    auto bad = write_scene("bad_gauss.scene", std::string(kSmallTorus) + "[funnel]\nfamily = flat_torus_constA(2, 0, 1)\n");
    Run r = run_cli("validate " + bad.string() + " --no-timing");
    CHECK(r.status == 1);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "validate");
    CHECK(j["summary"]["failed"].get<int>() >= 1);
    auto good = write_scene("good_gauss.scene", std::string(kSmallTorus) + "[funnel]\nfamily = flat_torus_constA(2, 0, 0.5)\n");
    CHECK(run_cli("validate " + good.string()).status == 0);
}

TEST_CASE("bad input exits with status 2")
{
    auto bad = write_scene("unknown_key.scene", "[domain]\nresolution = 3\n");
    CHECK(run_cli("validate " + bad.string()).status == 2);
    CHECK(run_cli("validate " + (scratch() / "missing.scene").string()).status == 2);
    auto ok = write_scene("plain.scene", kSmallTorus);
    CHECK(run_cli("verify " + ok.string() + " --suite nonsense").status == 2);
    CHECK(run_cli("frobnicate " + ok.string()).status == 2);
    auto patch_only = write_scene("uhl_torus.scene", std::string(kSmallTorus) + "[funnel]\nfamily = uhlenbeck(2, 0.01)\n");
    CHECK(run_cli("validate " + patch_only.string()).status == 2);
}

TEST_CASE("uniformize refuses torus scenes through a failed Gauss-Bonnet check")
{
    auto p = write_scene("uni_torus.scene", kSmallTorus);
    Run r = run_cli("uniformize " + p.string() + " --no-timing");
    CHECK(r.status == 1);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["checks"][0]["name"].get<std::string>().find("gauss-bonnet") != std::string::npos);
}

TEST_CASE("reports are byte-identical with --no-timing")
{
    auto p = write_scene("repro.scene", std::string(kSmallTorus) + "[funnel]\nfamily = flat_torus_constA(1.5, 0.2, 0.7)\n");
    fs::path a = scratch() / "a.json", b = scratch() / "b.json";
    run_cli("validate " + p.string() + " --no-timing --out " + a.string());
    run_cli("validate " + p.string() + " --no-timing --out " + b.string());
    CHECK(!slurp(a).empty());
    CHECK(slurp(a) == slurp(b));
    auto j = nlohmann::json::parse(slurp(a));
    CHECK(!j.contains("wall_time_s"));
    CHECK(j["version"] == kToolVersion);
    CHECK(j["scene_hash"].get<std::string>().size() > 0);
    Run timed = run_cli("validate " + p.string());
    CHECK(nlohmann::json::parse(timed.out).contains("wall_time_s"));
}

TEST_CASE("the scene hash changes with the command line overrides")
{
    auto p = write_scene("hash.scene", kSmallTorus);
    auto h1 = nlohmann::json::parse(run_cli("validate " + p.string() + " --no-timing").out)["scene_hash"];
    auto h2 = nlohmann::json::parse(run_cli("validate " + p.string() + " --no-timing --tol-scale 2").out)["scene_hash"];
    CHECK(h1 != h2);
}

TEST_CASE("plot data: one file per sweep and none without sweeps")
{
    fs::path empty = scratch() / "plots_empty";
    fs::remove_all(empty);
    fs::create_directories(empty);
    emit_plotdata(Report{}, empty.string());
    CHECK(fs::is_empty(empty));

    fs::path dir = scratch() / "plots";
    fs::remove_all(dir);
    Report r;
    r.sweeps.push_back({"order vs dx: a/b", "dx", "err", {0.1, 0.05}, {1e-3, 6.25e-5}});
    emit_plotdata(r, dir.string());
    int files = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        ++files;
        std::string name = e.path().filename().string();
        CHECK(name.find('/') == std::string::npos);
        CHECK(name.find(' ') == std::string::npos);
        CHECK(slurp(e.path()).find("0.05") != std::string::npos);
    }
    CHECK(files == 1);
}
