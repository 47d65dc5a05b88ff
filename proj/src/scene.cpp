#include "renvol/scene.hpp"
#include "renvol/field_io.hpp"
#include "renvol/uhlenbeck.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace renvol {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Line {
    int number;
    std::string key;

    [[noreturn]] void fail(const std::string& why) const
    {
        throw InputError("scene line " + std::to_string(number) + ", key '" + key + "': " + why);
    }
};

double to_double(const Line& at, const std::string& v)
{
    double x = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) at.fail("'" + v + "' is not a number");
    return x;
}

int to_int(const Line& at, const std::string& v)
{
    int x = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) at.fail("'" + v + "' is not an integer");
    return x;
}

std::vector<double> to_list(const Line& at, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(at, trim(item)));
    if (out.empty()) at.fail("empty list");
    return out;
}

std::string existing_file(const Line& at, const std::string& base, const std::string& v)
{
    fs::path p(v);
    if (p.is_relative()) p = fs::path(base) / p;
    if (!fs::is_regular_file(p)) at.fail("file " + p.string() + " does not exist");
    return p.string();
}

using Setter = std::function<void(Scene&, const Line&, const std::string&)>;

// Allowed sections and keys; file keys resolve relative to base.
std::map<std::string, std::map<std::string, Setter>> schema(const std::string& base)
{
    return {
        {"domain",
         {{"mode",
           [](Scene& s, const Line& at, const std::string& v) {
               try {
                   std::string up = v;
                   for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
                   s.mode = parse_mode(up);
               } catch (const InputError&) {
                   at.fail("mode must be torus, patch or bolza");
               }
           }},
          {"torus_resolution", [](Scene& s, const Line& at, const std::string& v) { s.torus_resolution = to_int(at, v); }},
          {"patch_resolution", [](Scene& s, const Line& at, const std::string& v) { s.patch_resolution = to_int(at, v); }},
          {"patch_origin", [](Scene& s, const Line& at, const std::string& v) { s.patch_origin = to_double(at, v); }},
          {"patch_extent", [](Scene& s, const Line& at, const std::string& v) { s.patch_extent = to_double(at, v); }},
          {"patch_buffer", [](Scene& s, const Line& at, const std::string& v) { s.patch_buffer = to_int(at, v); }},
          {"bolza_refinement", [](Scene& s, const Line& at, const std::string& v) { s.bolza_refinement = to_int(at, v); }},
          {"word_length", [](Scene& s, const Line& at, const std::string& v) { s.word_length = to_int(at, v); }}}},
        {"funnel",
         {{"family",
           [](Scene& s, const Line& at, const std::string& v) {
               try {
                   parse_family_call(v);
               } catch (const InputError& e) {
                   at.fail(e.what());
               }
               s.funnel = v;
           }},
          {"h_file", [base](Scene& s, const Line& at, const std::string& v) { s.h_file = existing_file(at, base, v); }},
          {"A_file", [base](Scene& s, const Line& at, const std::string& v) { s.A_file = existing_file(at, base, v); }}}},
        {"family",
         {{"stencil_step", [](Scene& s, const Line& at, const std::string& v) { s.stencil_step = to_double(at, v); }},
          {"s_sweep", [](Scene& s, const Line& at, const std::string& v) { s.s_sweep = to_list(at, v); }}}},
        {"tolerances",
         {{"validate", [](Scene& s, const Line& at, const std::string& v) { s.validate_tol = to_double(at, v); }},
          {"scale", [](Scene& s, const Line& at, const std::string& v) { s.tol_scale = to_double(at, v); }}}},
        {"volr", {{"volK", [](Scene& s, const Line& at, const std::string& v) { s.volK = to_double(at, v); }}}},
        {"suite", {{"name", [](Scene& s, const Line&, const std::string& v) { s.suite = v; }}}},
        {"output",
         {{"report", [](Scene& s, const Line&, const std::string& v) { s.report = v; }},
          {"plots", [](Scene& s, const Line&, const std::string& v) { s.plots = v; }},
          {"omega", [](Scene& s, const Line&, const std::string& v) { s.omega = v; }}}},
    };
}

} // namespace

GridDomain Scene::domain() const
{
    if (mode == DomainMode::Torus) return GridDomain::torus(torus_resolution);
    if (mode == DomainMode::Patch) return GridDomain::patch(patch_resolution, patch_origin, patch_origin, patch_extent, patch_buffer);
    throw UnsupportedDomainError("BOLZA scenes have no grid domain");
}

Scene parse_scene(const std::string& text, const std::string& base_dir)
{
    const auto table = schema(base_dir);
    Scene scene;
    scene.source = text;
    std::istringstream in(text);
    std::string raw, section;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw InputError("scene line " + std::to_string(number) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!table.count(section))
                throw InputError("scene line " + std::to_string(number) + ": unknown section '" + section + "'");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("scene line " + std::to_string(number) + ": expected 'key = value'");
        Line at{number, trim(line.substr(0, eq))};
        std::string value = trim(line.substr(eq + 1));
        if (section.empty()) at.fail("key outside of any section");
        const auto& keys = table.at(section);
        auto it = keys.find(at.key);
        if (it == keys.end()) at.fail("unknown key in section [" + section + "]");
        it->second(scene, at, value);
    }
    if ((scene.h_file.empty()) != (scene.A_file.empty())) throw InputError("scene: h_file and A_file must be given together");
    return scene;
}

Scene load_scene(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot read scene file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::path dir = fs::path(path).parent_path();
    return parse_scene(ss.str(), dir.empty() ? "." : dir.string());
}

FamilyCall parse_family_call(const std::string& spec)
{
    FamilyCall call;
    std::string s = trim(spec);
    size_t open = s.find('(');
    call.name = trim(s.substr(0, open));
    if (open != std::string::npos) {
        if (s.back() != ')') throw InputError("family '" + s + "' is missing ')'");
        std::stringstream args(s.substr(open + 1, s.size() - open - 2));
        std::string item;
        while (std::getline(args, item, ',')) {
            item = trim(item);
            double x = 0;
            auto r = std::from_chars(item.data(), item.data() + item.size(), x);
            if (item.empty() || r.ec != std::errc() || r.ptr != item.data() + item.size())
                throw InputError("family argument '" + item + "' is not a number");
            call.args.push_back(x);
        }
    }
    static const std::map<std::string, size_t> arity{
        {"flat_torus_constA", 3}, {"horospherical", 0}, {"geodesic", 0}, {"uhlenbeck", 2}};
    auto it = arity.find(call.name);
    if (it == arity.end()) throw InputError("unknown family '" + call.name + "'");
    if (call.args.size() != it->second)
        throw InputError("family " + call.name + " takes " + std::to_string(it->second) + " arguments");
    return call;
}

namespace {

std::vector<double> field_components(const GriddedField& f, const GridDomain& d, const std::string& rank,
                                     const std::string& path)
{
    auto bad = [&](const std::string& why) { throw InputError("field file " + path + ": " + why); };
    if (f.rank != rank) bad("expected rank " + rank);
    if (f.mode != d.mode() || f.resolution != d.resolution()) bad("mode or resolution differs from the scene domain");
    if (f.rows() != d.size()) bad("expected one row per grid node");
    for (int j = 0; j < d.side(); ++j)
        for (int i = 0; i < d.side(); ++i) {
            size_t k = d.index(i, j);
            if (std::abs(f.coords[2 * k] - d.x(i)) > 1e-9 || std::abs(f.coords[2 * k + 1] - d.y(j)) > 1e-9)
                bad("row " + std::to_string(k) + " is not at grid node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
    return f.values;
}

} // namespace

FunnelData scene_funnel(const Scene& scene)
{
    GridDomain d = scene.domain();
    if (!scene.h_file.empty()) {
        auto h = field_components(load_field(scene.h_file), d, "sym2", scene.h_file);
        auto a = field_components(load_field(scene.A_file), d, "endo", scene.A_file);
        FunnelData fd{d, sym2_zero(d), endo_zero(d)};
        for (size_t k = 0; k < d.size(); ++k) {
            fd.h.xx[k] = h[3 * k];
            fd.h.xy[k] = h[3 * k + 1];
            fd.h.yy[k] = h[3 * k + 2];
            fd.A.m00[k] = a[4 * k];
            fd.A.m01[k] = a[4 * k + 1];
            fd.A.m10[k] = a[4 * k + 2];
            fd.A.m11[k] = a[4 * k + 3];
        }
        return fd;
    }
    FamilyCall call = parse_family_call(scene.funnel);
    if (call.name == "flat_torus_constA") return flat_torus_constA(d, call.args[0], call.args[1], call.args[2]);
    if (call.name == "horospherical") return horospherical(d);
    Sym2 h0 = d.periodic() ? sym2_sample(d, [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                                         [](double, double) { return 1.0; })
                           : poincare_disk_metric(d);
    if (call.name == "geodesic") return geodesic(d, h0);
    // uhlenbeck(q_seed, s): q = z^q_seed on a hyperbolic patch
    if (d.periodic()) throw InputError("family uhlenbeck needs mode patch or bolza");
    const int power = static_cast<int>(call.args[0]);
    auto q = sample_complex(d, [power](cplx z) {
        cplx w = 1.0;
        for (int k = 0; k < power; ++k) w *= z;
        return w;
    });
    return uhlenbeck_construct(d, h0, q, call.args[1]).fd;
}

} // namespace renvol
