#include "renvol/report.hpp"
#include "renvol/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace renvol {

CheckResult make_check(std::string name, double lhs, double rhs, double tolerance, std::string note)
{
    CheckResult c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.residual = std::abs(lhs - rhs);
    c.tolerance = tolerance;
    c.pass = std::isfinite(c.residual) && c.residual <= tolerance;
    c.note = std::move(note);
    return c;
}

CheckResult make_residual_check(std::string name, double residual, double tolerance, std::string note)
{
    CheckResult c = make_check(std::move(name), residual, 0.0, tolerance, std::move(note));
    return c;
}

CheckResult make_lower_bound_check(std::string name, double lhs, double bound, std::string note)
{
    CheckResult c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = bound;
    c.residual = std::max(0.0, bound - lhs);
    c.tolerance = 0.0;
    c.pass = std::isfinite(lhs) && lhs >= bound;
    c.note = std::move(note);
    return c;
}

void Report::append(const Report& other)
{
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    sweeps.insert(sweeps.end(), other.sweeps.begin(), other.sweeps.end());
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    values.insert(values.end(), other.values.begin(), other.values.end());
}

size_t Report::failed() const
{
    size_t n = 0;
    for (const auto& c : checks)
        if (!c.pass && !c.skipped && !c.report_only) ++n;
    return n;
}

size_t Report::passed() const
{
    size_t n = 0;
    for (const auto& c : checks)
        if (c.pass && !c.skipped) ++n;
    return n;
}

namespace {

nlohmann::json num(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string file_stem(const std::string& name)
{
    std::string s = name;
    for (char& ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' && ch != '_') ch = '_';
    return s;
}

} // namespace

std::string Report::to_json() const
{
    using nlohmann::json;
    json j;
    j["tool"] = "renvol";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["scene_hash"] = scene_hash;
    json cs = json::array();
    for (const auto& c : checks) {
        json e;
        e["name"] = c.name;
        e["lhs"] = num(c.lhs);
        e["rhs"] = num(c.rhs);
        e["residual"] = num(c.residual);
        e["tolerance"] = num(c.tolerance);
        if (c.order) e["order"] = num(*c.order);
        e["pass"] = c.pass;
        if (c.skipped) e["skipped"] = true;
        if (c.report_only) e["report_only"] = true;
        if (!c.note.empty()) e["note"] = c.note;
        cs.push_back(e);
    }
    j["checks"] = cs;
    json sw = json::array();
    for (const auto& s : sweeps) {
        json e;
        e["name"] = s.name;
        e["xlabel"] = s.xlabel;
        e["ylabel"] = s.ylabel;
        json xs = json::array(), ys = json::array();
        for (double v : s.x) xs.push_back(num(v));
        for (double v : s.y) ys.push_back(num(v));
        e["x"] = xs;
        e["y"] = ys;
        sw.push_back(e);
    }
    j["sweeps"] = sw;
    json vals = json::object();
    for (const auto& [k, v] : values) vals[k] = num(v);
    j["values"] = vals;
    j["warnings"] = warnings;
    size_t skipped = 0;
    for (const auto& c : checks) skipped += c.skipped ? 1 : 0;
    j["summary"] = {{"total", checks.size()}, {"passed", passed()}, {"failed", failed()}, {"skipped", skipped}};
    if (wall_time_s) j["wall_time_s"] = *wall_time_s;
    return j.dump(2) + "\n";
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, "fitted_order needs at least two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void emit_plotdata(const Report& report, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& s : report.sweeps) {
        std::ofstream out(fs::path(dir) / (file_stem(s.name) + ".dat"));
        if (!out) throw InputError("cannot write plot file in " + dir);
        out << "# " << s.xlabel << " " << s.ylabel << "\n";
        out << std::setprecision(17);
        for (size_t i = 0; i < s.x.size(); ++i) out << s.x[i] << " " << s.y[i] << "\n";
    }
}

} // namespace renvol
