#include "renvol/field_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace renvol {

int rank_components(const std::string& rank)
{
    if (rank == "scalar" || rank == "density") return 1;
    if (rank == "oneform") return 2;
    if (rank == "sym2") return 3;
    if (rank == "endo") return 4;
    if (rank.rfind("weight", 0) == 0 && rank.size() > 6) {
        int k = 0;
        auto r = std::from_chars(rank.data() + 6, rank.data() + rank.size(), k);
        if (r.ec == std::errc() && r.ptr == rank.data() + rank.size()) return 2;
    }
    throw InputError("unknown field rank '" + rank + "'");
}

int GriddedField::components() const { return rank_components(rank); }

std::string write_field(const GriddedField& f)
{
    const int nc = f.components();
    if (f.values.size() != f.rows() * nc) throw PreconditionError("write_field: value count does not match rows");
    std::ostringstream o;
    o << "renvol-field 1\n";
    o << "mode " << mode_name(f.mode) << "\n";
    o << "resolution " << f.resolution << "\n";
    o << "rank " << f.rank << "\n";
    o << "rows " << f.rows() << "\n";
    o << std::setprecision(17);
    for (size_t r = 0; r < f.rows(); ++r) {
        o << f.coords[2 * r] << " " << f.coords[2 * r + 1];
        for (int c = 0; c < nc; ++c) o << " " << f.values[r * nc + c];
        o << "\n";
    }
    return o.str();
}

GriddedField read_field(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) { throw InputError("field file line " + std::to_string(lineno) + ": " + why); };
    auto header = [&](const std::string& key) {
        if (!std::getline(in, line)) fail("missing '" + key + "' header");
        ++lineno;
        std::istringstream ls(line);
        std::string k, v, extra;
        ls >> k >> v;
        if (k != key || v.empty() || (ls >> extra)) fail("expected '" + key + " <value>'");
        return v;
    };
    if (header("renvol-field") != "1") fail("unsupported format version");
    GriddedField f;
    f.mode = parse_mode(header("mode"));
    try {
        f.resolution = std::stoi(header("resolution"));
    } catch (const std::logic_error&) {
        fail("resolution is not an integer");
    }
    f.rank = header("rank");
    const int nc = rank_components(f.rank);
    size_t rows = 0;
    try {
        rows = std::stoul(header("rows"));
    } catch (const std::logic_error&) {
        fail("rows is not an integer");
    }
    f.coords.reserve(2 * rows);
    f.values.reserve(rows * nc);
    for (size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) fail("expected " + std::to_string(rows) + " rows");
        ++lineno;
        std::istringstream ls(line);
        double v;
        int count = 0;
        while (ls >> v) {
            if (count < 2) f.coords.push_back(v); else f.values.push_back(v);
            ++count;
        }
        if (!ls.eof() || count != 2 + nc) fail("row must hold x, y and " + std::to_string(nc) + " numbers");
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") != std::string::npos) fail("trailing content after the last row");
    }
    return f;
}

void save_field(const GriddedField& f, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write field file " + path);
    out << write_field(f);
}

GriddedField load_field(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot read field file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return read_field(ss.str());
}

} // namespace renvol
