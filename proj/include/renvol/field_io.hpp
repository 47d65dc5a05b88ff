#pragma once

#include "renvol/grid.hpp"

#include <string>
#include <vector>

namespace renvol {

/// Sampled field in the plain-text exchange format: a header naming the
/// domain mode, resolution and rank, then one row per sample point holding
/// x, y and the components.
struct GriddedField {
    DomainMode mode = DomainMode::Torus;
    int resolution = 0;
    std::string rank;                 // scalar, oneform, sym2, endo, density, weight<k>
    std::vector<double> coords;       // x0 y0 x1 y1 ...
    std::vector<double> values;       // components row-major

    size_t rows() const { return coords.size() / 2; }
    int components() const;
};

/// Number of stored components for a rank name; throws InputError if unknown.
int rank_components(const std::string& rank);

std::string write_field(const GriddedField& f);
GriddedField read_field(const std::string& text);

void save_field(const GriddedField& f, const std::string& path);
GriddedField load_field(const std::string& path);

} // namespace renvol
