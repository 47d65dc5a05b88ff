#pragma once

#include "renvol/funnel.hpp"

#include <string>
#include <vector>

namespace renvol {

/// A scene file: `[section]` headers followed by `key = value` lines, `#`
/// starts a comment. Unknown sections and keys are rejected with the line
/// number.
struct Scene {
    // [domain]
    DomainMode mode = DomainMode::Torus;
    int torus_resolution = 128;
    int patch_resolution = 128;
    double patch_origin = -0.3;
    double patch_extent = 0.6;
    int patch_buffer = 8;
    int bolza_refinement = 3;
    int word_length = 8;
    // [funnel]
    std::string funnel = "horospherical";   // flat_torus_constA(a11,a12,a22) | horospherical | geodesic | uhlenbeck(q_seed,s)
    std::string h_file;                     // field files replace the built-in family
    std::string A_file;
    // [family]
    double stencil_step = 0.02;
    std::vector<double> s_sweep{0.01, 0.02, 0.04};
    // [tolerances]
    double validate_tol = 1e-6;
    double tol_scale = 1.0;
    // [volr]
    double volK = 0.0;
    // [suite]
    std::string suite = "all";
    // [output]
    std::string report;
    std::string plots;
    std::string omega = "omega.field";

    std::string source;   // the scene text, for the report hash

    GridDomain domain() const;
};

Scene parse_scene(const std::string& text, const std::string& base_dir = ".");
Scene load_scene(const std::string& path);

/// A built-in family call such as `flat_torus_constA(2, 0, 0.5)`: the name and its numeric arguments.
struct FamilyCall {
    std::string name;
    std::vector<double> args;
};
FamilyCall parse_family_call(const std::string& spec);

/// Grid funnel data named by the scene (TORUS or PATCH); InputError for Bolza-only families.
FunnelData scene_funnel(const Scene& scene);

} // namespace renvol
