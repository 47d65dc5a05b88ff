#pragma once

#include "renvol/bolza_mesh.hpp"
#include "renvol/poincare.hpp"

namespace renvol {

/// Everything needed to build Bolza funnels: the group, a word ball, a mesh
/// and a holomorphic quadratic differential at the chart vertices.
struct BolzaContext {
    std::shared_ptr<const fuchsian::FuchsianGroup> group;
    std::shared_ptr<const fuchsian::GroupBall> ball;
    std::shared_ptr<const BolzaMesh> mesh;
    int power = 0;
    double equivariance = 0.0;   // series residual on the octagon samples
    std::vector<cplx> q;         // scaled so that max |q|^2 / rho^4 over vertices is 1
};

/// power < 0 selects the first non-degenerate seed.
BolzaContext make_bolza_context(int refinement, int word_length, int power = -1);

/// Series of another seed over the same ball and mesh, same normalization.
std::vector<cplx> bolza_differential(const BolzaContext& ctx, int power);

} // namespace renvol
