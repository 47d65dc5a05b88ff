#include "renvol/bolza_context.hpp"

namespace renvol {

namespace {

std::vector<cplx> normalized(const fuchsian::PoincareSeries& series, const BolzaMesh& mesh)
{
    std::vector<cplx> q = series.evaluate(mesh.chart_vertices());
    double mx = 0.0;
    for (size_t v = 0; v < q.size(); ++v) {
        double r2 = poincare_rho2(mesh.chart(static_cast<int>(v)));
        mx = std::max(mx, std::abs(q[v]) / r2);
    }
    require(mx > 0.0, "quadratic differential vanishes on the mesh");
    for (auto& z : q) z /= mx;
    return q;
}

} // namespace

BolzaContext make_bolza_context(int refinement, int word_length, int power)
{
    BolzaContext c;
    c.group = std::make_shared<const fuchsian::FuchsianGroup>(fuchsian::build_bolza());
    c.ball = std::make_shared<const fuchsian::GroupBall>(fuchsian::enumerate_group(*c.group, word_length));
    c.mesh = std::make_shared<const BolzaMesh>(BolzaMesh::build(c.group, refinement));
    auto samples = fuchsian::octagon_samples(*c.group);
    auto series = power < 0 ? fuchsian::first_nondegenerate_series(c.group, c.ball, samples)
                            : fuchsian::poincare_series(c.group, c.ball, power, samples);
    c.power = series.power();
    c.equivariance = series.equivariance_residual(samples);
    c.q = normalized(series, *c.mesh);
    return c;
}

std::vector<cplx> bolza_differential(const BolzaContext& ctx, int power)
{
    auto samples = fuchsian::octagon_samples(*ctx.group);
    return normalized(fuchsian::poincare_series(ctx.group, ctx.ball, power, samples), *ctx.mesh);
}

} // namespace renvol
