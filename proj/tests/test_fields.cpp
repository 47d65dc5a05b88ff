#include <doctest.h>

#include "renvol/bolza_mesh.hpp"
#include "renvol/field_io.hpp"
#include "renvol/grid.hpp"
#include "renvol/poincare.hpp"
#include "renvol/report.hpp"

#include <memory>

using namespace renvol;

namespace {

std::shared_ptr<const fuchsian::FuchsianGroup> bolza()
{
    static auto g = std::make_shared<const fuchsian::FuchsianGroup>(fuchsian::build_bolza());
    return g;
}

} // namespace

TEST_CASE("torus derivatives are fourth order")
{
    std::vector<double> err, h;
    for (int n : {16, 32, 64}) {
        auto d = GridDomain::torus(n);
        Grid f = sample(d, [](double x, double y) { return std::sin(2 * kPi * x) * std::cos(2 * kPi * y); });
        Grid fx = diff_x(d, f);
        Grid ex = sample(d, [](double x, double y) { return 2 * kPi * std::cos(2 * kPi * x) * std::cos(2 * kPi * y); });
        double e = 0;
        for (size_t k = 0; k < d.size(); ++k) e = std::max(e, std::abs(fx[k] - ex[k]));
        err.push_back(e);
        h.push_back(d.dx());
    }
    CHECK(fitted_order(h, err) > 3.8);
}

TEST_CASE("patch one-sided stencils are exact on quartics and transpose is exact")
{
    auto d = GridDomain::patch(12, -0.3, -0.3, 0.6, 2);
    Grid f = sample(d, [](double x, double y) { return x * x * x * x - 2 * x * y + y * y * y; });
    Grid fx = diff_x(d, f), fy = diff_y(d, f);
    for (int j = 0; j < d.side(); ++j)
        for (int i = 0; i < d.side(); ++i) {
            double x = d.x(i), y = d.y(j);
            CHECK(fx[d.index(i, j)] == doctest::Approx(4 * x * x * x - 2 * y).epsilon(1e-10));
            CHECK(fy[d.index(i, j)] == doctest::Approx(-2 * x + 3 * y * y).epsilon(1e-10));
        }
    Grid g = sample(d, [](double x, double y) { return std::cos(3 * x + y); });
    Grid gt = diff_x_transpose(d, g);
    double lhs = 0, rhs = 0;
    for (size_t k = 0; k < d.size(); ++k) {
        lhs += fx[k] * g[k];
        rhs += f[k] * gt[k];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(d.evaluation_set().size() == 144);
    CHECK_THROWS_AS(GridDomain::patch(12, 0, 0, 0.5, 1), PreconditionError);
    CHECK_THROWS_AS(GridDomain::torus(16, -1.0), PreconditionError);
}

TEST_CASE("bolza mesh is a closed genus-two surface")
{
    for (int r = 1; r <= 4; ++r) {
        auto M = BolzaMesh::build(bolza(), r);
        CHECK(M.euler_characteristic() == -2);
        CHECK(M.num_triangles() == static_cast<size_t>(16) << (2 * r));
        // all eight corners are one point of the surface
        for (int k = 1; k < 8; ++k) CHECK(M.dof(1 + k) == M.dof(1));
    }
    CHECK_THROWS_AS(BolzaMesh::build(bolza(), 0), PreconditionError);
}

TEST_CASE("bolza area converges to 4 pi at second order")
{
    std::vector<double> h, err;
    for (int r = 1; r <= 4; ++r) {
        auto M = BolzaMesh::build(bolza(), r);
        h.push_back(M.max_edge());
        err.push_back(std::abs(M.hyperbolic_area() - 4 * kPi));
        if (r == 3) CHECK(std::abs(M.hyperbolic_area() / (4 * kPi) - 1) < 0.01);
    }
    CHECK(fitted_order(h, err) >= 1.9);
}

TEST_CASE("transition rules on glued sides")
{
    auto M = BolzaMesh::build(bolza(), 2);
    ChartField one{ChartRank::Scalar, 0, std::vector<cplx>(M.num_chart_vertices(), 1.0)};
    CHECK(transition_residual(M, one) == 0.0);
    ChartField rho{ChartRank::Density, 0, {}};
    for (auto z : M.chart_vertices()) rho.values.push_back(poincare_rho2(z));
    CHECK(transition_residual(M, rho) < 1e-9);
    // a non-invariant scalar fails
    ChartField x{ChartRank::Scalar, 0, {}};
    for (auto z : M.chart_vertices()) x.values.push_back(cplx(z.real(), 0));
    CHECK(transition_residual(M, x) > 0.1);

    auto ball = std::make_shared<const fuchsian::GroupBall>(fuchsian::enumerate_group(*bolza(), 4));
    fuchsian::PoincareSeries q(bolza(), ball, 0);
    ChartField qf{ChartRank::Weight, 4, q.evaluate(M.chart_vertices())};
    for (int k = 0; k < 8; ++k) {
        std::vector<cplx> side;
        for (const auto& gl : M.glue())
            if (gl.side == k) side.push_back(M.chart(gl.from));
        double series = q.equivariance_residual(side, k);
        CHECK(transition_residual(M, qf, k) == doctest::Approx(series).epsilon(1e-10));
    }
}

TEST_CASE("field files round trip and reject malformed input")
{
    GriddedField f;
    f.mode = DomainMode::Torus;
    f.resolution = 2;
    f.rank = "sym2";
    f.coords = {0, 0, 0.5, 0, 0, 0.5, 0.5, 0.5};
    for (int i = 0; i < 12; ++i) f.values.push_back(0.1 * i + 1.0 / 3.0);
    std::string text = write_field(f);
    GriddedField g = read_field(text);
    CHECK(g.values == f.values);
    CHECK(g.coords == f.coords);
    CHECK(write_field(g) == text);
    CHECK_THROWS_AS(read_field("renvol-field 1\nmode SPHERE\n"), InputError);
    CHECK_THROWS_AS(read_field("renvol-field 1\nmode TORUS\nresolution 2\nrank tensor3\nrows 0\n"), InputError);
    CHECK_THROWS_AS(read_field("renvol-field 1\nmode TORUS\nresolution 2\nrank scalar\nrows 2\n0 0 1\n"), InputError);
    CHECK_THROWS_AS(read_field("renvol-field 1\nmode TORUS\nresolution 2\nrank scalar\nrows 1\n0 0 1 2\n"), InputError);
}
