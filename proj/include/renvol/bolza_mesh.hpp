#pragma once

#include "renvol/fuchsian.hpp"

#include <array>
#include <memory>

namespace renvol {

/// Triangulation of the Bolza octagon in the disk chart, refined by
/// hyperbolic midpoints so boundary vertices stay on the geodesic sides.
/// Chart vertices on paired sides are identified into one degree of freedom.
class BolzaMesh {
public:
    struct Glue {
        int from;        // chart vertex on side `side`
        int to;          // its image under generator `side`, on side side+4
        int side;
    };

    /// refinement >= 1; at 0 the glued complex has multiple edges between the same vertices.
    static BolzaMesh build(std::shared_ptr<const fuchsian::FuchsianGroup> group, int refinement);

    const fuchsian::FuchsianGroup& group() const { return *m_group; }
    std::shared_ptr<const fuchsian::FuchsianGroup> group_ptr() const { return m_group; }
    int refinement() const { return m_refinement; }

    size_t num_chart_vertices() const { return m_chart.size(); }
    size_t num_dofs() const { return m_canonical.size(); }
    size_t num_triangles() const { return m_tris.size(); }

    cplx chart(int v) const { return m_chart[v]; }
    const std::vector<cplx>& chart_vertices() const { return m_chart; }
    int dof(int v) const { return m_dof[v]; }
    const std::vector<int>& dof_map() const { return m_dof; }
    /// A chart vertex representing each degree of freedom.
    int representative(int d) const { return m_canonical[d]; }
    const std::array<int, 3>& triangle(size_t t) const { return m_tris[t]; }
    uint8_t side_mask(int v) const { return m_side_mask[v]; }
    const std::vector<Glue>& glue() const { return m_glue; }

    int euler_characteristic() const { return m_euler; }
    /// Euclidean area of a chart triangle.
    double chart_area(size_t t) const { return m_area[t]; }
    cplx centroid(size_t t) const;
    /// Gradients of the three barycentric coordinates (as complex numbers x + iy).
    const std::array<cplx, 3>& gradients(size_t t) const { return m_grad[t]; }

    /// Area of the Poincare metric 4|dz|^2/(1-|z|^2)^2, midpoint rule.
    double hyperbolic_area() const;
    /// Largest Euclidean edge length.
    double max_edge() const { return m_max_edge; }

private:
    std::shared_ptr<const fuchsian::FuchsianGroup> m_group;
    int m_refinement = 0;
    std::vector<cplx> m_chart;
    std::vector<uint8_t> m_side_mask;
    std::vector<std::array<int, 3>> m_tris;
    std::vector<int> m_dof;
    std::vector<int> m_canonical;
    std::vector<Glue> m_glue;
    std::vector<double> m_area;
    std::vector<std::array<cplx, 3>> m_grad;
    int m_euler = 0;
    double m_max_edge = 0.0;
};

/// Poincare conformal factor rho^2 = 4/(1-|z|^2)^2.
inline double poincare_rho2(cplx z)
{
    double s = 1.0 - std::norm(z);
    return 4.0 / (s * s);
}

/// Transformation rule of a field sampled at chart vertices.
enum class ChartRank {
    Scalar,     // f(g z) = f(z)
    Density,    // f(g z) |g'(z)|^2 = f(z), e.g. a conformal factor rho^2
    Weight,     // f(g z) g'(z)^(k/2) = f(z); k = 4 for quadratic differentials
};

struct ChartField {
    ChartRank rank = ChartRank::Scalar;
    int weight = 0;
    std::vector<cplx> values;   // one per chart vertex
};

/// max |transition(f)(from) - f(from)| over chart vertices glued across `side`.
double transition_residual(const BolzaMesh& mesh, const ChartField& f, int side);
/// Same maximum over all eight sides.
double transition_residual(const BolzaMesh& mesh, const ChartField& f);

/// Values of a chart field at one chart vertex per degree of freedom; the
/// field must be a glued scalar.
std::vector<double> to_dofs(const BolzaMesh& mesh, const ChartField& f);

} // namespace renvol
