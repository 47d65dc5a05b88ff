#pragma once

#include "renvol/common.hpp"

#include <functional>

namespace renvol {

enum class DomainMode { Patch, Torus, Bolza };

const char* mode_name(DomainMode m);
DomainMode parse_mode(const std::string& s);

/// Uniform square grid on a chart. A TORUS grid is periodic with n nodes per
/// period. A PATCH grid has n interior nodes per side spanning the closed box
/// [x0, x0 + extent] and `buffer` extra nodes on every side; quantities are
/// reported on the interior only.
class GridDomain {
public:
    static GridDomain torus(int n, double period_x = 1.0, double period_y = 1.0);
    static GridDomain patch(int n, double x0, double y0, double extent, int buffer = 8);

    DomainMode mode() const { return m_mode; }
    bool periodic() const { return m_mode == DomainMode::Torus; }
    int resolution() const { return m_n; }
    int buffer() const { return m_buffer; }
    int side() const { return m_side; }                 // nodes per side including buffer
    size_t size() const { return static_cast<size_t>(m_side) * m_side; }
    double dx() const { return m_dx; }
    double dy() const { return m_dy; }
    double period_x() const { return m_lx; }
    double period_y() const { return m_ly; }

    size_t index(int i, int j) const { return static_cast<size_t>(j) * m_side + i; }
    double x(int i) const { return m_x0 + (i - m_buffer) * m_dx; }
    double y(int j) const { return m_y0 + (j - m_buffer) * m_dy; }
    bool interior(int i, int j) const
    {
        return i >= m_buffer && i < m_buffer + m_n && j >= m_buffer && j < m_buffer + m_n;
    }
    /// Node indices where results are reported.
    const std::vector<size_t>& evaluation_set() const { return m_eval; }
    /// Interior nodes at distance >= margin from the interior boundary.
    std::vector<size_t> inner_set(int margin) const;

    std::string describe() const;

private:
    DomainMode m_mode = DomainMode::Torus;
    int m_n = 0, m_buffer = 0, m_side = 0;
    double m_x0 = 0, m_y0 = 0, m_lx = 1, m_ly = 1, m_dx = 0, m_dy = 0;
    std::vector<size_t> m_eval;
};

using Grid = std::vector<double>;

/// Samples f(x, y) at every node.
Grid sample(const GridDomain& d, const std::function<double(double, double)>& f);

/// Fourth-order first derivatives. Periodic on TORUS; on PATCH the two
/// outermost nodes use one-sided fourth-order stencils.
Grid diff_x(const GridDomain& d, const Grid& f);
Grid diff_y(const GridDomain& d, const Grid& f);

/// Exact transposes of diff_x and diff_y as matrices on node values.
Grid diff_x_transpose(const GridDomain& d, const Grid& f);
Grid diff_y_transpose(const GridDomain& d, const Grid& f);

/// Fourth-order five-point second derivative d^2/dx^2 + d^2/dy^2 at nodes at
/// least two away from the edge (zero elsewhere on PATCH).
Grid laplace_flat(const GridDomain& d, const Grid& f);

/// sup |f| over a node set.
double sup_norm(const Grid& f, const std::vector<size_t>& set);

} // namespace renvol
