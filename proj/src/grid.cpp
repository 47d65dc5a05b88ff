#include "renvol/grid.hpp"

#include <algorithm>
#include <sstream>

namespace renvol {

const char* mode_name(DomainMode m)
{
    switch (m) {
    case DomainMode::Patch: return "PATCH";
    case DomainMode::Torus: return "TORUS";
    default: return "BOLZA";
    }
}

DomainMode parse_mode(const std::string& s)
{
    if (s == "PATCH") return DomainMode::Patch;
    if (s == "TORUS") return DomainMode::Torus;
    if (s == "BOLZA") return DomainMode::Bolza;
    throw InputError("unknown domain mode '" + s + "'");
}

GridDomain GridDomain::torus(int n, double lx, double ly)
{
    if (n < 8) throw PreconditionError("TORUS grid needs at least 8 nodes per period");
    if (!(lx > 0.0 && ly > 0.0)) throw PreconditionError("TORUS periods must be positive");
    GridDomain d;
    d.m_mode = DomainMode::Torus;
    d.m_n = n;
    d.m_side = n;
    d.m_lx = lx;
    d.m_ly = ly;
    d.m_dx = lx / n;
    d.m_dy = ly / n;
    if (std::abs(d.m_dx - d.m_dy) > 1e-14 * d.m_dx) throw PreconditionError("TORUS grid must have square cells");
    d.m_eval.resize(d.size());
    for (size_t k = 0; k < d.size(); ++k) d.m_eval[k] = k;
    return d;
}

GridDomain GridDomain::patch(int n, double x0, double y0, double extent, int buffer)
{
    if (n < 5) throw PreconditionError("PATCH grid needs at least 5 interior nodes per side");
    if (buffer < 2) throw PreconditionError("PATCH buffer must cover the stencil radius (>= 2)");
    if (!(extent > 0.0)) throw PreconditionError("PATCH extent must be positive");
    GridDomain d;
    d.m_mode = DomainMode::Patch;
    d.m_n = n;
    d.m_buffer = buffer;
    d.m_side = n + 2 * buffer;
    d.m_x0 = x0;
    d.m_y0 = y0;
    d.m_lx = d.m_ly = extent;
    d.m_dx = d.m_dy = extent / (n - 1);
    for (int j = 0; j < d.m_side; ++j)
        for (int i = 0; i < d.m_side; ++i)
            if (d.interior(i, j)) d.m_eval.push_back(d.index(i, j));
    return d;
}

std::vector<size_t> GridDomain::inner_set(int margin) const
{
    if (periodic()) return m_eval;
    std::vector<size_t> s;
    for (int j = m_buffer + margin; j < m_buffer + m_n - margin; ++j)
        for (int i = m_buffer + margin; i < m_buffer + m_n - margin; ++i) s.push_back(index(i, j));
    return s;
}

std::string GridDomain::describe() const
{
    std::ostringstream o;
    o << mode_name(m_mode) << " n=" << m_n;
    if (!periodic()) o << " buffer=" << m_buffer << " box=[" << m_x0 << "," << m_x0 + m_lx << "]x[" << m_y0 << "," << m_y0 + m_ly << "]";
    return o.str();
}

Grid sample(const GridDomain& d, const std::function<double(double, double)>& f)
{
    Grid g(d.size());
    for (int j = 0; j < d.side(); ++j)
        for (int i = 0; i < d.side(); ++i) g[d.index(i, j)] = f(d.x(i), d.y(j));
    return g;
}

namespace {

// Derivative along one axis of a line of n samples with given stride.
void diff_line(const double* f, double* out, int n, size_t stride, double h, bool periodic)
{
    const double c = 1.0 / (12.0 * h);
    auto at = [&](int i) { return f[static_cast<size_t>(i) * stride]; };
    if (periodic) {
        for (int i = 0; i < n; ++i) {
            int m2 = (i - 2 + n) % n, m1 = (i - 1 + n) % n, p1 = (i + 1) % n, p2 = (i + 2) % n;
            out[static_cast<size_t>(i) * stride] = c * (at(m2) - 8.0 * at(m1) + 8.0 * at(p1) - at(p2));
        }
        return;
    }
    for (int i = 2; i < n - 2; ++i)
        out[static_cast<size_t>(i) * stride] = c * (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2));
    out[0] = c * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
    out[stride] = c * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4));
    out[static_cast<size_t>(n - 1) * stride] =
        -c * (-25.0 * at(n - 1) + 48.0 * at(n - 2) - 36.0 * at(n - 3) + 16.0 * at(n - 4) - 3.0 * at(n - 5));
    out[static_cast<size_t>(n - 2) * stride] =
        -c * (-3.0 * at(n - 1) - 10.0 * at(n - 2) + 18.0 * at(n - 3) - 6.0 * at(n - 4) + at(n - 5));
}

// Row i of the derivative matrix along a line of n samples (unit spacing).
int stencil_row(int i, int n, bool periodic, int* cols, double* w)
{
    static const double central[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
    static const double edge0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    static const double edge1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
    for (int m = 0; m < 5; ++m) {
        if (periodic || (i >= 2 && i < n - 2)) {
            cols[m] = periodic ? (i - 2 + m + n) % n : i - 2 + m;
            w[m] = central[m] / 12.0;
        } else if (i == 0 || i == 1) {
            cols[m] = m;
            w[m] = (i == 0 ? edge0[m] : edge1[m]) / 12.0;
        } else {
            cols[m] = n - 1 - m;
            w[m] = -(i == n - 1 ? edge0[m] : edge1[m]) / 12.0;
        }
    }
    return 5;
}

void diff_line_transpose(const double* f, double* out, int n, size_t stride, double h, bool periodic)
{
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i) * stride] = 0.0;
    int cols[5];
    double w[5];
    for (int i = 0; i < n; ++i) {
        stencil_row(i, n, periodic, cols, w);
        for (int m = 0; m < 5; ++m) out[static_cast<size_t>(cols[m]) * stride] += w[m] / h * f[static_cast<size_t>(i) * stride];
    }
}

} // namespace

Grid diff_x_transpose(const GridDomain& d, const Grid& f)
{
    Grid out(d.size());
    const int n = d.side();
    for (int j = 0; j < n; ++j) diff_line_transpose(&f[d.index(0, j)], &out[d.index(0, j)], n, 1, d.dx(), d.periodic());
    return out;
}

Grid diff_y_transpose(const GridDomain& d, const Grid& f)
{
    Grid out(d.size());
    const int n = d.side();
    for (int i = 0; i < n; ++i) diff_line_transpose(&f[d.index(i, 0)], &out[d.index(i, 0)], n, n, d.dy(), d.periodic());
    return out;
}

Grid diff_x(const GridDomain& d, const Grid& f)
{
    Grid out(d.size());
    const int n = d.side();
    for (int j = 0; j < n; ++j) diff_line(&f[d.index(0, j)], &out[d.index(0, j)], n, 1, d.dx(), d.periodic());
    return out;
}

Grid diff_y(const GridDomain& d, const Grid& f)
{
    Grid out(d.size());
    const int n = d.side();
    for (int i = 0; i < n; ++i) diff_line(&f[d.index(i, 0)], &out[d.index(i, 0)], n, n, d.dy(), d.periodic());
    return out;
}

Grid laplace_flat(const GridDomain& d, const Grid& f)
{
    Grid out(d.size(), 0.0);
    const int n = d.side();
    const double cx = 1.0 / (12.0 * d.dx() * d.dx()), cy = 1.0 / (12.0 * d.dy() * d.dy());
    auto wrap = [&](int i) { return d.periodic() ? (i + n) % n : i; };
    int lo = d.periodic() ? 0 : 2, hi = d.periodic() ? n : n - 2;
    for (int j = lo; j < hi; ++j)
        for (int i = lo; i < hi; ++i) {
            auto F = [&](int a, int b) { return f[d.index(wrap(a), wrap(b))]; };
            double fx = -F(i - 2, j) + 16.0 * F(i - 1, j) - 30.0 * F(i, j) + 16.0 * F(i + 1, j) - F(i + 2, j);
            double fy = -F(i, j - 2) + 16.0 * F(i, j - 1) - 30.0 * F(i, j) + 16.0 * F(i, j + 1) - F(i, j + 2);
            out[d.index(i, j)] = cx * fx + cy * fy;
        }
    return out;
}

double sup_norm(const Grid& f, const std::vector<size_t>& set)
{
    double m = 0.0;
    for (size_t k : set) m = std::max(m, std::abs(f[k]));
    return m;
}

} // namespace renvol
