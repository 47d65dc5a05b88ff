#include "renvol/linalg.hpp"
#include "renvol/tensorcalc.hpp"

namespace renvol {

namespace {

// The map xi -> B xi = D_i xi_j + D_j xi_i - 2 G^k_ij xi_k, its weighted
// trace-free projection and the exact transpose, on flattened unknowns.
class KillingNormalOperator {
public:
    KillingNormalOperator(const GridDomain& d, const Sym2& h) : m_d(d), m_h(h), m_G(christoffel(d, h)), m_inv(metric_inverse(h))
    {
        const size_t n = d.size();
        m_sg.resize(n);
        for (size_t k = 0; k < n; ++k) m_sg[k] = std::sqrt(h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k]);
    }

    size_t size() const { return m_d.size(); }

    Sym2 apply_B(const OneForm& xi) const { return 2.0 * sym_gradient(m_d, m_h, xi); }

    /// sqrt(g) h^-1 s h^-1 for trace-free s, as contravariant components.
    Sym2 weight(const Sym2& s) const
    {
        const size_t n = size();
        Sym2 t{Grid(n), Grid(n), Grid(n)};
        for (size_t k = 0; k < n; ++k) {
            double a = m_inv.xx[k], b = m_inv.xy[k], c = m_inv.yy[k];
            double sxx = s.xx[k], sxy = s.xy[k], syy = s.yy[k];
            t.xx[k] = m_sg[k] * (a * a * sxx + 2 * a * b * sxy + b * b * syy);
            t.xy[k] = m_sg[k] * (a * b * sxx + (a * c + b * b) * sxy + b * c * syy);
            t.yy[k] = m_sg[k] * (b * b * sxx + 2 * b * c * sxy + c * c * syy);
        }
        return t;
    }

    OneForm apply_Bt(const Sym2& t) const
    {
        const size_t n = size();
        Grid ax = diff_x_transpose(m_d, t.xx), ay = diff_y_transpose(m_d, t.xy);
        Grid bx = diff_x_transpose(m_d, t.xy), by = diff_y_transpose(m_d, t.yy);
        OneForm out{Grid(n), Grid(n)};
        for (size_t k = 0; k < n; ++k) {
            double gx = m_G.g[0][0][0][k] * t.xx[k] + 2 * m_G.g[0][0][1][k] * t.xy[k] + m_G.g[0][1][1][k] * t.yy[k];
            double gy = m_G.g[1][0][0][k] * t.xx[k] + 2 * m_G.g[1][0][1][k] * t.xy[k] + m_G.g[1][1][1][k] * t.yy[k];
            out.x[k] = 2.0 * (ax[k] + ay[k]) - 2.0 * gx;
            out.y[k] = 2.0 * (bx[k] + by[k]) - 2.0 * gy;
        }
        return out;
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& v) const
    {
        const size_t n = size();
        OneForm xi{Grid(v.data(), v.data() + n), Grid(v.data() + n, v.data() + 2 * n)};
        OneForm r = apply_Bt(weight(trace_free(m_h, apply_B(xi))));
        Eigen::VectorXd out(2 * n);
        for (size_t k = 0; k < n; ++k) {
            out[k] = r.x[k];
            out[n + k] = r.y[k];
        }
        return out;
    }

    Eigen::VectorXd diagonal() const
    {
        const size_t n = size();
        Eigen::VectorXd diag(2 * n);
        const double c = 2.0 * 130.0 / 144.0 / (m_d.dx() * m_d.dx());
        for (size_t k = 0; k < n; ++k) {
            double w = m_sg[k] * (m_inv.xx[k] * m_inv.xx[k] + 2 * m_inv.xy[k] * m_inv.xy[k] + m_inv.yy[k] * m_inv.yy[k]);
            diag[k] = diag[n + k] = c * w;
        }
        return diag;
    }

private:
    const GridDomain& m_d;
    const Sym2& m_h;
    Christoffel m_G;
    Sym2 m_inv;
    Grid m_sg;
};

} // namespace

Sym2 tt_project(const GridDomain& d, const Sym2& h, const Sym2& s, double tol)
{
    check_metric(d, h);
    KillingNormalOperator op(d, h);
    Sym2 s0 = trace_free(h, s);
    OneForm rhs = op.apply_Bt(op.weight(s0));
    const size_t n = d.size();
    Eigen::VectorXd b(2 * n), x = Eigen::VectorXd::Zero(2 * n);
    for (size_t k = 0; k < n; ++k) {
        b[k] = rhs.x[k];
        b[n + k] = rhs.y[k];
    }
    // Floor for data whose projection onto the gauge image cancels to round-off.
    Eigen::VectorXd diag = op.diagonal();
    double s0norm = 0.0;
    for (size_t k = 0; k < n; ++k) s0norm += s0.xx[k] * s0.xx[k] + 2 * s0.xy[k] * s0.xy[k] + s0.yy[k] * s0.yy[k];
    double atol = tol * diag.maxCoeff() * d.dx() * std::sqrt(s0norm);
    conjugate_gradient(op, diag, b, x, tol, static_cast<int>(10 * b.size()), atol);
    OneForm xi{Grid(x.data(), x.data() + n), Grid(x.data() + n, x.data() + 2 * n)};
    return s0 - trace_free(h, op.apply_B(xi));
}

} // namespace renvol
