#include "renvol/einstein3d.hpp"

#include "renvol/common.hpp"

#include <algorithm>
#include <cmath>

namespace renvol::einstein3d {

namespace {

// Jets carry every derivative needed by the second-order operators applied
// to first derivatives of the metric (gauge directions).
constexpr int kOrder = 3;

size_t power3(int r)
{
    size_t p = 1;
    for (int i = 0; i < r; ++i) p *= 3;
    return p;
}

int order_of(const Tensor& T) { return T[0].order(); }

Tensor scalar(const Jet& f)
{
    Tensor s(0, f.order());
    s[0] = f;
    return s;
}

} // namespace

Tensor::Tensor(int rank, int order) : m_rank(rank), m_c(power3(rank), Jet(0.0, order))
{
    require(rank >= 0 && rank <= 4, "Tensor: rank must be in [0, 4]");
}

Tensor& Tensor::operator+=(const Tensor& o)
{
    require(m_rank == o.m_rank, "Tensor: rank mismatch");
    for (size_t k = 0; k < m_c.size(); ++k) m_c[k] += o.m_c[k];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& o)
{
    require(m_rank == o.m_rank, "Tensor: rank mismatch");
    for (size_t k = 0; k < m_c.size(); ++k) m_c[k] -= o.m_c[k];
    return *this;
}

Tensor operator*(double s, Tensor a)
{
    for (auto& c : a.m_c) c *= s;
    return a;
}

Tensor operator*(const Jet& f, Tensor a)
{
    for (auto& c : a.m_c) c = f * c;
    return a;
}

Geometry::Geometry(const Tensor& g) : m_g(g)
{
    require(g.rank() == 2, "Geometry: metric must be a rank-2 tensor");
    const int n = order_of(g);
    require(n >= 2, "Geometry: metric jets must have order >= 2");
    // inverse by cofactors
    m_inv = Tensor(2, n);
    Jet det = g.at(0, 0) * (g.at(1, 1) * g.at(2, 2) - g.at(1, 2) * g.at(2, 1)) -
              g.at(0, 1) * (g.at(1, 0) * g.at(2, 2) - g.at(1, 2) * g.at(2, 0)) +
              g.at(0, 2) * (g.at(1, 0) * g.at(2, 1) - g.at(1, 1) * g.at(2, 0));
    require(det.value() > 0.0, "Geometry: metric is not positive definite");
    Jet idet = 1.0 / det;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            m_inv.at(i, j) = (g.at(i1, j1) * g.at(i2, j2) - g.at(i1, j2) * g.at(i2, j1)) * idet;
        }
    Tensor dg(3, n - 1);   // dg(c, a, b) = d_c g_ab
    for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) dg.at(c, a, b) = g.at(a, b).derivative(c);
    m_gamma = Tensor(3, n - 1);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                Jet s(0.0, n - 1);
                for (int d = 0; d < 3; ++d) s += m_inv.at(a, d) * (dg.at(b, d, c) + dg.at(c, d, b) - dg.at(d, b, c));
                m_gamma.at(a, b, c) = 0.5 * s;
            }
    // R^e_{kij} = d_i G^e_jk - d_j G^e_ik + G^e_im G^m_jk - G^e_jm G^m_ik
    Tensor R(4, n - 2);
    for (int e = 0; e < 3; ++e)
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    Jet v = m_gamma.at(e, j, k).derivative(i) - m_gamma.at(e, i, k).derivative(j);
                    for (int m = 0; m < 3; ++m)
                        v += m_gamma.at(e, i, m) * m_gamma.at(m, j, k) - m_gamma.at(e, j, m) * m_gamma.at(m, i, k);
                    R.at(e, k, i, j) = v;
                }
    m_riem = Tensor(4, n - 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int q = 0; q < 3; ++q) {
                    Jet v(0.0, n - 2);
                    for (int e = 0; e < 3; ++e) v += m_g.at(q, e) * R.at(e, k, i, j);
                    m_riem.at(i, j, k, q) = v;
                }
}

Tensor Geometry::ricci() const
{
    Tensor r(2, order_of(m_riem));
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            Jet v(0.0, order_of(m_riem));
            for (int i = 0; i < 3; ++i)
                for (int q = 0; q < 3; ++q) v += m_inv.at(i, q) * m_riem.at(i, j, k, q);
            r.at(j, k) = v;
        }
    return r;
}

Tensor Geometry::nabla(const Tensor& T) const
{
    const int r = T.rank();
    const size_t n = T.size();
    Tensor out(r + 1, order_of(T) - 1);
    for (int a = 0; a < 3; ++a)
        for (size_t I = 0; I < n; ++I) {
            Jet v = T[I].derivative(a);
            size_t place = n;
            for (int p = 0; p < r; ++p) {
                place /= 3;
                int ip = static_cast<int>((I / place) % 3);
                size_t base = I - static_cast<size_t>(ip) * place;
                for (int e = 0; e < 3; ++e) v -= m_gamma.at(e, a, ip) * T[base + static_cast<size_t>(e) * place];
            }
            out[static_cast<size_t>(a) * n + I] = v;
        }
    return out;
}

Jet trace(const Geometry& G, const Tensor& q)
{
    Jet s(0.0, std::min(order_of(q), order_of(G.inverse())));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += G.inverse().at(a, b) * q.at(a, b);
    return s;
}

Tensor divergence(const Geometry& G, const Tensor& q)
{
    Tensor nq = G.nabla(q);
    Tensor out(1, order_of(nq));
    for (int b = 0; b < 3; ++b) {
        Jet s(0.0, order_of(nq));
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) s -= G.inverse().at(a, c) * nq.at(a, c, b);
        out.at(b) = s;
    }
    return out;
}

Tensor sym_gradient(const Geometry& G, const Tensor& xi)
{
    Tensor nx = G.nabla(xi);
    Tensor out(2, order_of(nx));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) out.at(a, b) = 0.5 * (nx.at(a, b) + nx.at(b, a));
    return out;
}

Tensor differential(const Geometry& G, const Jet& f) { return G.nabla(scalar(f)); }

Tensor rough_laplacian(const Geometry& G, const Tensor& T)
{
    Tensor nn = G.nabla(G.nabla(T));
    const size_t n = T.size();
    Tensor out(T.rank(), order_of(nn));
    for (size_t I = 0; I < n; ++I) {
        Jet s(0.0, order_of(nn));
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) s -= G.inverse().at(a, c) * nn[(static_cast<size_t>(a) * 3 + c) * n + I];
        out[I] = s;
    }
    return out;
}

namespace {

Tensor raise_both(const Geometry& G, const Tensor& q)
{
    Tensor up(2, std::min(order_of(q), order_of(G.inverse())));
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            Jet s(0.0, order_of(up));
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) s += G.inverse().at(j, a) * G.inverse().at(k, b) * q.at(a, b);
            up.at(j, k) = s;
        }
    return up;
}

} // namespace

Tensor ring(const Geometry& G, const Tensor& q)
{
    Tensor up = raise_both(G, q);
    const int n = std::min(order_of(up), order_of(G.riemann()));
    Tensor out(2, n);
    for (int i = 0; i < 3; ++i)
        for (int q2 = 0; q2 < 3; ++q2) {
            Jet s(0.0, n);
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) s += up.at(j, k) * G.riemann().at(i, j, k, q2);
            out.at(i, q2) = s;
        }
    return out;
}

Tensor ring_hyperbolic(const Geometry& G, const Tensor& q) { return q - trace(G, q) * G.metric(); }

Tensor einstein_operator(const Geometry& G, const Tensor& q)
{
    Tensor xi = 2.0 * divergence(G, q) + differential(G, trace(G, q));
    return rough_laplacian(G, q) - sym_gradient(G, xi) - 2.0 * ring(G, q);
}

Tensor bianchi(const Geometry& G, const Tensor& q) { return divergence(G, q) + 0.5 * differential(G, trace(G, q)); }

Tensor twisted_laplacian(const Geometry& G, const Tensor& q)
{
    // with N(a, c, b, z) = nabla_a nabla_c q_bz:
    //   d* d q  = -g^ac (N(a, c, b, z) - N(a, b, c, z))
    //   d d* q  = -g^ac N(b, a, c, z)
    Tensor N = G.nabla(G.nabla(q));
    Tensor out(2, order_of(N));
    for (int b = 0; b < 3; ++b)
        for (int z = 0; z < 3; ++z) {
            Jet s(0.0, order_of(N));
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c)
                    s -= G.inverse().at(a, c) * (N.at(a, c, b, z) - N.at(a, b, c, z) + N.at(b, a, c, z));
            out.at(b, z) = s;
        }
    return out;
}

double norm(const Geometry& G, const Tensor& q)
{
    const int r = q.rank();
    const size_t n = q.size();
    std::vector<double> v(n);
    for (size_t I = 0; I < n; ++I) v[I] = q[I].value();
    double gi[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) gi[a][b] = G.inverse().at(a, b).value();
    double s = 0.0;
    for (size_t I = 0; I < n; ++I)
        for (size_t J = 0; J < n; ++J) {
            double w = v[I] * v[J];
            if (w == 0.0) continue;
            size_t a = I, b = J;
            for (int p = 0; p < r; ++p) {
                w *= gi[a % 3][b % 3];
                a /= 3;
                b /= 3;
            }
            s += w;
        }
    return std::sqrt(std::max(s, 0.0));
}

Tensor lower_trace_free(const Geometry& G, const Tensor& q) { return q - (trace(G, q) * (1.0 / 3.0)) * G.metric(); }

namespace {

struct CJet {
    Jet re, im;
};

CJet mul(const CJet& a, const CJet& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }

using M2 = std::array<Jet, 4>;   // row-major 2x2

M2 mat(const std::array<Jet, 3>& s) { return {s[0], s[1], s[1], s[2]}; }
M2 mm(const M2& a, const M2& b)
{
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
M2 tr(const M2& a) { return {a[0], a[2], a[1], a[3]}; }
M2 add(const M2& a, const M2& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
M2 scal(const Jet& s, const M2& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

Tensor spatial(const M2& m, int order)
{
    Tensor g(2, order);
    g.at(1, 1) = m[0];
    g.at(1, 2) = 0.5 * (m[1] + m[2]);
    g.at(2, 1) = g.at(1, 2);
    g.at(2, 2) = m[3];
    return g;
}

} // namespace

SurfaceSym2 poincare_disk()
{
    return [](const Jet& x, const Jet& y) {
        Jet s = 1.0 - x * x - y * y;
        Jet r2 = 4.0 / (s * s);
        return std::array<Jet, 3>{r2, Jet(0.0, x.order()), r2};
    };
}

SurfaceSym2 flat_metric()
{
    return [](const Jet& x, const Jet&) {
        return std::array<Jet, 3>{Jet(1.0, x.order()), Jet(0.0, x.order()), Jet(1.0, x.order())};
    };
}

SurfaceEndo constant_endo(double a00, double a01, double a10, double a11)
{
    return [=](const Jet& x, const Jet&) {
        int n = x.order();
        return std::array<Jet, 4>{Jet(a00, n), Jet(a01, n), Jet(a10, n), Jet(a11, n)};
    };
}

SurfaceEndo zero_endo() { return constant_endo(0, 0, 0, 0); }

SurfaceSym2 holomorphic_tt(const std::vector<std::complex<double>>& coeffs)
{
    return [coeffs](const Jet& x, const Jet& y) {
        int n = x.order();
        CJet z{x, y}, p{Jet(1.0, n), Jet(0.0, n)}, q{Jet(0.0, n), Jet(0.0, n)};
        for (const auto& c : coeffs) {
            q.re += c.real() * p.re - c.imag() * p.im;
            q.im += c.real() * p.im + c.imag() * p.re;
            p = mul(p, z);
        }
        return std::array<Jet, 3>{q.re, -q.im, -q.re};
    };
}

SurfaceEndo raise(const SurfaceSym2& h, const SurfaceSym2& s)
{
    return [h, s](const Jet& x, const Jet& y) {
        auto H = h(x, y);
        auto S = s(x, y);
        Jet idet = 1.0 / (H[0] * H[2] - H[1] * H[1]);
        M2 inv{H[2] * idet, -H[1] * idet, -H[1] * idet, H[0] * idet};
        return mm(inv, mat(S));
    };
}

Field Background::metric() const
{
    return [h = h, A = A](const JetPoint& p) {
        Jet c = cosh(p.t), s = sinh(p.t);
        M2 a = A(p.x, p.y);
        M2 P{c + s * a[0], s * a[1], s * a[2], c + s * a[3]};
        Tensor g = spatial(mm(tr(P), mm(mat(h(p.x, p.y)), P)), p.t.order());
        g.at(0, 0) = Jet(1.0, p.t.order());
        return g;
    };
}

Background geodesic_background(SurfaceSym2 h) { return Background{"geodesic", std::move(h), zero_endo(), Background::Warp::Cosh}; }

Background horospherical_background()
{
    return Background{"horospherical", flat_metric(), constant_endo(1, 0, 0, 1), Background::Warp::Exp};
}

Background flat_torus_background(double lambda)
{
    require(lambda > 0.0, "flat_torus_background: lambda must be positive");
    return Background{"flat torus constant A", flat_metric(), constant_endo(lambda, 0, 0, 1.0 / lambda),
                      lambda == 1.0 ? Background::Warp::Exp : Background::Warp::None};
}

Field funnel_deformation(const Background& bg, const SurfaceSym2& hdot, const SurfaceEndo& adot)
{
    return [h = bg.h, A = bg.A, hdot, adot](const JetPoint& p) {
        Jet c = cosh(p.t), s = sinh(p.t);
        M2 a = A(p.x, p.y), ad = adot(p.x, p.y);
        M2 H = mat(h(p.x, p.y));
        M2 P{c + s * a[0], s * a[1], s * a[2], c + s * a[3]};
        M2 Pd = scal(s, ad);
        M2 v = add(mm(tr(P), mm(mat(hdot(p.x, p.y)), P)), add(mm(tr(Pd), mm(H, P)), mm(tr(P), mm(H, Pd))));
        return spatial(v, p.t.order());
    };
}

Field gauge_direction(const Background& bg, const Field& V)
{
    Field g = bg.metric();
    return [g, V](const JetPoint& p) {
        Geometry G(g(p));
        return 2.0 * sym_gradient(G, V(p));
    };
}

std::vector<Node> default_nodes(bool patch)
{
    std::vector<std::pair<double, double>> xy = patch ? std::vector<std::pair<double, double>>{{0.1, -0.05}, {-0.2, 0.15}, {0.05, 0.25}}
                                                      : std::vector<std::pair<double, double>>{{0.1, 0.3}, {0.7, 0.2}, {0.4, 0.9}};
    std::vector<Node> nodes;
    for (double t : {0.0, 0.5, 1.0, 2.0})
        for (auto [x, y] : xy) nodes.push_back({t, x, y});
    return nodes;
}

namespace {

template <typename F>
double sup_over(const std::vector<Node>& nodes, F&& f)
{
    double r = 0.0;
    for (const auto& n : nodes) r = std::max(r, f(jet_point(n.t, n.x, n.y, kOrder)));
    return r;
}

} // namespace

double hyperbolicity_residual(const Background& bg, const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        return norm(G, G.ricci() + 2.0 * G.metric());
    });
}

double metric_compatibility(const Background& bg, const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        return norm(G, G.nabla(G.metric()));
    });
}

double koszul_residual(const Background& bg, const std::vector<Node>& nodes)
{
    if (bg.warp == Background::Warp::None)
        throw PreconditionError("koszul_residual: the Koszul table applies to warped products only");
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        double t = p.t.value();
        double f = bg.warp == Background::Warp::Cosh ? std::cosh(t) : std::exp(t);
        double fp = bg.warp == Background::Warp::Cosh ? std::sinh(t) : std::exp(t);
        // surface Christoffel symbols of h
        auto H = bg.h(p.x, p.y);
        const Jet* hc[2][2] = {{&H[0], &H[1]}, {&H[1], &H[2]}};
        double det = H[0].value() * H[2].value() - H[1].value() * H[1].value();
        double hi[2][2] = {{H[2].value() / det, -H[1].value() / det}, {-H[1].value() / det, H[0].value() / det}};
        double r = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) {
                    double table = 0.0;
                    if (a == 0 && b > 0 && c > 0) table = -f * fp * hc[b - 1][c - 1]->value();
                    if (a > 0 && b == 0 && c == a) table = fp / f;
                    if (a > 0 && c == 0 && b == a) table = fp / f;
                    if (a > 0 && b > 0 && c > 0) {
                        int k = a - 1, i = b - 1, j = c - 1;
                        double s = 0.0;
                        for (int l = 0; l < 2; ++l)
                            s += hi[k][l] * (hc[j][l]->derivative(1 + i).value() + hc[i][l]->derivative(1 + j).value() -
                                             hc[i][j]->derivative(1 + l).value());
                        table = 0.5 * s;
                    }
                    r = std::max(r, std::abs(G.christoffel().at(a, b, c).value() - table));
                }
        return r;
    });
}

TraceDivergence trace_div_3d(const Background& bg, const Field& q, const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    TraceDivergence td;
    for (const auto& n : nodes) {
        JetPoint p = jet_point(n.t, n.x, n.y, kOrder);
        Geometry G(g(p));
        Tensor Q = q(p);
        td.trace = std::max(td.trace, std::abs(trace(G, Q).value()));
        td.divergence = std::max(td.divergence, norm(G, divergence(G, Q)));
    }
    return td;
}

double linearized_einstein_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes)
{
    double hyp = hyperbolicity_residual(bg, nodes);
    if (hyp > 1e-8)
        throw PreconditionError("linearized_einstein_residual: background is not hyperbolic (|Ric + 2g| = " +
                                std::to_string(hyp) + ")");
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        return norm(G, einstein_operator(G, q(p)));
    });
}

double bianchi_gauge_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        return norm(G, bianchi(G, q(p)));
    });
}

Weitzenbock weitzenbock_residual(const Background& bg, const Field& q0, const std::function<Jet(const JetPoint&)>& a,
                                 const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    Weitzenbock w;
    for (const auto& n : nodes) {
        JetPoint p = jet_point(n.t, n.x, n.y, kOrder);
        Geometry G(g(p));
        Tensor Q = q0(p);
        if (std::abs(trace(G, Q).value()) > 1e-10 * (1.0 + norm(G, Q)))
            throw PreconditionError("weitzenbock_residual: q0 is not trace-free");
        Tensor lhs = rough_laplacian(G, Q);
        Tensor rhs = twisted_laplacian(G, Q) + 3.0 * Q;
        w.r1 = std::max(w.r1, norm(G, lhs - rhs));
        Jet A = a(p);
        Tensor lap = rough_laplacian(G, scalar(A));
        w.r2 = std::max(w.r2, norm(G, rough_laplacian(G, A * G.metric()) - lap[0] * G.metric()));
    }
    return w;
}

double ring_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        Tensor Q = q(p);
        return norm(G, ring(G, Q) - ring_hyperbolic(G, Q));
    });
}

double decomposition_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        Tensor Q = q(p);
        Jet a = trace(G, Q) * (1.0 / 3.0);
        Tensor q0 = Q - a * G.metric();
        Tensor lhs = rough_laplacian(G, Q) - 2.0 * ring(G, Q);
        Tensor lap = rough_laplacian(G, scalar(a));
        Tensor rhs = twisted_laplacian(G, q0) + q0 + (lap[0] + 4.0 * a) * G.metric();
        return norm(G, lhs - rhs);
    });
}

double vector_identity_residual(const Background& bg, const Field& V, const std::vector<Node>& nodes)
{
    Field g = bg.metric();
    return sup_over(nodes, [&](const JetPoint& p) {
        Geometry G(g(p));
        Tensor v = V(p);
        Tensor s = sym_gradient(G, v);
        Tensor lhs = 2.0 * divergence(G, s) + differential(G, trace(G, s));
        return norm(G, lhs - (rough_laplacian(G, v) + 2.0 * v));
    });
}

} // namespace renvol::einstein3d
