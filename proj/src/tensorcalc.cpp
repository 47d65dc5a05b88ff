#include "renvol/tensorcalc.hpp"

#include <algorithm>

namespace renvol {

namespace {

template <typename F>
Grid pointwise(size_t n, F f)
{
    Grid out(n);
    for (size_t k = 0; k < n; ++k) out[k] = f(k);
    return out;
}

Grid add(const Grid& a, const Grid& b) { return pointwise(a.size(), [&](size_t k) { return a[k] + b[k]; }); }
Grid sub(const Grid& a, const Grid& b) { return pointwise(a.size(), [&](size_t k) { return a[k] - b[k]; }); }
Grid mul(double c, const Grid& a) { return pointwise(a.size(), [&](size_t k) { return c * a[k]; }); }

} // namespace

Sym2 sym2_zero(const GridDomain& d) { return {Grid(d.size(), 0.0), Grid(d.size(), 0.0), Grid(d.size(), 0.0)}; }

Sym2 sym2_sample(const GridDomain& d, const std::function<double(double, double)>& xx,
                 const std::function<double(double, double)>& xy, const std::function<double(double, double)>& yy)
{
    return {sample(d, xx), sample(d, xy), sample(d, yy)};
}

Endo endo_zero(const GridDomain& d) { return endo_constant(d, 0, 0, 0, 0); }

Endo endo_constant(const GridDomain& d, double a00, double a01, double a10, double a11)
{
    return {Grid(d.size(), a00), Grid(d.size(), a01), Grid(d.size(), a10), Grid(d.size(), a11)};
}

Sym2 operator+(const Sym2& a, const Sym2& b) { return {add(a.xx, b.xx), add(a.xy, b.xy), add(a.yy, b.yy)}; }
Sym2 operator-(const Sym2& a, const Sym2& b) { return {sub(a.xx, b.xx), sub(a.xy, b.xy), sub(a.yy, b.yy)}; }
Sym2 operator*(double c, const Sym2& a) { return {mul(c, a.xx), mul(c, a.xy), mul(c, a.yy)}; }
Endo operator+(const Endo& a, const Endo& b) { return {add(a.m00, b.m00), add(a.m01, b.m01), add(a.m10, b.m10), add(a.m11, b.m11)}; }
Endo operator-(const Endo& a, const Endo& b) { return {sub(a.m00, b.m00), sub(a.m01, b.m01), sub(a.m10, b.m10), sub(a.m11, b.m11)}; }
Endo operator*(double c, const Endo& a) { return {mul(c, a.m00), mul(c, a.m01), mul(c, a.m10), mul(c, a.m11)}; }
OneForm operator-(const OneForm& a, const OneForm& b) { return {sub(a.x, b.x), sub(a.y, b.y)}; }

Sym2 scale(const Grid& f, const Sym2& s)
{
    const size_t n = f.size();
    return {pointwise(n, [&](size_t k) { return f[k] * s.xx[k]; }), pointwise(n, [&](size_t k) { return f[k] * s.xy[k]; }),
            pointwise(n, [&](size_t k) { return f[k] * s.yy[k]; })};
}

Grid metric_det(const Sym2& h)
{
    return pointwise(h.xx.size(), [&](size_t k) { return h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k]; });
}

void check_metric(const GridDomain& d, const Sym2& h)
{
    if (h.xx.size() != d.size() || h.xy.size() != d.size() || h.yy.size() != d.size())
        throw PreconditionError("metric is not sampled on this grid");
    for (size_t k = 0; k < d.size(); ++k) {
        double det = h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k];
        if (!(det > 1e-10) || !(h.xx[k] > 0.0)) throw PreconditionError("metric is not positive definite");
    }
}

Sym2 metric_inverse(const Sym2& h)
{
    const size_t n = h.xx.size();
    Sym2 inv{Grid(n), Grid(n), Grid(n)};
    for (size_t k = 0; k < n; ++k) {
        double det = h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k];
        inv.xx[k] = h.yy[k] / det;
        inv.xy[k] = -h.xy[k] / det;
        inv.yy[k] = h.xx[k] / det;
    }
    return inv;
}

namespace {

// Component access by index pair.
inline const Grid& comp(const Sym2& s, int i, int j)
{
    if (i != j) return s.xy;
    return i == 0 ? s.xx : s.yy;
}

Grid diff(const GridDomain& d, const Grid& f, int axis) { return axis == 0 ? diff_x(d, f) : diff_y(d, f); }

} // namespace

Christoffel christoffel(const GridDomain& d, const Sym2& h)
{
    check_metric(d, h);
    const size_t n = d.size();
    Grid dh[2][3];   // dh[axis][component xx, xy, yy]
    for (int a = 0; a < 2; ++a) {
        dh[a][0] = diff(d, h.xx, a);
        dh[a][1] = diff(d, h.xy, a);
        dh[a][2] = diff(d, h.yy, a);
    }
    auto didx = [](int i, int j) { return i == j ? (i == 0 ? 0 : 2) : 1; };
    Sym2 inv = metric_inverse(h);
    Christoffel G;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Grid& out = G.g[k][i][j];
                out.assign(n, 0.0);
                for (int l = 0; l < 2; ++l) {
                    const Grid& hinv = comp(inv, k, l);
                    const Grid& a = dh[i][didx(l, j)];
                    const Grid& b = dh[j][didx(l, i)];
                    const Grid& c = dh[l][didx(i, j)];
                    for (size_t p = 0; p < n; ++p) out[p] += 0.5 * hinv[p] * (a[p] + b[p] - c[p]);
                }
            }
    return G;
}

Grid gauss_curvature(const GridDomain& d, const Sym2& h)
{
    Christoffel G = christoffel(d, h);
    const size_t n = d.size();
    // R^a_{212} = d_1 G^a_22 - d_2 G^a_12 + G^a_1e G^e_22 - G^a_2e G^e_12
    Grid R[2];
    for (int a = 0; a < 2; ++a) {
        Grid d1 = diff_x(d, G.g[a][1][1]);
        Grid d2 = diff_y(d, G.g[a][0][1]);
        R[a].resize(n);
        for (size_t p = 0; p < n; ++p) {
            double v = d1[p] - d2[p];
            for (int e = 0; e < 2; ++e) v += G.g[a][0][e][p] * G.g[e][1][1][p] - G.g[a][1][e][p] * G.g[e][0][1][p];
            R[a][p] = v;
        }
    }
    return pointwise(n, [&](size_t p) {
        double det = h.xx[p] * h.yy[p] - h.xy[p] * h.xy[p];
        return (h.xx[p] * R[0][p] + h.xy[p] * R[1][p]) / det;
    });
}

OneForm differential(const GridDomain& d, const Grid& f) { return {diff_x(d, f), diff_y(d, f)}; }

Grid codifferential(const GridDomain& d, const Sym2& h, const OneForm& xi)
{
    const size_t n = d.size();
    Sym2 inv = metric_inverse(h);
    Grid sg = pointwise(n, [&](size_t k) { return std::sqrt(h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k]); });
    Grid fx = pointwise(n, [&](size_t k) { return sg[k] * (inv.xx[k] * xi.x[k] + inv.xy[k] * xi.y[k]); });
    Grid fy = pointwise(n, [&](size_t k) { return sg[k] * (inv.xy[k] * xi.x[k] + inv.yy[k] * xi.y[k]); });
    Grid a = diff_x(d, fx), b = diff_y(d, fy);
    return pointwise(n, [&](size_t k) { return -(a[k] + b[k]) / sg[k]; });
}

Grid laplacian(const GridDomain& d, const Sym2& h, const Grid& f) { return codifferential(d, h, differential(d, f)); }

OneForm divergence(const GridDomain& d, const Sym2& h, const Sym2& s)
{
    const size_t n = d.size();
    Sym2 inv = metric_inverse(h);
    Christoffel G = christoffel(d, h);
    Grid sg = pointwise(n, [&](size_t k) { return std::sqrt(h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k]); });
    // densitized contravariant tensor t^{ij} = sqrt(g) h^ia h^jb s_ab
    Grid t[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
            t[i][j].resize(n);
            for (size_t k = 0; k < n; ++k) {
                double v = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) v += comp(inv, i, a)[k] * comp(inv, j, b)[k] * comp(s, a, b)[k];
                t[i][j][k] = sg[k] * v;
            }
        }
    t[1][0] = t[0][1];
    Grid w[2];   // w^l = d_i t^il + G^l_ij t^ij
    for (int l = 0; l < 2; ++l) {
        Grid a = diff_x(d, t[0][l]), b = diff_y(d, t[1][l]);
        w[l].resize(n);
        for (size_t k = 0; k < n; ++k) {
            double v = a[k] + b[k];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) v += G.g[l][i][j][k] * t[i][j][k];
            w[l][k] = v;
        }
    }
    OneForm out{Grid(n), Grid(n)};
    for (size_t k = 0; k < n; ++k) {
        out.x[k] = -(h.xx[k] * w[0][k] + h.xy[k] * w[1][k]) / sg[k];
        out.y[k] = -(h.xy[k] * w[0][k] + h.yy[k] * w[1][k]) / sg[k];
    }
    return out;
}

Sym2 sym_gradient(const GridDomain& d, const Sym2& h, const OneForm& xi)
{
    const size_t n = d.size();
    Christoffel G = christoffel(d, h);
    Grid xx = diff_x(d, xi.x), xy = diff_y(d, xi.x), yx = diff_x(d, xi.y), yy = diff_y(d, xi.y);
    Sym2 out{Grid(n), Grid(n), Grid(n)};
    for (size_t k = 0; k < n; ++k) {
        out.xx[k] = xx[k] - G.g[0][0][0][k] * xi.x[k] - G.g[1][0][0][k] * xi.y[k];
        out.xy[k] = 0.5 * (xy[k] + yx[k]) - G.g[0][0][1][k] * xi.x[k] - G.g[1][0][1][k] * xi.y[k];
        out.yy[k] = yy[k] - G.g[0][1][1][k] * xi.x[k] - G.g[1][1][1][k] * xi.y[k];
    }
    return out;
}

Sym2 lie_derivative(const GridDomain& d, const Sym2& h, const Grid& vx, const Grid& vy)
{
    const size_t n = d.size();
    OneForm flat{pointwise(n, [&](size_t k) { return h.xx[k] * vx[k] + h.xy[k] * vy[k]; }),
                 pointwise(n, [&](size_t k) { return h.xy[k] * vx[k] + h.yy[k] * vy[k]; })};
    return 2.0 * sym_gradient(d, h, flat);
}

Grid trace(const Sym2& h, const Sym2& s)
{
    return pointwise(h.xx.size(), [&](size_t k) {
        double det = h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k];
        return (h.yy[k] * s.xx[k] - 2.0 * h.xy[k] * s.xy[k] + h.xx[k] * s.yy[k]) / det;
    });
}

Grid trace(const Endo& a) { return pointwise(a.m00.size(), [&](size_t k) { return a.m00[k] + a.m11[k]; }); }

Grid det(const Endo& a)
{
    return pointwise(a.m00.size(), [&](size_t k) { return a.m00[k] * a.m11[k] - a.m01[k] * a.m10[k]; });
}

Sym2 trace_free(const Sym2& h, const Sym2& s)
{
    Grid tr = trace(h, s);
    return s - scale(pointwise(tr.size(), [&](size_t k) { return 0.5 * tr[k]; }), h);
}

Sym2 lower(const Sym2& h, const Endo& a)
{
    const size_t n = h.xx.size();
    Sym2 out{Grid(n), Grid(n), Grid(n)};
    for (size_t k = 0; k < n; ++k) {
        out.xx[k] = h.xx[k] * a.m00[k] + h.xy[k] * a.m10[k];
        out.xy[k] = 0.5 * (h.xx[k] * a.m01[k] + h.xy[k] * a.m11[k] + h.xy[k] * a.m00[k] + h.yy[k] * a.m10[k]);
        out.yy[k] = h.xy[k] * a.m01[k] + h.yy[k] * a.m11[k];
    }
    return out;
}

Endo raise(const Sym2& h, const Sym2& s)
{
    const size_t n = h.xx.size();
    Sym2 inv = metric_inverse(h);
    Endo out{Grid(n), Grid(n), Grid(n), Grid(n)};
    for (size_t k = 0; k < n; ++k) {
        out.m00[k] = inv.xx[k] * s.xx[k] + inv.xy[k] * s.xy[k];
        out.m01[k] = inv.xx[k] * s.xy[k] + inv.xy[k] * s.yy[k];
        out.m10[k] = inv.xy[k] * s.xx[k] + inv.yy[k] * s.xy[k];
        out.m11[k] = inv.xy[k] * s.xy[k] + inv.yy[k] * s.yy[k];
    }
    return out;
}

Endo compose(const Endo& a, const Endo& b)
{
    const size_t n = a.m00.size();
    Endo out{Grid(n), Grid(n), Grid(n), Grid(n)};
    for (size_t k = 0; k < n; ++k) {
        out.m00[k] = a.m00[k] * b.m00[k] + a.m01[k] * b.m10[k];
        out.m01[k] = a.m00[k] * b.m01[k] + a.m01[k] * b.m11[k];
        out.m10[k] = a.m10[k] * b.m00[k] + a.m11[k] * b.m10[k];
        out.m11[k] = a.m10[k] * b.m01[k] + a.m11[k] * b.m11[k];
    }
    return out;
}

Grid norm(const Sym2& h, const Sym2& s)
{
    Endo r = raise(h, s);
    return pointwise(h.xx.size(), [&](size_t k) {
        double v = r.m00[k] * r.m00[k] + 2.0 * r.m01[k] * r.m10[k] + r.m11[k] * r.m11[k];
        return std::sqrt(std::max(0.0, v));
    });
}

Grid norm(const Sym2& h, const OneForm& xi)
{
    Sym2 inv = metric_inverse(h);
    return pointwise(h.xx.size(), [&](size_t k) {
        double v = inv.xx[k] * xi.x[k] * xi.x[k] + 2.0 * inv.xy[k] * xi.x[k] * xi.y[k] + inv.yy[k] * xi.y[k] * xi.y[k];
        return std::sqrt(std::max(0.0, v));
    });
}

Grid norm(const Endo& a)
{
    return pointwise(a.m00.size(), [&](size_t k) {
        double v = a.m00[k] * a.m00[k] + 2.0 * a.m01[k] * a.m10[k] + a.m11[k] * a.m11[k];
        return std::sqrt(std::max(0.0, v));
    });
}

OneForm codazzi_residual(const GridDomain& d, const Sym2& h, const Endo& a)
{
    OneForm div = divergence(d, h, lower(h, a));
    OneForm dtr = differential(d, trace(a));
    return {add(div.x, dtr.x), add(div.y, dtr.y)};
}

Grid curvature_variation_lhs(const GridDomain& d, const Sym2& h, const Sym2& hdot)
{
    Grid kappa = gauss_curvature(d, h);
    for (size_t k : d.evaluation_set())
        if (std::abs(kappa[k] + 1.0) > 1e-6) throw PreconditionError("curvature_variation_lhs: metric is not hyperbolic");
    Grid tr = trace(h, hdot);
    Grid lap = laplacian(d, h, tr);
    Grid dd = codifferential(d, h, divergence(d, h, hdot));
    return pointwise(tr.size(), [&](size_t k) { return 0.5 * (lap[k] + tr[k] + dd[k]); });
}

double integrate(const GridDomain& d, const Sym2& h, const Grid& f)
{
    if (d.mode() != DomainMode::Torus) throw UnsupportedDomainError("integrate: PATCH domains have no closed-surface integral");
    Grid w = pointwise(d.size(), [&](size_t k) {
        return f[k] * std::sqrt(h.xx[k] * h.yy[k] - h.xy[k] * h.xy[k]);
    });
    return pairwise_sum(w) * d.dx() * d.dy();
}

} // namespace renvol
