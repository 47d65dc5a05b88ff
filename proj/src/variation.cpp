#include "renvol/variation.hpp"

#include "renvol/parallel.hpp"
#include "renvol/uniformize.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace renvol {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

Grid flatten(const Sym2& s)
{
    Grid v = s.xx;
    v.insert(v.end(), s.xy.begin(), s.xy.end());
    v.insert(v.end(), s.yy.begin(), s.yy.end());
    return v;
}

Sym2 unflatten_sym2(const Grid& v)
{
    size_t n = v.size() / 3;
    return {Grid(v.begin(), v.begin() + n), Grid(v.begin() + n, v.begin() + 2 * n), Grid(v.begin() + 2 * n, v.end())};
}

Grid flatten(const Endo& a)
{
    Grid v = a.m00;
    for (const Grid* g : {&a.m01, &a.m10, &a.m11}) v.insert(v.end(), g->begin(), g->end());
    return v;
}

Endo unflatten_endo(const Grid& v)
{
    size_t n = v.size() / 4;
    auto part = [&](size_t k) { return Grid(v.begin() + k * n, v.begin() + (k + 1) * n); };
    return {part(0), part(1), part(2), part(3)};
}

double sup_on(const Grid& f, const std::vector<size_t>& set) { return sup_norm(f, set); }

double sup_all(const std::vector<double>& f)
{
    double m = 0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

// A check on a finite-difference quantity passes within max(tol, 3 x FD error).
CheckResult fd_check(std::string name, double lhs, double rhs, double tol, double fd_error, std::string note = {})
{
    return make_check(std::move(name), lhs, rhs, std::max(tol, 3.0 * fd_error), std::move(note));
}

CheckResult skipped(std::string name, std::string note)
{
    CheckResult c;
    c.name = std::move(name);
    c.skipped = true;
    c.note = std::move(note);
    return c;
}


void warn_unreliable(Report& r, const std::string& what, bool reliable)
{
    if (!reliable) r.warnings.push_back(what + ": finite differences do not improve under step halving");
}

// Evaluates the memoized family at every stencil node, in parallel over nodes.
template <typename T, typename Eval>
void prefetch(std::map<double, T>& cache, const std::vector<double>& nodes, Eval&& eval)
{
    std::vector<double> todo;
    for (double s : nodes)
        if (!cache.count(s)) todo.push_back(s);
    std::vector<std::optional<T>> out(todo.size());
    parallel_for(
        todo.size(),
        [&](size_t b, size_t e) {
            for (size_t k = b; k < e; ++k) out[k] = eval(todo[k]);
        },
        1);
    for (size_t k = 0; k < todo.size(); ++k) cache.emplace(todo[k], std::move(*out[k]));
}

// matrices of h and (1 + A) at node k
struct M2 {
    double a, b, c, d;   // [[a, b], [c, d]]
};
M2 mat(const Sym2& s, size_t k) { return {s.xx[k], s.xy[k], s.xy[k], s.yy[k]}; }
M2 mat(const Endo& e, size_t k) { return {e.m00[k], e.m01[k], e.m10[k], e.m11[k]}; }
M2 mul(const M2& x, const M2& y)
{
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
M2 tr(const M2& x) { return {x.a, x.c, x.b, x.d}; }
M2 add(const M2& x, const M2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
M2 inv(const M2& x)
{
    double det = x.a * x.d - x.b * x.c;
    return {x.d / det, -x.b / det, -x.c / det, x.a / det};
}

Grid curvature_at_infinity_grid(const GridDomain& d, const FunnelData& fd) { return gauss_curvature(d, metric_at_infinity(fd)); }

} // namespace

std::vector<double> Stencil::nodes() const
{
    return {-2 * step, -step, -step / 2, 0.0, step / 2, step, 2 * step};
}

FieldDerivative s_derivative(const std::function<std::vector<double>(double)>& f, int order, const Stencil& st)
{
    require(order == 1 || order == 2, "s_derivative: order must be 1 or 2");
    const double h = st.step;
    std::map<double, std::vector<double>> v;
    for (double s : st.nodes()) v[s] = f(s);
    const size_t n = v[0.0].size();
    for (const auto& [s, x] : v) require(x.size() == n, "s_derivative: extractor changed size across the stencil");

    auto five = [&](double k, size_t i) {
        double m2 = v[-2 * k][i], m1 = v[-k][i], z = v[0.0][i], p1 = v[k][i], p2 = v[2 * k][i];
        // grouped so that equal values give exactly zero
        if (order == 1) return ((m2 - p2) + 8 * (p1 - m1)) / (12 * k);
        return (16 * ((m1 - z) + (p1 - z)) - ((m2 - z) + (p2 - z))) / (12 * k * k);
    };
    auto three = [&](double k, size_t i) {
        double z = v[0.0][i];
        if (order == 1) return (v[k][i] - v[-k][i]) / (2 * k);
        return ((v[k][i] - z) + (v[-k][i] - z)) / (k * k);
    };
    FieldDerivative r;
    r.value.resize(n);
    double e_coarse = 0, e_fine = 0, scale = 0, spread3 = 0, spread5 = 0;
    for (size_t i = 0; i < n; ++i) {
        double dh = five(h, i), dh2 = five(h / 2, i);
        double R = (16 * dh2 - dh) / 15;
        r.value[i] = R;
        r.error = std::max(r.error, std::abs(R - dh2));
        e_coarse = std::max(e_coarse, std::abs(three(h, i) - R));
        e_fine = std::max(e_fine, std::abs(three(h / 2, i) - R));
        spread3 = std::max(spread3, std::abs(three(h, i) - three(h / 2, i)));
        spread5 = std::max(spread5, std::abs(dh - dh2));
        scale = std::max(scale, std::abs(R));
    }
    // smooth extractors: the second-order differences shrink by about 4 under
    // halving and the fourth-order pair agrees better than the second-order pair
    double ratio = e_coarse / std::max(e_fine, 1e-300);
    r.reliable = e_coarse <= 1e-9 * (1 + scale) || (ratio >= 2.5 && ratio <= 6.0 && spread5 <= spread3);
    return r;
}

Derivative s_derivative(const std::function<double(double)>& f, int order, const Stencil& st)
{
    auto r = s_derivative([&](double s) { return std::vector<double>{f(s)}; }, order, st);
    return {r.value[0], r.error, r.reliable};
}

const FunnelData& DeformationFamily::at(double s) const
{
    auto it = cache->find(s);
    if (it == cache->end()) it = cache->emplace(s, evaluate(s)).first;
    return it->second;
}

DeformationFamily constant_family(const FunnelData& fd)
{
    DeformationFamily f;
    f.name = "constant";
    f.domain = fd.domain;
    f.evaluate = [fd](double) { return fd; };
    f.hdot = sym2_zero(fd.domain);
    f.adot = endo_zero(fd.domain);
    f.minimal = sup_norm(trace(fd.A), fd.domain.evaluation_set()) <= 1e-14;
    f.constrained = validate(fd, 1e-6).pass;
    return f;
}

DeformationFamily flat_torus_family(const GridDomain& d, std::function<double(double)> lambda, double dlambda0, std::string name)
{
    require(d.mode() == DomainMode::Torus, "flat_torus_family: TORUS domain required");
    double l0 = lambda(0.0);
    require(l0 > 0.0, "flat_torus_family: lambda(0) must be positive");
    DeformationFamily f;
    f.name = std::move(name);
    f.domain = d;
    f.evaluate = [d, lambda](double s) {
        double l = lambda(s);
        return flat_torus_constA(d, l, 0.0, 1.0 / l);
    };
    f.hdot = sym2_zero(d);
    f.adot = endo_constant(d, dlambda0, 0.0, 0.0, -dlambda0 / (l0 * l0));
    f.minimal = false;
    f.constrained = true;
    return f;
}

DeformationFamily horospherical_scaling(const GridDomain& d)
{
    require(d.mode() == DomainMode::Torus, "horospherical_scaling: TORUS domain required");
    DeformationFamily f;
    f.name = "horospherical scaling";
    f.domain = d;
    f.evaluate = [d](double s) {
        FunnelData fd = horospherical(d);
        fd.h = (1.0 + s) * fd.h;
        return fd;
    };
    f.hdot = horospherical(d).h;
    f.adot = endo_zero(d);
    f.minimal = false;
    f.constrained = true;
    return f;
}

DeformationFamily linear_family(const FunnelData& base, const Sym2& hdot, const Endo& adot, std::string name)
{
    DeformationFamily f;
    f.name = std::move(name);
    f.domain = base.domain;
    f.evaluate = [base, hdot, adot](double s) {
        FunnelData fd = base;
        fd.h = fd.h + s * hdot;
        fd.A = fd.A + s * adot;
        return fd;
    };
    f.hdot = hdot;
    f.adot = adot;
    const auto& ev = base.domain.evaluation_set();
    f.minimal = sup_on(trace(base.A), ev) <= 1e-14 && sup_on(trace(adot), ev) <= 1e-14;
    f.constrained = false;
    return f;
}

DeformationFamily uhlenbeck_family(const GridDomain& d, const Sym2& h0, const std::vector<cplx>& q)
{
    DeformationFamily f;
    f.name = "uhlenbeck patch";
    f.kind = DeformationFamily::Kind::Sampled;
    f.domain = d;
    f.evaluate = [d, h0, q](double s) { return uhlenbeck_construct(d, h0, q, s).fd; };
    f.minimal = true;
    f.constrained = true;
    return f;
}

const BolzaFunnel& BolzaFamily::at(double s) const
{
    auto it = cache->find(s);
    if (it == cache->end()) it = cache->emplace(s, uhlenbeck_construct(mesh, q, s, newton)).first;
    return it->second;
}

BolzaFamily bolza_family(std::shared_ptr<const BolzaMesh> mesh, std::vector<cplx> q, std::string name)
{
    require(mesh != nullptr, "bolza_family: mesh required");
    require(q.size() == mesh->num_chart_vertices(), "bolza_family: one value of q per chart vertex expected");
    BolzaFamily f;
    f.name = std::move(name);
    f.mesh = std::move(mesh);
    f.q = std::move(q);
    return f;
}

namespace {

void prefetch(const DeformationFamily& fam)
{
    prefetch(*fam.cache, fam.stencil.nodes(), [&](double s) { return fam.evaluate(s); });
}

void prefetch(const BolzaFamily& fam, const std::vector<double>& nodes)
{
    prefetch(*fam.cache, nodes, [&](double s) { return uhlenbeck_construct(fam.mesh, fam.q, s, fam.newton); });
}

struct FirstOrder {
    Sym2 hdot;
    Endo adot;
    double herr = 0, aerr = 0;
};

FirstOrder first_order(const DeformationFamily& fam, Report& rep)
{
    FirstOrder fo;
    if (fam.hdot) {
        fo.hdot = *fam.hdot;
    } else {
        auto r = s_derivative([&](double s) { return flatten(fam.at(s).h); }, 1, fam.stencil);
        warn_unreliable(rep, fam.name + " hdot", r.reliable);
        fo.hdot = unflatten_sym2(r.value);
        fo.herr = r.error;
    }
    if (fam.adot) {
        fo.adot = *fam.adot;
    } else {
        auto r = s_derivative([&](double s) { return flatten(fam.at(s).A); }, 1, fam.stencil);
        warn_unreliable(rep, fam.name + " adot", r.reliable);
        fo.adot = unflatten_endo(r.value);
        fo.aerr = r.error;
    }
    return fo;
}

} // namespace

Report first_variation_checks(const DeformationFamily& fam)
{
    Report rep;
    prefetch(fam);
    const GridDomain& d = fam.domain;
    const auto& ev = d.evaluation_set();
    const FunnelData& f0 = fam.at(0.0);
    const double tol = fam.kind == DeformationFamily::Kind::Exact ? 1e-8 : 1e-5;
    FirstOrder fo = first_order(fam, rep);
    const std::string p = fam.name + ": ";

    if (fam.minimal) {
        rep.add(fd_check(p + "trace of hdot", sup_on(trace(f0.h, fo.hdot), ev), 0.0, tol, fo.herr));
        rep.add(fd_check(p + "divergence of hdot", sup_on(norm(f0.h, divergence(d, f0.h, fo.hdot)), ev), 0.0, tol, fo.herr));
        rep.add(fd_check(p + "trace of adot", sup_on(trace(fo.adot), ev), 0.0, tol, fo.aerr));
        rep.add(fd_check(p + "divergence of adot", sup_on(norm(f0.h, divergence(d, f0.h, lower(f0.h, fo.adot))), ev), 0.0, tol,
                         fo.aerr));
        auto kd = s_derivative([&](double s) { return gauss_curvature(d, fam.at(s).h); }, 1, fam.stencil);
        warn_unreliable(rep, p + "kappa-dot", kd.reliable);
        rep.add(fd_check(p + "kappa-dot vanishes", sup_on(kd.value, ev), 0.0, tol, kd.error));
    } else {
        for (const char* n : {"trace of hdot", "divergence of hdot", "trace of adot", "divergence of adot", "kappa-dot vanishes"})
            rep.add(skipped(p + n, "family is not in minimal gauge"));
    }

    // d/ds h((1 + A)^2) / 4 = ((1 + A)^T hdot (1 + A) + adot^T h (1 + A) + (1 + A)^T h adot) / 4
    auto hinf = s_derivative([&](double s) { return flatten(metric_at_infinity(fam.at(s))); }, 1, fam.stencil);
    warn_unreliable(rep, p + "hdot_inf", hinf.reliable);
    Sym2 lhs = unflatten_sym2(hinf.value);
    double res = 0, res_geod = 0, a0 = 0;
    for (size_t k : ev) {
        M2 H = mat(f0.h, k), Hd = mat(fo.hdot, k), Ad = mat(fo.adot, k);
        M2 P = add(mat(f0.A, k), {1, 0, 0, 1});
        M2 r = add(mul(tr(P), mul(Hd, P)), add(mul(tr(Ad), mul(H, P)), mul(tr(P), mul(H, Ad))));
        double rx = r.a / 4, ry = (r.b + r.c) / 8, rz = r.d / 4;
        res = std::max({res, std::abs(lhs.xx[k] - rx), std::abs(lhs.xy[k] - ry), std::abs(lhs.yy[k] - rz)});
        // geodesic form (hdot + 2 h(adot)) / 4
        M2 HA = mul(H, Ad);
        double gx = (Hd.a + 2 * HA.a) / 4, gy = (Hd.b + HA.b + HA.c) / 4, gz = (Hd.d + 2 * HA.d) / 4;
        res_geod = std::max({res_geod, std::abs(lhs.xx[k] - gx), std::abs(lhs.xy[k] - gy), std::abs(lhs.yy[k] - gz)});
        a0 = std::max({a0, std::abs(f0.A.m00[k]), std::abs(f0.A.m01[k]), std::abs(f0.A.m10[k]), std::abs(f0.A.m11[k])});
    }
    double err = hinf.error + fo.herr * 4 + fo.aerr * 4;
    rep.add(fd_check(p + "first variation of h_inf", res, 0.0, tol, err));
    if (a0 == 0.0)
        rep.add(fd_check(p + "first variation of h_inf at a geodesic base", res_geod, 0.0, tol, err));
    else
        rep.add(skipped(p + "first variation of h_inf at a geodesic base", "A(0) != 0"));
    return rep;
}

Report second_variation_checks(const DeformationFamily& fam)
{
    Report rep;
    prefetch(fam);
    const GridDomain& d = fam.domain;
    const auto& ev = d.evaluation_set();
    const std::string p = fam.name + ": ";
    if (!fam.minimal || !fam.constrained) {
        for (const char* n : {"Tr(A^2) = -2 kappa - 2", "kappa_inf = 4 - 8/(2 + kappa)", "second derivative of kappa_inf"})
            rep.add(skipped(p + n, "family is not minimal with constraints enforced"));
        return rep;
    }
    double r1 = 0, r2 = 0;
    bool drift = false;
    for (double s : fam.stencil.nodes()) {
        const FunnelData& fd = fam.at(s);
        Grid k = gauss_curvature(d, fd.h);
        Grid t2 = trace(compose(fd.A, fd.A));
        Grid ki = curvature_at_infinity_grid(d, fd);
        for (size_t n : ev) {
            r1 = std::max(r1, std::abs(t2[n] + 2 * k[n] + 2));
            r2 = std::max(r2, std::abs(ki[n] - (4 - 8 / (2 + k[n]))));
        }
        auto v = validate(fd, 1e-5);
        if (!v.pass) {
            drift = true;
            rep.warnings.push_back(p + "constraint drift " + fmt(std::max(v.gauss_norm, v.codazzi_norm)) + " at s = " + fmt(s));
        }
    }
    std::string note = drift ? "constraint drift above 1e-5 at an outer node" : "";
    rep.add(make_residual_check(p + "Tr(A^2) = -2 kappa - 2", r1, 1e-5, note));
    rep.add(make_residual_check(p + "kappa_inf = 4 - 8/(2 + kappa)", r2, 1e-5, note));

    FirstOrder fo = first_order(fam, rep);
    auto kdd = s_derivative([&](double s) { return curvature_at_infinity_grid(d, fam.at(s)); }, 2, fam.stencil);
    warn_unreliable(rep, p + "kappa_inf second derivative", kdd.reliable);
    Grid t2 = trace(compose(fo.adot, fo.adot));
    double amax = sup_on(t2, ev), res = 0;
    for (size_t n : ev) res = std::max(res, std::abs(kdd.value[n] + 8 * t2[n]));
    double err = kdd.error + 16 * std::sqrt(amax) * fo.aerr;
    rep.add(fd_check(p + "second derivative of kappa_inf = -8 Tr(Adot^2)", res, 0.0, std::max(1e-4 * amax, 1e-12), err, note));
    rep.add(skipped(p + "quadratic renormalized volume correction", "needs a closed surface for the uniformization"));
    return rep;
}

Report second_variation_checks(const BolzaFamily& fam, const std::vector<double>& s_sweep)
{
    Report rep;
    std::vector<double> nodes = fam.stencil.nodes();
    nodes.insert(nodes.end(), s_sweep.begin(), s_sweep.end());
    prefetch(fam, nodes);
    const std::string p = fam.name + ": ";
    const BolzaMesh& mesh = *fam.mesh;
    const size_t n = mesh.num_dofs();

    double r1 = 0;
    for (double s : fam.stencil.nodes()) {
        const BolzaFunnel& f = fam.at(s);
        auto k = f.curvature();
        auto det = f.weingarten_det();
        // trace-free A: Tr(A^2) = -2 det A
        for (size_t i = 0; i < n; ++i) r1 = std::max(r1, std::abs(-2 * det[i] + 2 * k[i] + 2));
    }
    rep.add(make_residual_check(p + "Tr(A^2) = -2 kappa - 2", r1, 1e-5));
    rep.add(skipped(p + "kappa_inf = 4 - 8/(2 + kappa)", "kappa_inf is computed from this identity on the Bolza surface"));

    // Adot = h_P^-1 Re(q dz^2): Tr(Adot^2) = 2 |q|^2_P
    auto qn = quadratic_norm2(mesh, fam.q);
    auto kdd = s_derivative([&](double s) { return curvature_at_infinity(fam.at(s)); }, 2, fam.stencil);
    warn_unreliable(rep, p + "kappa_inf second derivative", kdd.reliable);
    double amax = 2 * sup_all(qn), res = 0;
    for (size_t i = 0; i < n; ++i) res = std::max(res, std::abs(kdd.value[i] + 16 * qn[i]));
    rep.add(fd_check(p + "second derivative of kappa_inf = -8 Tr(Adot^2)", res, 0.0, 1e-4 * amax, kdd.error));

    // quadratic correction of the renormalized volume, Polyakov route against -(1/8) int kappa-ddot
    BolzaFem base = assemble(metric_at_infinity(fam.at(0.0)));
    std::vector<double> kappa_dd(n);
    for (size_t i = 0; i < n; ++i) kappa_dd[i] = -16 * qn[i];
    const double ref = -integrate(base, kappa_dd) / 8;
    std::vector<double> dev, ratio;
    for (double s : s_sweep) {
        const BolzaFunnel& f = fam.at(s);
        BolzaFem fem = assemble(metric_at_infinity(f));
        auto kinf = curvature_at_infinity(f);
        auto sol = liouville_solve(fem, kinf);
        double P = polyakov_difference(fem, kinf, sol.omega);
        rep.add(make_check(p + "renormalized volume correction / s^2 at s = " + fmt(s), P / (s * s), ref, 0.02 * std::abs(ref)));
        rep.add(make_lower_bound_check(p + "renormalized volume correction sign at s = " + fmt(s), P, -1e-9));
        dev.push_back(std::abs(P - s * s * ref));
        ratio.push_back(P / (s * s));
    }
    if (s_sweep.size() >= 2) {
        double order = fitted_order(s_sweep, dev);
        CheckResult c = make_lower_bound_check(p + "renormalized volume correction deviation is O(s^3)", order, 3.0);
        c.order = order;
        rep.add(c);
        rep.sweeps.push_back({p + "volume correction", "s", "P / s^2", s_sweep, ratio});
    }
    rep.values.push_back({p + "-(1/8) int kappa-ddot", ref});
    return rep;
}

Report schlafli_check(const DeformationFamily& fam, double T)
{
    require(fam.domain.mode() == DomainMode::Torus, "schlafli_check: TORUS family required");
    require(fam.kind == DeformationFamily::Kind::Exact && fam.hdot && fam.adot, "schlafli_check: exact family required");
    require(T > 0.0, "schlafli_check: T must be positive");
    Report rep;
    prefetch(fam);
    const GridDomain& d = fam.domain;
    const FunnelData& f0 = fam.at(0.0);
    auto dv = s_derivative([&](double s) { return segment_volume(fam.at(s), T); }, 1, fam.stencil);
    warn_unreliable(rep, fam.name + " slab volume", dv.reliable);
    auto F = [&](double t) {
        Sym2 ht = evolved_metric(f0, t);
        Endo At = evolved_weingarten(f0, t);
        auto der = evolve_derivative(f0, *fam.hdot, *fam.adot, t);
        Grid tA = trace(der.A), mixed = trace(compose(raise(ht, der.h), At));
        Grid g(tA.size());
        for (size_t k = 0; k < g.size(); ++k) g[k] = tA[k] + 0.5 * mixed[k];
        return 0.5 * integrate(d, ht, g);
    };
    double rhs = F(T) - F(0.0);
    rep.add(fd_check(fam.name + ": Schlafli formula at T = " + fmt(T), dv.value, rhs, 1e-8, dv.error));
    return rep;
}

namespace {

// |a|^2_h = tr(a^T h a h^-1)
double h_norm2(const M2& h, const M2& a)
{
    M2 m = mul(tr(a), mul(h, mul(a, inv(h))));
    return m.a + m.d;
}

} // namespace

HessianReport hessian_report(const DeformationFamily& fam)
{
    const GridDomain& d = fam.domain;
    require(d.mode() == DomainMode::Torus, "hessian_report: TORUS family required");
    const FunnelData& f0 = fam.at(0.0);
    double a0 = std::max({sup_norm(f0.A.m00, d.evaluation_set()), sup_norm(f0.A.m01, d.evaluation_set()),
                          sup_norm(f0.A.m10, d.evaluation_set()), sup_norm(f0.A.m11, d.evaluation_set())});
    if (a0 > 1e-12) throw PreconditionError("hessian_report: A(0) must vanish (geodesic base point)");
    Report scratch;
    prefetch(fam);
    FirstOrder fo = first_order(fam, scratch);
    Grid t2 = trace(compose(fo.adot, fo.adot));
    Grid n2(t2.size());
    for (size_t k = 0; k < n2.size(); ++k) n2[k] = h_norm2(mat(f0.h, k), mat(fo.adot, k));
    HessianReport r;
    r.raw = integrate(d, f0.h, t2);
    r.lower_bound = r.raw / 4;
    r.l2_norm2 = integrate(d, f0.h, n2);
    return r;
}

HessianReport hessian_report(const BolzaFamily& fam)
{
    const BolzaMesh& mesh = *fam.mesh;
    BolzaFem fem = assemble(BolzaMetric::poincare(fam.mesh));
    auto qn = quadratic_norm2(mesh, fam.q);
    std::vector<double> t2(qn.size()), n2(qn.size());
    for (size_t i = 0; i < qn.size(); ++i) {
        t2[i] = 2 * qn[i];
        int v = mesh.representative(static_cast<int>(i));
        double r2 = poincare_rho2(mesh.chart(v));
        // Adot = rho^-2 [[Re q, -Im q], [-Im q, -Re q]] and h_P is conformal
        double a = fam.q[v].real() / r2, b = -fam.q[v].imag() / r2;
        n2[i] = a * a + b * b + b * b + a * a;
    }
    HessianReport r;
    r.raw = integrate(fem, t2);
    r.lower_bound = r.raw / 4;
    r.l2_norm2 = integrate(fem, n2);
    return r;
}

Eigen::MatrixXd hessian_gram(std::shared_ptr<const BolzaMesh> mesh, const std::vector<std::vector<cplx>>& qs)
{
    const size_t m = qs.size();
    auto H = [&](const std::vector<cplx>& q) { return hessian_report(bolza_family(mesh, q)).lower_bound; };
    Eigen::MatrixXd G(m, m);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i; j < m; ++j) {
            std::vector<cplx> plus(qs[i].size()), minus(qs[i].size());
            for (size_t k = 0; k < plus.size(); ++k) {
                plus[k] = qs[i][k] + qs[j][k];
                minus[k] = qs[i][k] - qs[j][k];
            }
            G(i, j) = G(j, i) = (H(plus) - H(minus)) / 4;
        }
    return G;
}

Report volr_inequality_scan(const BolzaFamily& fam, const std::vector<double>& s_grid)
{
    Report rep;
    prefetch(fam, s_grid);
    const std::string p = fam.name + ": ";
    auto qn = quadratic_norm2(*fam.mesh, fam.q);
    BolzaFem base = assemble(metric_at_infinity(fam.at(0.0)));
    std::vector<double> t2(qn.size());
    for (size_t i = 0; i < qn.size(); ++i) t2[i] = 2 * qn[i];
    const double size = integrate(base, t2);
    Sweep sw{p + "Vol_R inequality", "s", "Polyakov difference", {}, {}};
    for (double s : s_grid) {
        const BolzaFunnel& f = fam.at(s);
        BolzaFem fem = assemble(metric_at_infinity(f));
        auto kinf = curvature_at_infinity(f);
        auto sol = liouville_solve(fem, kinf);
        double P = polyakov_difference(fem, kinf, sol.omega);
        sw.x.push_back(s);
        sw.y.push_back(P);
        if (s == 0.0) {
            rep.add(make_check(p + "equality at s = 0", P, 0.0, 1e-12));
            continue;
        }
        rep.add(make_lower_bound_check(p + "Vol_R inequality at s = " + fmt(s), P, -1e-9));
        rep.add(make_check(p + "difference / (s^2 int Tr(Adot^2)) at s = " + fmt(s), P / (s * s * size), 1.0, 0.02));
    }
    rep.sweeps.push_back(sw);
    return rep;
}

Report volr_sanity_scan(std::shared_ptr<const BolzaMesh> mesh, const std::vector<std::vector<double>>& basis, int count,
                        uint64_t seed)
{
    Report rep;
    const size_t n = mesh->num_dofs();
    for (const auto& b : basis) require(b.size() == n, "volr_sanity_scan: basis fields must be per degree of freedom");
    BolzaFem pf = assemble(BolzaMetric::poincare(mesh));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (int k = 0; k < count; ++k) {
        std::vector<double> psi(n, -std::log(2.0) + u(rng));
        for (const auto& b : basis) {
            double c = u(rng);
            for (size_t i = 0; i < n; ++i) psi[i] += c * b[i];
        }
        CheckResult c;
        c.name = "random conformal perturbation " + std::to_string(k);
        c.report_only = true;
        try {
            BolzaFem fem = assemble(BolzaMetric::conformal(mesh, psi));
            auto kappa = conformal_curvature(pf, psi);
            auto sol = liouville_solve(fem, kappa);
            c.lhs = polyakov_difference(fem, kappa, sol.omega);
            c.pass = c.lhs >= -1e-9;
            c.note = c.pass ? "non-negative" : "negative (no constraint holds for this family)";
        } catch (const Error& e) {
            c.note = std::string("not evaluated: ") + e.what();
        }
        rep.add(c);
    }
    return rep;
}

} // namespace renvol
