#include "renvol/jet.hpp"

#include "renvol/common.hpp"

#include <algorithm>
#include <functional>

namespace renvol {

namespace {

struct Tables {
    // monomials ordered by total degree, so the monomials of an order-n jet
    // are a prefix of the order-4 list
    std::vector<std::array<int, 3>> mono;
    int index[5][5][5];
    size_t size[Jet::kMaxOrder + 1];
    struct Triple {
        int i, j, k;
    };
    std::vector<Triple> products[Jet::kMaxOrder + 1];

    Tables()
    {
        for (auto& a : index)
            for (auto& b : a)
                for (int& c : b) c = -1;
        for (int d = 0; d <= Jet::kMaxOrder; ++d) {
            for (int a = d; a >= 0; --a)
                for (int b = d - a; b >= 0; --b) {
                    int c = d - a - b;
                    index[a][b][c] = static_cast<int>(mono.size());
                    mono.push_back({a, b, c});
                }
            size[d] = mono.size();
        }
        for (int n = 0; n <= Jet::kMaxOrder; ++n)
            for (size_t i = 0; i < size[n]; ++i)
                for (size_t j = 0; j < size[n]; ++j) {
                    auto& p = mono[i];
                    auto& q = mono[j];
                    int a = p[0] + q[0], b = p[1] + q[1], c = p[2] + q[2];
                    if (a + b + c <= n)
                        products[n].push_back({static_cast<int>(i), static_cast<int>(j), index[a][b][c]});
                }
    }
};

const Tables& tables()
{
    static const Tables t;
    return t;
}

} // namespace

Jet::Jet(double c, int order) : m_order(order)
{
    require(order >= 0 && order <= kMaxOrder, "Jet: order must be in [0, 4]");
    m_c.assign(tables().size[order], 0.0);
    m_c[0] = c;
}

Jet Jet::variable(int var, double at, int order)
{
    require(var >= 0 && var < 3, "Jet::variable: var must be 0, 1 or 2");
    Jet j(at, order);
    if (order >= 1) j.m_c[1 + var] = 1.0;   // degree-1 monomials are t, x, y in this order
    return j;
}

double Jet::coefficient(int a, int b, int c) const
{
    if (a < 0 || b < 0 || c < 0 || a + b + c > m_order) return 0.0;
    return m_c[tables().index[a][b][c]];
}

Jet Jet::derivative(int var) const
{
    require(m_order >= 1, "Jet::derivative: order exhausted; raise the jet order");
    const auto& T = tables();
    Jet d(0.0, m_order - 1);
    for (size_t k = 0; k < d.m_c.size(); ++k) {
        auto m = T.mono[k];
        int p = ++m[var];
        d.m_c[k] = p * m_c[T.index[m[0]][m[1]][m[2]]];
    }
    return d;
}

Jet& Jet::operator+=(const Jet& o)
{
    if (o.m_order < m_order) {
        m_order = o.m_order;
        m_c.resize(o.m_c.size());
    }
    for (size_t k = 0; k < m_c.size(); ++k) m_c[k] += o.m_c[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o)
{
    if (o.m_order < m_order) {
        m_order = o.m_order;
        m_c.resize(o.m_c.size());
    }
    for (size_t k = 0; k < m_c.size(); ++k) m_c[k] -= o.m_c[k];
    return *this;
}

Jet& Jet::operator*=(double s)
{
    for (double& c : m_c) c *= s;
    return *this;
}

Jet operator-(Jet a)
{
    for (double& c : a.m_c) c = -c;
    return a;
}

Jet operator+(Jet a, double s)
{
    a.m_c[0] += s;
    return a;
}

Jet operator*(const Jet& a, const Jet& b)
{
    int n = std::min(a.m_order, b.m_order);
    Jet r(0.0, n);
    for (const auto& p : tables().products[n]) r.m_c[p.k] += a.m_c[p.i] * b.m_c[p.j];
    return r;
}

Jet Jet::compose(const std::vector<double>& c) const
{
    Jet delta = *this;
    delta.m_c[0] = 0.0;
    int K = std::min<int>(m_order, static_cast<int>(c.size()) - 1);
    Jet r(c[K], m_order);
    for (int k = K - 1; k >= 0; --k) r = r * delta + c[k];
    return r;
}

namespace {

std::vector<double> series(int n, const std::function<double(int)>& derivative_over_factorial)
{
    std::vector<double> c(n + 1);
    for (int k = 0; k <= n; ++k) c[k] = derivative_over_factorial(k);
    return c;
}

double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace

Jet operator/(double s, const Jet& a)
{
    double v = a.value();
    require(v != 0.0, "Jet: division by a jet with zero value");
    return s * a.compose(series(a.order(), [v](int k) { return ((k % 2) ? -1.0 : 1.0) / std::pow(v, k + 1); }));
}

Jet operator/(const Jet& a, const Jet& b) { return a * (1.0 / b); }

Jet exp(const Jet& f)
{
    double e = std::exp(f.value());
    return f.compose(series(f.order(), [e](int k) { return e / factorial(k); }));
}

Jet log(const Jet& f)
{
    double v = f.value();
    require(v > 0.0, "Jet: log of a non-positive value");
    return f.compose(series(f.order(), [v](int k) {
        if (k == 0) return std::log(v);
        return ((k % 2) ? 1.0 : -1.0) / (k * std::pow(v, k));
    }));
}

Jet sqrt(const Jet& f)
{
    double v = f.value();
    require(v > 0.0, "Jet: sqrt of a non-positive value");
    return f.compose(series(f.order(), [v](int k) {
        double b = 1.0;   // binomial(1/2, k)
        for (int i = 0; i < k; ++i) b *= (0.5 - i) / (i + 1);
        return b * std::pow(v, 0.5 - k);
    }));
}

Jet sin(const Jet& f)
{
    double s = std::sin(f.value()), c = std::cos(f.value());
    const double d[4] = {s, c, -s, -c};
    return f.compose(series(f.order(), [&](int k) { return d[k % 4] / factorial(k); }));
}

Jet cos(const Jet& f)
{
    double s = std::sin(f.value()), c = std::cos(f.value());
    const double d[4] = {c, -s, -c, s};
    return f.compose(series(f.order(), [&](int k) { return d[k % 4] / factorial(k); }));
}

Jet sinh(const Jet& f)
{
    double s = std::sinh(f.value()), c = std::cosh(f.value());
    return f.compose(series(f.order(), [&](int k) { return ((k % 2) ? c : s) / factorial(k); }));
}

Jet cosh(const Jet& f)
{
    double s = std::sinh(f.value()), c = std::cosh(f.value());
    return f.compose(series(f.order(), [&](int k) { return ((k % 2) ? s : c) / factorial(k); }));
}

JetPoint jet_point(double t, double x, double y, int order)
{
    return JetPoint{Jet::variable(0, t, order), Jet::variable(1, x, order), Jet::variable(2, y, order)};
}

} // namespace renvol
