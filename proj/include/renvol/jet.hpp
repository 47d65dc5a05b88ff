#pragma once

#include <array>
#include <vector>

namespace renvol {

/// Truncated Taylor polynomial in (t, x, y) about a point, of total degree at
/// most order() <= 4. Arithmetic is exact in the truncated algebra, so
/// derivatives of composed expressions are exact up to round-off.
class Jet {
public:
    static constexpr int kMaxOrder = 4;

    Jet() = default;
    /// Constant.
    Jet(double c, int order);
    /// The coordinate `var` (0 = t, 1 = x, 2 = y) at the expansion point.
    static Jet variable(int var, double at, int order);

    int order() const { return m_order; }
    double value() const { return m_c.empty() ? 0.0 : m_c[0]; }
    /// Coefficient of t^a x^b y^c.
    double coefficient(int a, int b, int c) const;
    /// Exact partial derivative; the result has order one less.
    Jet derivative(int var) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator+(Jet a, double s);
    friend Jet operator+(double s, Jet a) { return a + s; }
    friend Jet operator-(Jet a, double s) { return a + (-s); }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
    friend Jet operator/(double s, const Jet& a);

    /// sum_k c[k] (f - f(0))^k
    Jet compose(const std::vector<double>& c) const;

private:
    int m_order = 0;
    std::vector<double> m_c;
};

Jet exp(const Jet& f);
Jet log(const Jet& f);
Jet sqrt(const Jet& f);
Jet sin(const Jet& f);
Jet cos(const Jet& f);
Jet sinh(const Jet& f);
Jet cosh(const Jet& f);

/// The three coordinate jets at a point.
struct JetPoint {
    Jet t, x, y;
};
JetPoint jet_point(double t, double x, double y, int order);

} // namespace renvol
