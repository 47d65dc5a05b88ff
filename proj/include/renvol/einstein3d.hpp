#pragma once

#include "renvol/jet.hpp"

#include <complex>
#include <functional>
#include <string>

namespace renvol::einstein3d {

/// Covariant tensor of rank 0..4 in coordinates (t, x, y), components as jets.
class Tensor {
public:
    Tensor() = default;
    Tensor(int rank, int order);

    int rank() const { return m_rank; }
    Jet& operator[](size_t k) { return m_c[k]; }
    const Jet& operator[](size_t k) const { return m_c[k]; }
    size_t size() const { return m_c.size(); }
    Jet& at(int i) { return m_c[static_cast<size_t>(i)]; }
    Jet& at(int i, int j) { return m_c[static_cast<size_t>(3 * i + j)]; }
    Jet& at(int i, int j, int k) { return m_c[static_cast<size_t>(9 * i + 3 * j + k)]; }
    Jet& at(int i, int j, int k, int l) { return m_c[static_cast<size_t>(27 * i + 9 * j + 3 * k + l)]; }
    const Jet& at(int i) const { return m_c[static_cast<size_t>(i)]; }
    const Jet& at(int i, int j) const { return m_c[static_cast<size_t>(3 * i + j)]; }
    const Jet& at(int i, int j, int k) const { return m_c[static_cast<size_t>(9 * i + 3 * j + k)]; }
    const Jet& at(int i, int j, int k, int l) const { return m_c[static_cast<size_t>(27 * i + 9 * j + 3 * k + l)]; }

    Tensor& operator+=(const Tensor& o);
    Tensor& operator-=(const Tensor& o);
    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(double s, Tensor a);
    friend Tensor operator*(const Jet& f, Tensor a);

private:
    int m_rank = 0;
    std::vector<Jet> m_c;
};

/// A tensor field: its jet at a point.
using Field = std::function<Tensor(const JetPoint&)>;

/// Levi-Civita calculus of a metric jet at one point. Christoffel symbols are
/// stored as Gamma(a, b, c) = Gamma^a_bc; Riemann(i, j, k, q) = <R(d_i, d_j) d_k, d_q>
/// with R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
class Geometry {
public:
    explicit Geometry(const Tensor& g);

    const Tensor& metric() const { return m_g; }
    const Tensor& inverse() const { return m_inv; }
    const Tensor& christoffel() const { return m_gamma; }
    const Tensor& riemann() const { return m_riem; }
    Tensor ricci() const;

    /// Covariant derivative; the new (first) index is the direction.
    Tensor nabla(const Tensor& T) const;

private:
    Tensor m_g, m_inv, m_gamma, m_riem;
};

Jet trace(const Geometry& G, const Tensor& q);
/// (delta q)_b = -g^{ac} (nabla_a q)_{cb}
Tensor divergence(const Geometry& G, const Tensor& q);
/// Symmetrized covariant derivative of a 1-form.
Tensor sym_gradient(const Geometry& G, const Tensor& xi);
Tensor differential(const Geometry& G, const Jet& f);
/// -g^{ac} (nabla^2 T)_{ac...}
Tensor rough_laplacian(const Geometry& G, const Tensor& T);
/// (Rq)_{iq} = q^{jk} Riemann(i, j, k, q)
Tensor ring(const Geometry& G, const Tensor& q);
/// Closed form of ring on a hyperbolic background: q - Tr(q) g.
Tensor ring_hyperbolic(const Geometry& G, const Tensor& q);
/// -delta*(2 delta + d Tr) q + nabla* nabla q - 2 ring(q)
Tensor einstein_operator(const Geometry& G, const Tensor& q);
/// (delta + d Tr / 2) q
Tensor bianchi(const Geometry& G, const Tensor& q);
/// Twisted Hodge Laplacian (d d* + d* d) of q viewed as a 1-form with values in T*M.
Tensor twisted_laplacian(const Geometry& G, const Tensor& q);
/// Pointwise g-norm of a rank 1 or 2 tensor (values only).
double norm(const Geometry& G, const Tensor& q);
Tensor lower_trace_free(const Geometry& G, const Tensor& q);

/// Surface data as jets in (x, y): symmetric tensors {xx, xy, yy}, endomorphisms {00, 01, 10, 11}.
using SurfaceSym2 = std::function<std::array<Jet, 3>(const Jet& x, const Jet& y)>;
using SurfaceEndo = std::function<std::array<Jet, 4>(const Jet& x, const Jet& y)>;

SurfaceSym2 poincare_disk();
SurfaceSym2 flat_metric();
SurfaceEndo constant_endo(double a00, double a01, double a10, double a11);
SurfaceEndo zero_endo();
/// Re(q dz^2) for a polynomial q with complex coefficients c[k] z^k.
SurfaceSym2 holomorphic_tt(const std::vector<std::complex<double>>& coeffs);
/// h^{-1} s
SurfaceEndo raise(const SurfaceSym2& h, const SurfaceSym2& s);

/// Funnel metric dt^2 + h((cosh t + A sinh t)^2 ., .). Only funnel metrics of
/// this form (warped products are the cases A = 0 and A = I) are supported.
struct Background {
    std::string name;
    SurfaceSym2 h;
    SurfaceEndo A;
    /// Warping function e^t (A = I) or cosh t (A = 0), when the metric is warped.
    enum class Warp { None, Cosh, Exp } warp = Warp::None;
    Field metric() const;
};

Background geodesic_background(SurfaceSym2 h);     // h hyperbolic, A = 0
Background horospherical_background();             // flat h, A = I
Background flat_torus_background(double lambda);   // flat h, A = diag(lambda, 1/lambda)

/// d/ds of h^s((cosh t + A^s sinh t)^2) at s = 0 given hdot and adot.
Field funnel_deformation(const Background& bg, const SurfaceSym2& hdot, const SurfaceEndo& adot);
/// L_V g for a 1-form field V.
Field gauge_direction(const Background& bg, const Field& V);

/// Evaluation nodes (t, x, y).
struct Node {
    double t, x, y;
};
std::vector<Node> default_nodes(bool patch);

/// sup over nodes of |Ric + 2g|; a hyperbolic background gives round-off.
double hyperbolicity_residual(const Background& bg, const std::vector<Node>& nodes);

/// sup of |nabla g| at the nodes.
double metric_compatibility(const Background& bg, const std::vector<Node>& nodes);
/// sup of |Gamma - Gamma_Koszul| with the warped-product table; warped backgrounds only.
double koszul_residual(const Background& bg, const std::vector<Node>& nodes);

struct TraceDivergence {
    double trace = 0.0;
    double divergence = 0.0;
};
TraceDivergence trace_div_3d(const Background& bg, const Field& q, const std::vector<Node>& nodes);

/// Throws PreconditionError when the background is not hyperbolic to 1e-8.
double linearized_einstein_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes);
double bianchi_gauge_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes);

struct Weitzenbock {
    double r1 = 0.0;   // |nabla* nabla q0 - (D + 3) q0|
    double r2 = 0.0;   // |nabla* nabla (a g) - Delta(a) g|
};
/// q0 must be trace-free (PreconditionError otherwise).
Weitzenbock weitzenbock_residual(const Background& bg, const Field& q0, const std::function<Jet(const JetPoint&)>& a,
                                 const std::vector<Node>& nodes);

/// sup of |ring(q) - (q - Tr(q) g)|.
double ring_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes);

/// Bianchi-gauge system: |(nabla* nabla - 2 ring) q - [(D + 1) q0 + ((Delta + 4) a) g]| for q = q0 + a g.
double decomposition_residual(const Background& bg, const Field& q, const std::vector<Node>& nodes);

/// |(2 delta + d Tr) delta* V - (nabla* nabla + 2) V| for a 1-form field V.
double vector_identity_residual(const Background& bg, const Field& V, const std::vector<Node>& nodes);

} // namespace renvol::einstein3d
