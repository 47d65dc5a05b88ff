#pragma once

#include "renvol/report.hpp"
#include "renvol/uhlenbeck.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>

namespace renvol {

/// Five-point central differences at `step` and step / 2 combined by one
/// Richardson level. Family nodes are 0, +-step/2, +-step, +-2 step.
struct Stencil {
    double step = 0.02;
    std::vector<double> nodes() const;
};

/// A finite-difference derivative with its step-halving error estimate.
/// `reliable` is false when the low-order differences do not improve under
/// halving, which happens for noisy or non-smooth extractors.
struct Derivative {
    double value = 0.0;
    double error = 0.0;
    bool reliable = true;
};

struct FieldDerivative {
    std::vector<double> value;
    double error = 0.0;   // sup over components
    bool reliable = true;
};

Derivative s_derivative(const std::function<double(double)>& f, int order, const Stencil& st = {});
FieldDerivative s_derivative(const std::function<std::vector<double>(double)>& f, int order, const Stencil& st = {});

/// A one-parameter family s -> (h^s, A^s) of grid funnel data.
struct DeformationFamily {
    enum class Kind { Exact, Sampled };

    std::string name;
    Kind kind = Kind::Exact;
    GridDomain domain;
    std::function<FunnelData(double)> evaluate;
    /// Closed-form s-derivatives at s = 0 (exact families).
    std::optional<Sym2> hdot;
    std::optional<Endo> adot;
    bool minimal = false;       // Tr A^s = 0 for every s
    bool constrained = true;    // Gauss and Codazzi hold for every s
    Stencil stencil;

    /// evaluate(s), memoized.
    const FunnelData& at(double s) const;

    std::shared_ptr<std::map<double, FunnelData>> cache = std::make_shared<std::map<double, FunnelData>>();
};

DeformationFamily constant_family(const FunnelData& fd);
/// Flat h, A(s) = diag(lambda(s), 1 / lambda(s)).
DeformationFamily flat_torus_family(const GridDomain& d, std::function<double(double)> lambda, double dlambda0,
                                    std::string name = "flat torus diag(lambda, 1/lambda)");
/// Flat h scaled by (1 + s), A = I.
DeformationFamily horospherical_scaling(const GridDomain& d);
/// (h + s hdot, A + s adot); constraints are not enforced.
DeformationFamily linear_family(const FunnelData& base, const Sym2& hdot, const Endo& adot, std::string name = "linear");
/// Minimal surfaces of uhlenbeck_construct(d, h0, q, s); PATCH.
DeformationFamily uhlenbeck_family(const GridDomain& d, const Sym2& h0, const std::vector<cplx>& q);

/// The Uhlenbeck family over the Bolza surface.
struct BolzaFamily {
    std::string name;
    std::shared_ptr<const BolzaMesh> mesh;
    std::vector<cplx> q;
    Stencil stencil;
    NewtonOptions newton;

    const BolzaFunnel& at(double s) const;

    std::shared_ptr<std::map<double, BolzaFunnel>> cache = std::make_shared<std::map<double, BolzaFunnel>>();
};

BolzaFamily bolza_family(std::shared_ptr<const BolzaMesh> mesh, std::vector<cplx> q, std::string name = "bolza uhlenbeck");

/// Tr hdot = 0, delta hdot = 0, Tr Adot = 0, delta h(Adot) = 0 and kappa-dot = 0
/// (skipped unless the family is minimal), and the first variation of
/// h_inf = h((1 + A)^2) / 4 in its general form.
Report first_variation_checks(const DeformationFamily& fam);

/// Pointwise Tr(A^2) = -2 kappa - 2 and kappa_inf = 4 - 8 / (2 + kappa) at every
/// s-node and the second derivative of kappa_inf against -8 Tr(Adot^2).
Report second_variation_checks(const DeformationFamily& fam);
/// The same over the Bolza surface, plus the quadratic renormalized-volume
/// correction against -(1/8) int kappa-ddot.
Report second_variation_checks(const BolzaFamily& fam, const std::vector<double>& s_sweep = {0.01, 0.02, 0.04});

/// Finite difference of the slab volume over [0, T] against the boundary
/// terms F(T) - F(0), F(t) = (1/2) int (Tr Adot_t + Tr(h_t^-1 hdot_t A_t) / 2) dvol_{h_t}.
/// Exact torus families only.
Report schlafli_check(const DeformationFamily& fam, double T);

struct HessianReport {
    double lower_bound = 0.0;   // (1/4) int Tr(Adot^2) dvol_h
    double raw = 0.0;           // int Tr(Adot^2) dvol_h
    double l2_norm2 = 0.0;      // |Adot|^2_{L2(h)} from the matrix entries
};

/// Adot at s = 0 requires A(0) = 0 (PreconditionError otherwise). Grid
/// families must live on a torus.
HessianReport hessian_report(const DeformationFamily& fam);
/// Adot = h_P^-1 Re(q dz^2) for the Bolza family.
HessianReport hessian_report(const BolzaFamily& fam);
/// Polarized Gram matrix of the Hessian report over a set of differentials.
Eigen::MatrixXd hessian_gram(std::shared_ptr<const BolzaMesh> mesh, const std::vector<std::vector<cplx>>& qs);

/// Polyakov difference of the uniformization of h_inf^s for every s in the
/// grid: 0 at s = 0, >= -1e-9 and close to s^2 int Tr(Adot^2) dvol_{h_inf}.
Report volr_inequality_scan(const BolzaFamily& fam, const std::vector<double>& s_grid);
/// Random conformal perturbations e^{2 psi} h_P / 4 that satisfy no constraint;
/// the differences are recorded as report-only checks.
Report volr_sanity_scan(std::shared_ptr<const BolzaMesh> mesh, const std::vector<std::vector<double>>& basis, int count,
                        uint64_t seed);

} // namespace renvol
