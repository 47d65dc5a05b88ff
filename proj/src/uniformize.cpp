#include "renvol/uniformize.hpp"

#include "renvol/linalg.hpp"

#include <algorithm>

namespace renvol {

namespace {

using Vec = Eigen::VectorXd;

Vec as_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

} // namespace

LiouvilleSolution liouville_solve(const BolzaFem& fem, const std::vector<double>& kappa,
                                  const std::vector<double>& initial, const LiouvilleOptions& opt)
{
    const Eigen::Index n = static_cast<Eigen::Index>(fem.mass.size());
    require(static_cast<Eigen::Index>(kappa.size()) == n, "liouville_solve: kappa must have one value per degree of freedom");
    require(initial.empty() || static_cast<Eigen::Index>(initial.size()) == n, "liouville_solve: bad initial guess size");
    const double total = integrate(fem, kappa);
    if (!(total < 0.0))
        throw GaussBonnetError("liouville_solve: total curvature " + std::to_string(total) +
                               " is not negative, no metric of curvature -4 in this conformal class");

    const Vec m = as_vec(fem.mass), k = as_vec(kappa);
    const double scale = 1.0 + k.cwiseAbs().maxCoeff();
    auto F = [&](const Vec& w) -> Vec {
        return fem.stiffness * w + m.cwiseProduct(k + 4.0 * (2.0 * w).array().exp().matrix());
    };
    auto residual = [&](const Vec& w) { return F(w).cwiseQuotient(m).cwiseAbs().maxCoeff(); };

    Vec w = initial.empty() ? Vec::Zero(n) : as_vec(initial);
    LiouvilleSolution sol;
    sol.history.push_back(residual(w));
    while (sol.history.back() > opt.tol * scale) {
        if (sol.iterations >= opt.max_iter)
            throw ConvergenceError("liouville_solve: no convergence in " + std::to_string(opt.max_iter) + " Newton steps",
                                   sol.history.back());
        Vec diag_term = 8.0 * m.cwiseProduct((2.0 * w).array().exp().matrix());
        Vec diag = fem.stiffness.diagonal() + diag_term;
        auto apply = [&](const Vec& x) -> Vec { return fem.stiffness * x + diag_term.cwiseProduct(x); };
        Vec rhs = -F(w), dw = Vec::Zero(n);
        conjugate_gradient(apply, diag, rhs, dw, opt.cg_tol, static_cast<int>(10 * n));
        double step = 1.0, r = 0.0;
        for (int h = 0; h < 30; ++h) {
            r = residual(w + step * dw);
            if (std::isfinite(r) && r < sol.history.back()) break;
            step *= 0.5;
        }
        if (!(std::isfinite(r) && r < sol.history.back()))
            throw ConvergenceError("liouville_solve: line search failed", sol.history.back());
        w += step * dw;
        sol.history.push_back(r);
        ++sol.iterations;
    }
    // ratios at the round-off floor carry no information
    const double floor = 1e-11 * scale;
    for (size_t i = 1; i < sol.history.size(); ++i)
        if (sol.history[i - 1] < 1.0 && sol.history[i] > floor)
            sol.quadratic_ratios.push_back(sol.history[i] / (sol.history[i - 1] * sol.history[i - 1]));
    sol.residual = sol.history.back();
    sol.omega.assign(w.data(), w.data() + n);
    return sol;
}

LiouvilleSolution liouville_solve(const GridDomain& d, const Sym2& h)
{
    if (d.mode() != DomainMode::Torus)
        throw UnsupportedDomainError("liouville_solve needs a closed domain");
    Grid kappa = gauss_curvature(d, h);
    throw GaussBonnetError("liouville_solve: a torus has Euler characteristic 0 (total curvature " +
                           std::to_string(integrate(d, h, kappa)) + "), no metric of curvature -4 exists");
}

double polyakov_difference(const BolzaFem& fem, const std::vector<double>& kappa, const std::vector<double>& omega)
{
    require(kappa.size() == fem.mass.size() && omega.size() == fem.mass.size(), "polyakov_difference: size mismatch");
    const Vec w = as_vec(omega);
    Vec Kw = fem.stiffness * w;
    std::vector<double> terms(omega.size());
    for (size_t i = 0; i < omega.size(); ++i)
        terms[i] = omega[i] * Kw[static_cast<Eigen::Index>(i)] + 2.0 * fem.mass[i] * kappa[i] * omega[i];
    return -0.25 * pairwise_sum(terms);
}

std::vector<double> omega2_predict(const BolzaFem& fem, const std::vector<double>& kappa0, const std::vector<double>& kdd)
{
    const Eigen::Index n = static_cast<Eigen::Index>(fem.mass.size());
    require(kappa0.size() == fem.mass.size() && kdd.size() == fem.mass.size(), "omega2_predict: size mismatch");
    for (double k : kappa0)
        require(std::abs(k + 4.0) <= 1e-6, "omega2_predict: the base metric must have curvature -4");
    const Vec m = as_vec(fem.mass);
    Vec diag_term = 8.0 * m;
    Vec diag = fem.stiffness.diagonal() + diag_term;
    auto apply = [&](const Vec& x) -> Vec { return fem.stiffness * x + diag_term.cwiseProduct(x); };
    Vec rhs = -0.5 * m.cwiseProduct(as_vec(kdd));
    Vec x = Vec::Zero(n);
    conjugate_gradient(apply, diag, rhs, x, 1e-12, static_cast<int>(10 * n));
    return std::vector<double>(x.data(), x.data() + n);
}

MaximumPrinciple maximum_principle(const std::vector<double>& kappa, const std::vector<double>& omega)
{
    require(!kappa.empty() && kappa.size() == omega.size(), "maximum_principle: size mismatch");
    auto [kmin, kmax] = std::minmax_element(kappa.begin(), kappa.end());
    require(*kmax < 0.0, "maximum_principle: kappa must be negative");
    MaximumPrinciple mp;
    mp.lower = 0.5 * std::log(-*kmax / 4.0);
    mp.upper = 0.5 * std::log(-*kmin / 4.0);
    auto [wmin, wmax] = std::minmax_element(omega.begin(), omega.end());
    mp.min_omega = *wmin;
    mp.max_omega = *wmax;
    return mp;
}

} // namespace renvol
