#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace renvol {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user input: scene files, field files, bad arguments.
class InputError : public Error {
public:
    using Error::Error;
};

/// An operation was called on data that violates its stated precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The requested operation is not defined on this domain mode.
class UnsupportedDomainError : public Error {
public:
    using Error::Error;
};

/// A solver stopped without reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), m_residual(residual) {}
    double residual() const { return m_residual; }

private:
    double m_residual;
};

/// Fundamental domain or mesh construction failed.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A Poincare series seed produced an (almost) identically zero differential.
class DegenerateSeedError : public Error {
public:
    using Error::Error;
};

/// Total curvature has the wrong sign for a hyperbolic uniformization.
class GaussBonnetError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw PreconditionError(msg);
}

/// Pairwise summation; the result does not depend on thread count.
double pairwise_sum(const double* x, size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

double max_abs(const std::vector<double>& x);

} // namespace renvol
