#pragma once

#include "renvol/fuchsian.hpp"

#include <memory>

namespace renvol::fuchsian {

/// Truncated Poincare series  sum_g g'(z)^2 w(g z)  over a group ball, with the
/// seed w(z) = z^power. The sum is a holomorphic quadratic differential that is
/// equivariant up to the truncation error.
class PoincareSeries {
public:
    PoincareSeries(std::shared_ptr<const FuchsianGroup> group, std::shared_ptr<const GroupBall> ball, int power);

    int power() const { return m_power; }
    int word_length() const { return static_cast<int>(m_ball->count_by_length.size()) - 1; }
    const FuchsianGroup& group() const { return *m_group; }

    std::vector<cplx> evaluate(const std::vector<cplx>& z) const;
    cplx evaluate(cplx z) const { return evaluate(std::vector<cplx>{z})[0]; }
    /// Also returns, per point, the contribution of the longest words alone.
    std::vector<cplx> evaluate(const std::vector<cplx>& z, std::vector<cplx>& last_layer) const;

    /// max over generators k and sample points z of |q(g_k z) g_k'(z)^2 - q(z)|.
    double equivariance_residual(const std::vector<cplx>& samples) const;
    /// Same, for a single generator.
    double equivariance_residual(const std::vector<cplx>& samples, int generator) const;

private:
    std::shared_ptr<const FuchsianGroup> m_group;
    std::shared_ptr<const GroupBall> m_ball;
    int m_power;
    std::vector<double> m_ar, m_ai, m_br, m_bi;
};

/// Deterministic points spread over the disk inscribed in the octagon.
std::vector<cplx> octagon_samples(const FuchsianGroup& group, size_t n = 100);

/// Series for the given seed power; throws DegenerateSeedError when the
/// series vanishes: max |q| < 1e-10 on the samples, or max |q| is below
/// ten times the contribution of the longest words (the series is then
/// indistinguishable from its truncation error).
PoincareSeries poincare_series(std::shared_ptr<const FuchsianGroup> group, std::shared_ptr<const GroupBall> ball,
                               int power, const std::vector<cplx>& samples);

/// First seed power among 0, 1, 2 whose series has max |q| > 1e-6 on the samples.
PoincareSeries first_nondegenerate_series(std::shared_ptr<const FuchsianGroup> group,
                                          std::shared_ptr<const GroupBall> ball, const std::vector<cplx>& samples);

} // namespace renvol::fuchsian
