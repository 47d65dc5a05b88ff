#include "renvol/poincare.hpp"
#include "renvol/parallel.hpp"

#include <algorithm>

namespace renvol::fuchsian {

PoincareSeries::PoincareSeries(std::shared_ptr<const FuchsianGroup> group, std::shared_ptr<const GroupBall> ball, int power)
    : m_group(std::move(group)), m_ball(std::move(ball)), m_power(power)
{
    require(m_power >= 0 && m_power <= 2, "PoincareSeries: seed power must be 0, 1 or 2");
    const auto& els = m_ball->elements;
    m_ar.resize(els.size());
    m_ai.resize(els.size());
    m_br.resize(els.size());
    m_bi.resize(els.size());
    for (size_t e = 0; e < els.size(); ++e) {
        m_ar[e] = els[e].m.a.real();
        m_ai[e] = els[e].m.a.imag();
        m_br[e] = els[e].m.b.real();
        m_bi[e] = els[e].m.b.imag();
    }
}

namespace {

// Accumulates sum over elements of n^P / d^(4+P) for a block of points, where
// g(z) = n/d and g'(z)^2 = d^-4. Elements are visited in enumeration order.
template <int P>
void accumulate(const double* ar, const double* ai, const double* br, const double* bi, size_t ne,
                const double* zr, const double* zi, double* sr, double* si, size_t np)
{
    for (size_t e = 0; e < ne; ++e) {
        const double Ar = ar[e], Ai = ai[e], Br = br[e], Bi = bi[e];
        for (size_t j = 0; j < np; ++j) {
            const double x = zr[j], y = zi[j];
            const double dr = Br * x + Bi * y + Ar;
            const double di = Br * y - Bi * x - Ai;
            const double s = 1.0 / (dr * dr + di * di);
            const double ir = dr * s, ii = -di * s;
            const double i2r = ir * ir - ii * ii, i2i = 2.0 * ir * ii;
            double tr = i2r * i2r - i2i * i2i, ti = 2.0 * i2r * i2i;
            if constexpr (P >= 1) {
                const double nr = Ar * x - Ai * y + Br;
                const double ni = Ar * y + Ai * x + Bi;
                const double wr = nr * ir - ni * ii, wi = nr * ii + ni * ir;
                double ur = tr * wr - ti * wi, ui = tr * wi + ti * wr;
                if constexpr (P == 2) {
                    const double vr = ur * wr - ui * wi, vi = ur * wi + ui * wr;
                    ur = vr;
                    ui = vi;
                }
                tr = ur;
                ti = ui;
            }
            sr[j] += tr;
            si[j] += ti;
        }
    }
}

} // namespace

std::vector<cplx> PoincareSeries::evaluate(const std::vector<cplx>& z) const
{
    std::vector<cplx> tail;
    return evaluate(z, tail);
}

std::vector<cplx> PoincareSeries::evaluate(const std::vector<cplx>& z, std::vector<cplx>& last_layer) const
{
    for (const auto& p : z)
        if (!(std::abs(p) < 1.0)) throw PreconditionError("PoincareSeries: evaluation point outside the disk");
    const size_t np = z.size(), ne = m_ar.size();
    const size_t split = m_ball->count_by_length.size() > 1 ? ne - m_ball->count_by_length.back() : ne;
    std::vector<double> zr(np), zi(np), sr(np, 0.0), si(np, 0.0), hr(np, 0.0), hi(np, 0.0);
    for (size_t j = 0; j < np; ++j) {
        zr[j] = z[j].real();
        zi[j] = z[j].imag();
    }
    parallel_for(np, [&](size_t b, size_t e) {
        constexpr size_t kBlock = 64;
        for (size_t j0 = b; j0 < e; j0 += kBlock) {
            size_t n = std::min(kBlock, e - j0);
            auto run = [&](size_t e0, size_t e1, double* ar_, double* ai_) {
                switch (m_power) {
                case 0: accumulate<0>(&m_ar[e0], &m_ai[e0], &m_br[e0], &m_bi[e0], e1 - e0, &zr[j0], &zi[j0], ar_, ai_, n); break;
                case 1: accumulate<1>(&m_ar[e0], &m_ai[e0], &m_br[e0], &m_bi[e0], e1 - e0, &zr[j0], &zi[j0], ar_, ai_, n); break;
                default: accumulate<2>(&m_ar[e0], &m_ai[e0], &m_br[e0], &m_bi[e0], e1 - e0, &zr[j0], &zi[j0], ar_, ai_, n); break;
                }
            };
            run(0, split, &sr[j0], &si[j0]);
            run(split, ne, &hr[j0], &hi[j0]);
        }
    }, 8);
    std::vector<cplx> out(np);
    last_layer.resize(np);
    for (size_t j = 0; j < np; ++j) {
        last_layer[j] = {hr[j], hi[j]};
        out[j] = cplx(sr[j], si[j]) + last_layer[j];
    }
    return out;
}

double PoincareSeries::equivariance_residual(const std::vector<cplx>& samples, int k) const
{
    const Mobius& g = m_group->generators.at(k);
    std::vector<cplx> pts = samples;
    for (const auto& z : samples) pts.push_back(g(z));
    auto q = evaluate(pts);
    const size_t n = samples.size();
    double r = 0.0;
    for (size_t j = 0; j < n; ++j) {
        cplx gp = g.derivative(samples[j]);
        r = std::max(r, std::abs(q[n + j] * gp * gp - q[j]));
    }
    return r;
}

double PoincareSeries::equivariance_residual(const std::vector<cplx>& samples) const
{
    std::vector<cplx> pts = samples;
    for (int k = 0; k < 8; ++k)
        for (const auto& z : samples) pts.push_back(m_group->generators[k](z));
    auto q = evaluate(pts);
    const size_t n = samples.size();
    double r = 0.0;
    for (int k = 0; k < 8; ++k)
        for (size_t j = 0; j < n; ++j) {
            cplx gp = m_group->generators[k].derivative(samples[j]);
            r = std::max(r, std::abs(q[n * (k + 1) + j] * gp * gp - q[j]));
        }
    return r;
}

std::vector<cplx> octagon_samples(const FuchsianGroup& group, size_t n)
{
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    const double R = 0.95 * group.side_midpoint_radius;
    std::vector<cplx> pts(n);
    for (size_t j = 0; j < n; ++j)
        pts[j] = std::polar(R * std::sqrt((j + 0.5) / n), golden * static_cast<double>(j));
    return pts;
}

namespace {

// max |q| and max |last layer| over the samples.
std::pair<double, double> magnitude(const PoincareSeries& s, const std::vector<cplx>& samples)
{
    std::vector<cplx> tail;
    auto q = s.evaluate(samples, tail);
    double m = 0.0, t = 0.0;
    for (size_t j = 0; j < q.size(); ++j) {
        m = std::max(m, std::abs(q[j]));
        t = std::max(t, std::abs(tail[j]));
    }
    return {m, t};
}

bool degenerate(double m, double t) { return m < 1e-10 || m < 10.0 * t; }

} // namespace

PoincareSeries poincare_series(std::shared_ptr<const FuchsianGroup> group, std::shared_ptr<const GroupBall> ball,
                               int power, const std::vector<cplx>& samples)
{
    PoincareSeries s(std::move(group), std::move(ball), power);
    auto [m, t] = magnitude(s, samples);
    if (degenerate(m, t))
        throw DegenerateSeedError("Poincare series with seed z^" + std::to_string(power) + " vanishes (max " +
                                  std::to_string(m) + ", truncation increment " + std::to_string(t) + ")");
    return s;
}

PoincareSeries first_nondegenerate_series(std::shared_ptr<const FuchsianGroup> group,
                                          std::shared_ptr<const GroupBall> ball, const std::vector<cplx>& samples)
{
    for (int p = 0; p <= 2; ++p) {
        PoincareSeries s(group, ball, p);
        auto [m, t] = magnitude(s, samples);
        if (m > 1e-6 && !degenerate(m, t)) return s;
    }
    throw DegenerateSeedError("every Poincare seed z^0, z^1, z^2 vanishes");
}

} // namespace renvol::fuchsian
