#include "renvol/fuchsian.hpp"

#include <algorithm>
#include <cstring>

namespace renvol::fuchsian {

Mobius Mobius::canonical() const
{
    bool flip = std::abs(a.real()) > 1e-6 ? a.real() < 0.0 : a.imag() < 0.0;
    return flip ? Mobius{-a, -b} : *this;
}

Mobius compose(const Mobius& f, const Mobius& g)
{
    // no renormalization: |a|^2 - |b|^2 loses |a|^2 ulps to cancellation, so
    // dividing by its root would inject more error than the product carries
    return Mobius{f.a * g.a + f.b * std::conj(g.b), f.a * g.b + f.b * std::conj(g.a)};
}

cplx mobius_apply(const Mobius& g, cplx z)
{
    if (!(std::abs(z) < 1.0)) throw PreconditionError("mobius_apply: point outside the open unit disk");
    return g(z);
}

double distance_mod_sign(const Mobius& g, const Mobius& h)
{
    auto dist = [](const Mobius& p, const Mobius& q) {
        return std::max({std::abs(p.a.real() - q.a.real()), std::abs(p.a.imag() - q.a.imag()),
                         std::abs(p.b.real() - q.b.real()), std::abs(p.b.imag() - q.b.imag())});
    };
    return std::min(dist(g, h), dist(g, Mobius{-h.a, -h.b}));
}

namespace {

// Disk automorphism sending p to 0.
cplx to_origin(cplx p, cplx z) { return (z - p) / (1.0 - std::conj(p) * z); }
cplx from_origin(cplx p, cplx w) { return (w + p) / (1.0 + std::conj(p) * w); }

} // namespace

cplx hyperbolic_midpoint(cplx p, cplx q)
{
    cplx w = to_origin(p, q);
    double r = std::abs(w);
    if (r == 0.0) return p;
    cplx half = std::tanh(0.5 * std::atanh(r)) * (w / r);
    return from_origin(p, half);
}

double hyperbolic_distance(cplx p, cplx q) { return 2.0 * std::atanh(std::abs(to_origin(p, q))); }

double interior_angle(const std::array<cplx, 8>& v, int k)
{
    cplx p = v[k];
    cplx prev = to_origin(p, v[(k + 7) % 8]);
    cplx next = to_origin(p, v[(k + 1) % 8]);
    // to_origin has a positive real derivative at p, so directions at p are preserved.
    double ang = std::abs(std::arg(next / prev));
    return ang;
}

namespace {

std::array<cplx, 8> octagon(double r)
{
    std::array<cplx, 8> v;
    for (int k = 0; k < 8; ++k) v[k] = std::polar(r, (2 * k - 1) * kPi / 8.0);
    return v;
}

} // namespace

Mobius FuchsianGroup::word(const std::vector<int>& letters) const
{
    Mobius m;
    for (int l : letters) m = compose(m, generators.at(l));
    return m;
}

double FuchsianGroup::side_pairing_residual() const
{
    double r = 0.0;
    for (int k = 0; k < 8; ++k) {
        const Mobius& g = generators[k];
        r = std::max(r, std::abs(g(vertices[k]) - vertices[(k + 5) % 8]) +
                            std::abs(g(vertices[(k + 1) % 8]) - vertices[(k + 4) % 8]));
    }
    return r;
}

double FuchsianGroup::relation_residual() const { return distance_mod_sign(word(relation), Mobius::identity()); }

bool FuchsianGroup::contains(cplx z, double tol) const
{
    if (std::abs(z) >= 1.0) return false;
    double m = side_midpoint_radius;
    double center = (1.0 + m * m) / (2.0 * m);
    double radius = center - m;
    for (int k = 0; k < 8; ++k) {
        cplx c = std::polar(center, k * kPi / 4.0);
        if (std::abs(z - c) < radius - tol) return false;
    }
    return true;
}

FuchsianGroup build_bolza()
{
    FuchsianGroup G;
    // Interior angle decreases monotonically from 3pi/4 (Euclidean limit) to 0.
    double lo = 1e-3, hi = 1.0 - 1e-12;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        if (interior_angle(octagon(mid), 0) > kPi / 4.0) lo = mid; else hi = mid;
    }
    G.vertex_radius = 0.5 * (lo + hi);
    G.vertices = octagon(G.vertex_radius);
    if (std::abs(interior_angle(G.vertices, 0) - kPi / 4.0) > 1e-12)
        throw ConstructionError("build_bolza: vertex angle root finding failed");

    cplx mid0 = hyperbolic_midpoint(G.vertices[0], G.vertices[1]);
    G.side_midpoint_radius = std::abs(mid0);
    double d = 2.0 * std::atanh(G.side_midpoint_radius);
    G.translation_length = 2.0 * d;
    for (int k = 0; k < 8; ++k)
        G.generators[k] = Mobius{cplx(std::cosh(d), 0.0), -std::sinh(d) * std::polar(1.0, k * kPi / 4.0)};
    if (G.side_pairing_residual() > 1e-12) throw ConstructionError("build_bolza: side pairings do not match vertices");

    // Follow the vertex cycle starting at vertex 0 through side 0.
    auto nearest_vertex = [&](cplx z) {
        int best = 0;
        for (int j = 1; j < 8; ++j)
            if (std::abs(z - G.vertices[j]) < std::abs(z - G.vertices[best])) best = j;
        if (std::abs(z - G.vertices[best]) > 1e-9) throw ConstructionError("build_bolza: vertex cycle left the vertex set");
        return best;
    };
    std::vector<int> cycle;
    int vtx = 0, side = 0;
    do {
        cycle.push_back(side);
        int image = nearest_vertex(G.generators[side](G.vertices[vtx]));
        int glued_side = (side + 4) % 8;
        int other = (image == glued_side) ? (image + 7) % 8 : image;   // the other side at that vertex
        vtx = image;
        side = other;
        if (cycle.size() > 64) throw ConstructionError("build_bolza: vertex cycle does not close");
    } while (!(vtx == 0 && side == 0));
    G.relation.assign(cycle.rbegin(), cycle.rend());
    if (G.relation_residual() > 1e-10) throw ConstructionError("build_bolza: vertex cycle product is not the identity");
    return G;
}

std::vector<int> GroupBall::word(size_t index) const
{
    std::vector<int> w;
    while (elements[index].letter != 255) {
        w.push_back(elements[index].letter);
        index = elements[index].parent;
    }
    std::reverse(w.begin(), w.end());
    return w;
}

std::vector<uint64_t> growth_series_counts(int max_len)
{
    // (1 + 2x + 2x^2 + 2x^3 + x^4) / (1 - 6x - 6x^2 - 6x^3 + x^4)
    const double num[5] = {1, 2, 2, 2, 1};
    std::vector<int64_t> a(max_len + 1, 0);
    for (int n = 0; n <= max_len; ++n) {
        int64_t v = n < 5 ? static_cast<int64_t>(num[n]) : 0;
        if (n >= 1) v += 6 * a[n - 1];
        if (n >= 2) v += 6 * a[n - 2];
        if (n >= 3) v += 6 * a[n - 3];
        if (n >= 4) v -= a[n - 4];
        a[n] = v;
    }
    return {a.begin(), a.end()};
}

namespace {

class ElementIndex {
public:
    ElementIndex(size_t expected, double tol) : m_tol(tol)
    {
        size_t cap = 1024;
        while (cap < 2 * expected) cap <<= 1;
        m_slots.assign(cap, kEmpty);
        m_mask = cap - 1;
    }

    // Returns true if an equal element (up to sign) is already stored. The
    // rounding error of a product grows with the norms of its factors, so the
    // caller passes that size as `scale`; both signs are probed since the
    // canonical sign is decided by a threshold.
    bool find(const std::vector<GroupElement>& els, const Mobius& c, double scale) const
    {
        return find_signed(els, c, scale) || find_signed(els, Mobius{-c.a, -c.b}, scale);
    }

    bool find_signed(const std::vector<GroupElement>& els, const Mobius& c, double scale) const
    {
        const double x[4] = {c.a.real(), c.a.imag(), c.b.real(), c.b.imag()};
        const double tol = m_tol * std::max(1.0, scale);
        int64_t base[4];
        int lo[4], hi[4];
        for (int i = 0; i < 4; ++i) {
            double u = x[i] / kCell;
            base[i] = static_cast<int64_t>(std::floor(u));
            double frac = u - static_cast<double>(base[i]);
            lo[i] = frac * kCell < tol ? -1 : 0;
            hi[i] = (1.0 - frac) * kCell < tol ? 1 : 0;
        }
        int64_t cell[4];
        for (int d0 = lo[0]; d0 <= hi[0]; ++d0)
            for (int d1 = lo[1]; d1 <= hi[1]; ++d1)
                for (int d2 = lo[2]; d2 <= hi[2]; ++d2)
                    for (int d3 = lo[3]; d3 <= hi[3]; ++d3) {
                        cell[0] = base[0] + d0;
                        cell[1] = base[1] + d1;
                        cell[2] = base[2] + d2;
                        cell[3] = base[3] + d3;
                        for (size_t s = hash(cell) & m_mask; m_slots[s] != kEmpty; s = (s + 1) & m_mask)
                            if (distance_mod_sign(els[m_slots[s]].m, c) <= tol) return true;
                    }
        return false;
    }

    void insert(const Mobius& c, uint32_t idx)
    {
        int64_t cell[4] = {cell_of(c.a.real()), cell_of(c.a.imag()), cell_of(c.b.real()), cell_of(c.b.imag())};
        size_t s = hash(cell) & m_mask;
        while (m_slots[s] != kEmpty) s = (s + 1) & m_mask;
        m_slots[s] = idx;
        if (++m_count * 2 > m_slots.size()) grow();
    }

    void rebuild(const std::vector<GroupElement>& els)
    {
        std::fill(m_slots.begin(), m_slots.end(), kEmpty);
        m_count = 0;
        for (size_t i = 0; i < els.size(); ++i) insert(els[i].m, static_cast<uint32_t>(i));
    }

    bool needs_rebuild() const { return m_grown; }
    void clear_rebuild_flag() { m_grown = false; }

private:
    static constexpr uint32_t kEmpty = 0xffffffffu;
    static constexpr double kCell = 1e-3;

    static int64_t cell_of(double v) { return static_cast<int64_t>(std::floor(v / kCell)); }
    static size_t hash(const int64_t* cell)
    {
        uint64_t h = 0x9e3779b97f4a7c15ull;
        for (int i = 0; i < 4; ++i) {
            uint64_t v = static_cast<uint64_t>(cell[i]);
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
            h ^= h >> 33;
        }
        return static_cast<size_t>(h);
    }
    void grow()
    {
        m_slots.assign(m_slots.size() * 2, kEmpty);
        m_mask = m_slots.size() - 1;
        m_grown = true;
    }

    double m_tol;
    std::vector<uint32_t> m_slots;
    size_t m_mask = 0;
    size_t m_count = 0;
    bool m_grown = false;
};

} // namespace

GroupBall enumerate_group(const FuchsianGroup& group, int max_len, double tol)
{
    require(max_len >= 0 && max_len <= 10, "enumerate_group: word length must be in [0, 10]");
    auto predicted = growth_series_counts(max_len);
    size_t expected = 0;
    for (auto c : predicted) expected += c;

    GroupBall ball;
    ball.elements.reserve(expected + expected / 8);
    ElementIndex index(expected, tol);
    ball.elements.push_back({Mobius::identity(), 0, 255, 0});
    index.insert(Mobius::identity(), 0);
    ball.count_by_length.push_back(1);

    size_t layer_begin = 0, layer_end = 1;
    for (int len = 1; len <= max_len; ++len) {
        size_t found = 0;
        for (size_t i = layer_begin; i < layer_end; ++i) {
            const GroupElement parent = ball.elements[i];
            for (int g = 0; g < 8; ++g) {
                if (parent.letter != 255 && g == group.inverse_index(parent.letter)) continue;
                Mobius c = compose(parent.m, group.generators[g]).canonical();
                if (index.find(ball.elements, c, std::abs(parent.m.a) * std::abs(group.generators[g].a))) continue;
                ball.elements.push_back({c, static_cast<uint32_t>(i), static_cast<uint8_t>(g), static_cast<uint8_t>(len)});
                index.insert(c, static_cast<uint32_t>(ball.elements.size() - 1));
                if (index.needs_rebuild()) {
                    index.rebuild(ball.elements);
                    index.clear_rebuild_flag();
                }
                ++found;
            }
        }
        ball.count_by_length.push_back(found);
        layer_begin = layer_end;
        layer_end = ball.elements.size();
    }
    return ball;
}

} // namespace renvol::fuchsian
