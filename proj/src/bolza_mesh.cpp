#include "renvol/bolza_mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace renvol {

namespace {

int find_root(std::vector<int>& parent, int x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

} // namespace

BolzaMesh BolzaMesh::build(std::shared_ptr<const fuchsian::FuchsianGroup> group, int refinement)
{
    if (refinement < 1 || refinement > 7) throw PreconditionError("BOLZA refinement must be in [1, 7]");
    BolzaMesh M;
    M.m_group = group;
    M.m_refinement = refinement;
    const auto& G = *group;

    // Base: center, eight corners, eight side midpoints; two triangles per octant.
    M.m_chart.push_back(0.0);
    M.m_side_mask.push_back(0);
    for (int k = 0; k < 8; ++k) {
        M.m_chart.push_back(G.vertices[k]);
        M.m_side_mask.push_back(static_cast<uint8_t>((1u << k) | (1u << ((k + 7) % 8))));
    }
    for (int k = 0; k < 8; ++k) {
        M.m_chart.push_back(fuchsian::hyperbolic_midpoint(G.vertices[k], G.vertices[(k + 1) % 8]));
        M.m_side_mask.push_back(static_cast<uint8_t>(1u << k));
    }
    for (int k = 0; k < 8; ++k) {
        int vk = 1 + k, vk1 = 1 + (k + 1) % 8, mk = 9 + k;
        M.m_tris.push_back({0, vk, mk});
        M.m_tris.push_back({0, mk, vk1});
    }

    for (int r = 0; r < refinement; ++r) {
        std::map<std::pair<int, int>, int> mids;
        auto midpoint = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = mids.find(key);
            if (it != mids.end()) return it->second;
            int id = static_cast<int>(M.m_chart.size());
            M.m_chart.push_back(fuchsian::hyperbolic_midpoint(M.m_chart[a], M.m_chart[b]));
            M.m_side_mask.push_back(M.m_side_mask[a] & M.m_side_mask[b]);
            mids.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(4 * M.m_tris.size());
        for (const auto& t : M.m_tris) {
            int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({ab, t[1], bc});
            next.push_back({ca, bc, t[2]});
            next.push_back({ab, bc, ca});
        }
        M.m_tris.swap(next);
    }

    // Side gluing: every vertex on side k must map onto a vertex of side k+4.
    const int nv = static_cast<int>(M.m_chart.size());
    std::vector<std::vector<int>> on_side(8);
    for (int v = 0; v < nv; ++v)
        for (int k = 0; k < 8; ++k)
            if (M.m_side_mask[v] & (1u << k)) on_side[k].push_back(v);
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    for (int k = 0; k < 8; ++k) {
        int opp = (k + 4) % 8;
        if (on_side[k].size() != on_side[opp].size()) throw ConstructionError("BolzaMesh: paired sides have different vertex counts");
        for (int v : on_side[k]) {
            cplx img = G.generators[k](M.m_chart[v]);
            int best = -1;
            double bd = 1e300;
            for (int w : on_side[opp]) {
                double d = std::abs(M.m_chart[w] - img);
                if (d < bd) {
                    bd = d;
                    best = w;
                }
            }
            if (bd > 1e-9) throw ConstructionError("BolzaMesh: side vertex has no glued partner");
            M.m_glue.push_back({v, best, k});
            int a = find_root(parent, v), b = find_root(parent, best);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    M.m_dof.assign(nv, -1);
    std::vector<int> root_to_dof(nv, -1);
    for (int v = 0; v < nv; ++v) {
        int r = find_root(parent, v);
        if (root_to_dof[r] < 0) {
            root_to_dof[r] = static_cast<int>(M.m_canonical.size());
            M.m_canonical.push_back(v);
        }
        M.m_dof[v] = root_to_dof[r];
    }

    // Manifold check on the glued complex: each edge has exactly two faces.
    std::map<std::pair<int, int>, int> edge_faces;
    for (const auto& t : M.m_tris)
        for (int e = 0; e < 3; ++e) {
            int a = M.m_dof[t[e]], b = M.m_dof[t[(e + 1) % 3]];
            if (a == b) throw ConstructionError("BolzaMesh: degenerate glued triangle");
            ++edge_faces[std::minmax(a, b)];
        }
    for (const auto& [e, n] : edge_faces)
        if (n != 2) throw ConstructionError("BolzaMesh: glued edge is not shared by exactly two faces");
    M.m_euler = static_cast<int>(M.m_canonical.size()) - static_cast<int>(edge_faces.size()) + static_cast<int>(M.m_tris.size());
    if (M.m_euler != -2) throw ConstructionError("BolzaMesh: glued surface does not have genus two");

    for (const auto& t : M.m_tris) {
        cplx a = M.m_chart[t[0]], b = M.m_chart[t[1]], c = M.m_chart[t[2]];
        double twice = std::imag(std::conj(b - a) * (c - a));
        if (!(twice > 0.0)) throw ConstructionError("BolzaMesh: triangle with non-positive orientation");
        M.m_area.push_back(0.5 * twice);
        // grad of barycentric lambda_i is the rotated opposite edge over twice the area
        auto rot = [&](cplx e) { return cplx(e.imag(), -e.real()) / twice; };
        M.m_grad.push_back({rot(c - b), rot(a - c), rot(b - a)});
        M.m_max_edge = std::max({M.m_max_edge, std::abs(b - a), std::abs(c - b), std::abs(a - c)});
    }
    return M;
}

cplx BolzaMesh::centroid(size_t t) const
{
    const auto& tri = m_tris[t];
    return (m_chart[tri[0]] + m_chart[tri[1]] + m_chart[tri[2]]) / 3.0;
}

double BolzaMesh::hyperbolic_area() const
{
    std::vector<double> w(m_tris.size());
    for (size_t t = 0; t < m_tris.size(); ++t) w[t] = m_area[t] * poincare_rho2(centroid(t));
    return pairwise_sum(w);
}

double transition_residual(const BolzaMesh& mesh, const ChartField& f, int side)
{
    require(f.values.size() == mesh.num_chart_vertices(), "transition_residual: field is not sampled on chart vertices");
    const auto& g = mesh.group().generators.at(side);
    double r = 0.0;
    for (const auto& gl : mesh.glue()) {
        if (gl.side != side) continue;
        cplx z = mesh.chart(gl.from);
        cplx gp = g.derivative(z);
        cplx pulled;
        switch (f.rank) {
        case ChartRank::Scalar: pulled = f.values[gl.to]; break;
        case ChartRank::Density: pulled = f.values[gl.to] * std::norm(gp); break;
        default:
            if (f.weight % 2 == 0) {
                pulled = f.values[gl.to];
                for (int i = 0; i < std::abs(f.weight) / 2; ++i) pulled = f.weight > 0 ? pulled * gp : pulled / gp;
            } else {
                pulled = f.values[gl.to] * std::pow(gp, 0.5 * f.weight);
            }
            break;
        }
        r = std::max(r, std::abs(pulled - f.values[gl.from]));
    }
    return r;
}

double transition_residual(const BolzaMesh& mesh, const ChartField& f)
{
    double r = 0.0;
    for (int k = 0; k < 8; ++k) r = std::max(r, transition_residual(mesh, f, k));
    return r;
}

std::vector<double> to_dofs(const BolzaMesh& mesh, const ChartField& f)
{
    require(f.rank == ChartRank::Scalar, "to_dofs: only scalar fields descend to the surface");
    std::vector<double> out(mesh.num_dofs());
    for (size_t d = 0; d < out.size(); ++d) out[d] = f.values[mesh.representative(static_cast<int>(d))].real();
    return out;
}

} // namespace renvol
