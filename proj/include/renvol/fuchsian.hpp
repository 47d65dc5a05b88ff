#pragma once

#include "renvol/common.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace renvol::fuchsian {

/// Disk automorphism z -> (a z + b) / (conj(b) z + conj(a)) with |a|^2 - |b|^2 = 1.
struct Mobius {
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};

    static Mobius identity() { return {}; }
    cplx operator()(cplx z) const { return (a * z + b) / (std::conj(b) * z + std::conj(a)); }
    cplx derivative(cplx z) const
    {
        cplx d = std::conj(b) * z + std::conj(a);
        return 1.0 / (d * d);
    }
    Mobius inverse() const { return {std::conj(a), -b}; }
    double det() const { return std::norm(a) - std::norm(b); }
    /// Representative with the sign fixed, so g and -g compare equal.
    Mobius canonical() const;
};

/// this(other(z)); the determinant stays 1 up to rounding.
Mobius compose(const Mobius& f, const Mobius& g);

/// Checked application: throws PreconditionError if |z| >= 1.
cplx mobius_apply(const Mobius& g, cplx z);

/// Maximum entrywise distance between g and +-h.
double distance_mod_sign(const Mobius& g, const Mobius& h);

/// Hyperbolic midpoint of two points of the unit disk.
cplx hyperbolic_midpoint(cplx p, cplx q);
double hyperbolic_distance(cplx p, cplx q);

/// Regular hyperbolic octagon with interior angles pi/4 and its
/// side pairings; side k runs from vertex k to vertex k+1 and is glued to
/// side k+4 by generator k.
struct FuchsianGroup {
    std::array<cplx, 8> vertices;
    std::array<Mobius, 8> generators;          // generators[k+4] == inverse(generators[k])
    std::vector<int> relation;                // product of generators in left-to-right order
    double vertex_radius = 0.0;
    double side_midpoint_radius = 0.0;
    double translation_length = 0.0;          // hyperbolic displacement of each generator

    int inverse_index(int k) const { return (k + 4) % 8; }
    Mobius word(const std::vector<int>& letters) const;
    /// max over k of |g_k(v_k) - v_{k+5}| + |g_k(v_{k+1}) - v_{k+4}|
    double side_pairing_residual() const;
    /// Distance of the relation word from +-identity.
    double relation_residual() const;
    /// True when z lies in the closed octagon (within tol).
    bool contains(cplx z, double tol = 1e-12) const;
};

/// Constructs the Bolza group. The vertex radius is found by root finding the
/// interior angle; side pairings are translations through the side midpoints;
/// the relation is found by following the vertex cycle.
FuchsianGroup build_bolza();

/// Interior angle of the geodesic polygon at vertex k.
double interior_angle(const std::array<cplx, 8>& vertices, int k);

struct GroupElement {
    Mobius m;
    uint32_t parent;   // index of the prefix word; the identity is its own parent
    uint8_t letter;    // last generator, 255 for the identity
    uint8_t length;
};

/// Group elements of word length <= max_len, freely reduced, deduplicated up
/// to sign within tol times the norm of the product factors, ordered by length then lexicographically.
struct GroupBall {
    std::vector<GroupElement> elements;
    std::vector<size_t> count_by_length;   // newly found elements per length
    std::vector<int> word(size_t index) const;
};

GroupBall enumerate_group(const FuchsianGroup& group, int max_len, double tol = 1e-9);

/// Number of elements of each word length predicted by the growth series of
/// the surface group of genus 2 with its standard presentation.
std::vector<uint64_t> growth_series_counts(int max_len);

} // namespace renvol::fuchsian
