#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfarey/ring.hpp"
#include "cfarey/torus.hpp"

namespace cfarey {

/// Reduced fraction p/q on the torus. p is the canonical coset
/// representative mod q*O_K, q the canonical associate.
struct FareyFraction {
    RingElem p;
    RingElem q;
    TorusPoint point;
    std::int64_t heightSq = 1; // norm(q)
};

/// Uniform-cell spatial index over the fundamental domain (basis
/// coordinates, toroidal wraparound). CSR layout: the points of cell
/// (i, j) are order[cellStart[i*G+j] .. cellStart[i*G+j+1]).
struct FareyGrid {
    int cellsPerDim = 1;
    std::vector<std::int32_t> cellStart;
    std::vector<std::int32_t> order;
};

/// The deduplicated point set of F_t with exact keys and a grid index.
struct FareySet {
    RingSpec ring;
    double t = 0;
    double expT = 1;            // e^t; exactly height^2 when built from a height
    std::int64_t normBound = 1; // heightSq <= normBound for every fraction
    std::vector<FareyFraction> fractions;
    FareyGrid grid;

    std::int64_t card() const { return static_cast<std::int64_t>(fractions.size()); }
};

/// Canonical denominators: one associate per unit orbit, 0 < norm <= bound,
/// sorted by (norm, a, b).
std::vector<RingElem> canonical_denominators(const RingSpec& ring, std::int64_t normBound);

/// Enumerates F_t exactly and without duplicates. Throws when the predicted
/// cardinality exceeds maxPoints, and std::logic_error on a dedupe-key
/// collision (which would indicate an arithmetic bug).
FareySet enumerate_farey(const RingSpec& ring, double t,
                         std::int64_t maxPoints = 20000000);

/// Same with the height e^{t/2} given directly; keeps e^t exact when the
/// squared height is integral.
FareySet enumerate_farey_height(const RingSpec& ring, double height,
                                std::int64_t maxPoints = 20000000);

/// Streaming cardinality of F_t without storing points.
std::int64_t count_only(const RingSpec& ring, double t);

/// The set G_T of the introduction (no coprimality condition). In a
/// class-number-1 ring this is the same point set as F_{2 ln T}; rejected for
/// other rings.
FareySet gaussian_intro_set(const RingSpec& ring, double height,
                            std::int64_t maxPoints = 20000000);

/// Rebuilds a FareySet from raw fractions: canonicalizes each (p, q),
/// recomputes points exactly, asserts key uniqueness and rebuilds the grid.
FareySet farey_set_from_fractions(const RingSpec& ring, double t, double expT,
                                  std::int64_t normBound,
                                  const std::vector<FareyFraction>& fractions);

/// CSV with columns u,v,p_a,p_b,q_a,q_b,heightSq; metaHeader lines are
/// written first, each prefixed with '#'.
void save_farey_csv(const FareySet& set, const std::string& path,
                    const std::string& metaHeader);

/// Binary cache. 16-byte little-endian header: magic "CFRY", u16 version,
/// i16 D_K, f64 t; then one 16-byte record per fraction:
/// i32 q_a, q_b, p_a, p_b. Points and heights are recomputed on load.
void save_farey_cache(const FareySet& set, const std::string& path);
FareySet load_farey_cache(const std::string& path);

} // namespace cfarey
