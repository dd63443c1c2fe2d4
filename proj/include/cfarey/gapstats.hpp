#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cfarey/farey.hpp"

namespace cfarey {

/// Anchor-selection region: the whole torus or a basis-coordinate rectangle
/// [u0,u1) x [v0,v1) with positive area.
struct Region {
    enum class Kind { Whole, Rect };
    Kind kind = Kind::Whole;
    double u0 = 0, u1 = 1, v0 = 0, v1 = 1;

    static Region whole() { return Region{}; }
    static Region rect(double u0, double u1, double v0, double v1);

    bool contains(const TorusPoint& p) const {
        if (kind == Kind::Whole) return true;
        return p.u >= u0 && p.u < u1 && p.v >= v0 && p.v < v1;
    }
    double areaFraction() const {
        return kind == Kind::Whole ? 1.0 : (u1 - u0) * (v1 - v0);
    }
};

/// The empirical measure mu_{t,B}: rescaled nearest-neighbour gaps
/// e^t d(r, F_t \ {r}) for anchors r in the region.
struct GapSample {
    RingSpec ring;
    double t = 0;
    double expT = 1;
    Region region;
    std::vector<std::int32_t> anchors;    // indices into the FareySet
    std::vector<double> rescaledGaps;     // one value per anchor, same order
    // every rescaled gap passed the integer certificate m * B^2 >= nq * nq'
    // (only available when e^t is integral)
    bool exactCertified = false;
    double minGap = 0;
    double maxGap = 0;
};

/// Rescaled distance between fractions i and j of the set, computed through
/// the exact integer route sqrt(m B^2 / (nq_i nq_j)) when e^t = B is
/// integral (then the value is >= 1 by construction whenever it should be).
double pair_rescaled_gap(const FareySet& set, std::size_t i, std::size_t j);

/// Nearest-neighbour gaps for all anchors in the region, found by
/// expanding-ring search over the grid with wraparound. A single-point set
/// gets the gap via its own nonzero lattice translates (= the systole).
GapSample nearest_gaps(const FareySet& set, const Region& region);

/// Right-continuous empirical CDF evaluated on a sorted grid of deltas.
std::vector<std::pair<double, double>> empirical_cdf(const GapSample& sample,
                                                     const std::vector<double>& deltaGrid);

/// Density histogram (total mass 1) plus the tail function at bin edges.
struct GapHistogram {
    double binWidth = 0;
    std::vector<double> edges;    // bin k covers [edges[k], edges[k+1])
    std::vector<double> density;
    std::vector<double> tailDelta;
    std::vector<double> tailValue; // fraction of gaps > tailDelta[k]
};
GapHistogram empirical_tail_histogram(const GapSample& sample, double binWidth);

/// Fine-scale tail function F_t(k, closed disk of radius delta, region):
/// fraction of anchors whose closed window of radius delta e^{-t} contains
/// exactly k set points (the anchor counts). Requires delta e^{-t} <
/// systole/2 so the projection is injective on the window.
double window_count_tail(const FareySet& set, int k, double delta, const Region& region);

/// Dynamical counting oracle: the number of coprime pairs (p, q) with
/// |q| <= e^{t/2} and p/q in the window of radius delta e^{-t} around r.
/// Equals |O_K^x| times the window count of r.
std::int64_t cone_count_oracle(const FareySet& set, const FareyFraction& r, double delta);

} // namespace cfarey
