#pragma once

#include <vector>

#include "cfarey/gapstats.hpp"

namespace cfarey::reference {

// Serial reference implementations. They trade speed for obviousness and are
// kept as oracles for the parallel kernels (and for the benchmark target).

/// O(n^2) nearest-neighbour gaps over the plain quotient distance.
std::vector<double> nearest_gaps_bruteforce(const FareySet& set, const Region& region);

/// union_measure with the identical sampling pattern, evaluated serially and
/// through the per-annulus lattice scan.
MeasureEstimate union_measure_serial(const AnnulusSystem& sys, const QuadratureConfig& cfg);

/// Naive Farey enumeration: every coprime pair with |q| <= height and
/// |p| <= |q| (coveringRadius + 1), reduced to the torus and deduplicated by
/// distance < 1e-9.
std::vector<TorusPoint> farey_points_bruteforce(const RingSpec& ring, double height);

} // namespace cfarey::reference
