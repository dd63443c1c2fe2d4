#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "cfarey/ring.hpp"

namespace cfarey {

/// Point of the torus C/O_K in coordinates of the basis {1, omega}, with the
/// Cartesian embedding cached.
struct TorusPoint {
    double u = 0;
    double v = 0;
    std::complex<double> cart{0, 0};
};

/// Canonical projection C -> C/O_K: basis coordinates reduced mod 1.
TorusPoint reduce(const RingSpec& ring, std::complex<double> z);

/// TorusPoint from basis coordinates (reduced mod 1 if needed).
TorusPoint torus_point_from_uv(const RingSpec& ring, double u, double v);

/// Quotient distance min_{lambda in O_K} |x - y - lambda|.
double torus_distance(const RingSpec& ring, const TorusPoint& x, const TorusPoint& y);

/// Closed annulus A(center, inner, outer) on the torus; empty when
/// inner > outer. genP/genQ record the generating pair when the annulus
/// comes from a fraction q/p (0 otherwise).
struct TorusAnnulus {
    TorusPoint center;
    double inner = 0;
    double outer = 0;
    RingElem genP{0, 0};
    RingElem genQ{0, 0};
};

/// True iff some lattice translate of z lies in the closed annulus.
bool annulus_contains(const RingSpec& ring, const TorusAnnulus& ann, const TorusPoint& z);

/// Monte-Carlo and quadrature knobs, shared across modules and read from CLI
/// flags / the config file.
struct QuadratureConfig {
    int mcGridN = 512;             // stratified grid is mcGridN x mcGridN
    std::uint64_t seed = 20240806ull;
    double quadTol = 1e-4;         // absolute tolerance per delta in limit_cdf
    int mcGridTailN = 2048;        // grid for headline tail numbers
    std::size_t annulusCap = 4000000;
    bool disableCoverShortcut = false; // force actual sampling of full covers
};

/// One annulus family of an (s, delta) system: all torus annuli
/// A(q/p, e^s/delta, e^{s/2}/|p|) with this p and q running over the cosets
/// mod p*O_K that are coprime to p. Membership of z reduces to finding a
/// lattice point q' with coprime residue in the shell
/// [|p| e^s/delta, e^{s/2}] around w = p*z.
struct AnnulusFamily {
    RingElem p;
    double absP = 1;
    double shellLo = 0;            // |p| e^s / delta
    double shellHi = 0;            // e^{s/2}
    LatticeTriangular lat;         // triangular form of p*O_K
    std::vector<std::uint8_t> coprime; // flag per residue index, size norm(p)
};

/// The finite truncated family S_M of torus annuli defining f_s(delta).
/// `annuli` is the explicit list (one entry per coprime coset); `families`
/// is the per-denominator form used by the sampling kernel. Hand-built
/// systems may carry only `annuli`.
struct AnnulusSystem {
    RingSpec ring;
    double delta = 0;
    double s = 0;
    std::vector<TorusAnnulus> annuli;
    std::vector<AnnulusFamily> families;
    bool useFamilies = false;
};

struct MeasureEstimate {
    double value = 0;      // fraction of the torus covered, in [0, 1]
    double stderrEst = 0;  // binomial standard error
    std::int64_t covered = 0;
    std::int64_t total = 0;
};

/// True iff z (given by Cartesian embedding) is covered by the system.
bool annulus_system_covers(const AnnulusSystem& sys, const TorusPoint& z);

/// Normalized Lebesgue measure of the union: stratified N x N jittered grid
/// in basis coordinates, one sample per cell, fixed per-row seeds. Exact 1 is
/// returned when a unit-denominator family provably covers the torus.
/// Deterministic for fixed seed and N, independent of thread count.
MeasureEstimate union_measure(const AnnulusSystem& sys, const QuadratureConfig& cfg);

namespace detail {

/// Enumerates lattice points m + n*omega in the closed shell
/// [rlo, rhi] around w (near rows first) and calls accept(m, n, dsq) for each;
/// stops early when accept returns true. Returns true if stopped.
template <class F>
bool scan_lattice_shell(const RingSpec& ring, std::complex<double> w,
                        double rlo, double rhi, F&& accept) {
    if (rhi < 0 || rhi < rlo) return false;
    const double imw = ring.omega.imag();
    const double rew = ring.omega.real();
    const double rlo2 = rlo > 0 ? rlo * rlo : 0.0;
    const double rhi2 = rhi * rhi;
    const double eps = 1e-9;

    const std::int64_t nLo = static_cast<std::int64_t>(std::ceil((w.imag() - rhi) / imw - eps));
    const std::int64_t nHi = static_cast<std::int64_t>(std::floor((w.imag() + rhi) / imw + eps));
    const std::int64_t nMid = llround(w.imag() / imw);

    auto scanRow = [&](std::int64_t n) -> bool {
        const double dy = w.imag() - static_cast<double>(n) * imw;
        const double dy2 = dy * dy;
        if (dy2 > rhi2 + eps) return false;
        const double cx = w.real() - static_cast<double>(n) * rew;
        const double dx = std::sqrt(std::max(0.0, rhi2 - dy2)) + eps;
        double dxin = -1;
        if (rlo2 - dy2 > 0) dxin = std::sqrt(rlo2 - dy2);

        auto scanSeg = [&](double lo, double hi) -> bool {
            const std::int64_t mLo = static_cast<std::int64_t>(std::ceil(lo));
            const std::int64_t mHi = static_cast<std::int64_t>(std::floor(hi));
            for (std::int64_t m = mLo; m <= mHi; ++m) {
                const double ddx = cx - static_cast<double>(m);
                const double dsq = ddx * ddx + dy2;
                if (dsq >= rlo2 && dsq <= rhi2 && accept(m, n, dsq)) return true;
            }
            return false;
        };

        if (dxin <= 0)
            return scanSeg(cx - dx, cx + dx);
        return scanSeg(cx - dx, cx - dxin + eps) || scanSeg(cx + dxin - eps, cx + dx);
    };

    // near rows first so that early-exit callers terminate quickly
    if (nMid >= nLo && nMid <= nHi && scanRow(nMid)) return true;
    for (std::int64_t k = 1;; ++k) {
        const std::int64_t lo = nMid - k, hi = nMid + k;
        const bool loOk = lo >= nLo, hiOk = hi <= nHi;
        if (!loOk && !hiOk) break;
        if (loOk && scanRow(lo)) return true;
        if (hiOk && scanRow(hi)) return true;
    }
    return false;
}

std::size_t residue_index(const LatticeTriangular& lat, std::int64_t m, std::int64_t n);

} // namespace detail

} // namespace cfarey
