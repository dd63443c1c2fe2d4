#include "cfarey/torus.hpp"

#include <cmath>
#include <stdexcept>

#include "cfarey/prng.hpp"

namespace cfarey {

namespace {

double wrap01(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0; // tiny negative x can round to exactly 1
    return r;
}

} // namespace

TorusPoint torus_point_from_uv(const RingSpec& ring, double u, double v) {
    TorusPoint p;
    p.u = wrap01(u);
    p.v = wrap01(v);
    p.cart = std::complex<double>(p.u, 0) + p.v * ring.omega;
    return p;
}

TorusPoint reduce(const RingSpec& ring, std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("reduce: nonfinite input");
    const double v = z.imag() / ring.omega.imag();
    const double u = z.real() - v * ring.omega.real();
    return torus_point_from_uv(ring, u, v);
}

double torus_distance(const RingSpec& ring, const TorusPoint& x, const TorusPoint& y) {
    // Round the basis-coordinate difference to the nearest lattice vector,
    // then take the exact minimum over the 5x5 block of neighbouring shifts.
    const double du = x.u - y.u;
    const double dv = x.v - y.v;
    const double n1 = std::round(du);
    const double n2 = std::round(dv);
    double best = HUGE_VAL;
    for (int i = -2; i <= 2; ++i) {
        for (int j = -2; j <= 2; ++j) {
            const double cu = du - n1 - i;
            const double cv = dv - n2 - j;
            const double re = cu + cv * ring.omega.real();
            const double im = cv * ring.omega.imag();
            const double d2 = re * re + im * im;
            if (d2 < best) best = d2;
        }
    }
    return std::sqrt(best);
}

bool annulus_contains(const RingSpec& ring, const TorusAnnulus& ann, const TorusPoint& z) {
    if (ann.inner > ann.outer) return false; // empty annulus
    // width >= |omega| makes the annulus project onto the whole torus: walking
    // the lattice changes |w - lambda| by at most |omega| per step, so the
    // value set cannot jump over an interval of that length.
    if (ann.outer - ann.inner >= std::abs(ring.omega)) return true;
    const std::complex<double> w = z.cart - ann.center.cart;
    return detail::scan_lattice_shell(ring, w, ann.inner, ann.outer,
                                      [](std::int64_t, std::int64_t, double) { return true; });
}

namespace detail {

std::size_t residue_index(const LatticeTriangular& lat, std::int64_t m, std::int64_t n) {
    std::int64_t x = m % lat.d1;
    if (x < 0) x += lat.d1;
    const std::int64_t k = (m - x) / lat.d1;
    std::int64_t y = (n - k * lat.e) % lat.d2;
    if (y < 0) y += lat.d2;
    return static_cast<std::size_t>(x * lat.d2 + y);
}

} // namespace detail

bool annulus_system_covers(const AnnulusSystem& sys, const TorusPoint& z) {
    if (sys.useFamilies) {
        for (const AnnulusFamily& fam : sys.families) {
            if (fam.shellLo > fam.shellHi) continue;
            const std::complex<double> w = z.cart * embed(sys.ring, fam.p);
            const bool hit = detail::scan_lattice_shell(
                sys.ring, w, fam.shellLo, fam.shellHi,
                [&](std::int64_t m, std::int64_t n, double) {
                    return fam.coprime[detail::residue_index(fam.lat, m, n)] != 0;
                });
            if (hit) return true;
        }
        return false;
    }
    for (const TorusAnnulus& ann : sys.annuli)
        if (annulus_contains(sys.ring, ann, z)) return true;
    return false;
}

MeasureEstimate union_measure(const AnnulusSystem& sys, const QuadratureConfig& cfg) {
    const int N = cfg.mcGridN;
    if (N < 8) throw std::invalid_argument("union_measure: grid N < 8");

    MeasureEstimate est;
    est.total = static_cast<std::int64_t>(N) * N;

    // provable full cover: a unit-denominator family whose shell is at least
    // |omega| wide reaches every point of the torus
    const double absOmega = std::abs(sys.ring.omega);
    if (cfg.disableCoverShortcut) {
        // fall through to actual sampling
    } else if (sys.useFamilies) {
        for (const AnnulusFamily& fam : sys.families) {
            if (fam.lat.d1 * fam.lat.d2 == 1 && fam.shellHi - fam.shellLo >= absOmega) {
                est.value = 1.0;
                est.covered = est.total;
                return est;
            }
        }
    } else {
        for (const TorusAnnulus& ann : sys.annuli) {
            if (ann.inner <= ann.outer && ann.outer - ann.inner >= absOmega) {
                est.value = 1.0;
                est.covered = est.total;
                return est;
            }
        }
    }

    std::int64_t covered = 0;
    const double invN = 1.0 / static_cast<double>(N);
#pragma omp parallel for reduction(+ : covered) schedule(static)
    for (int row = 0; row < N; ++row) {
        SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(row)));
        std::int64_t rowHits = 0;
        for (int col = 0; col < N; ++col) {
            const double u = (static_cast<double>(row) + rng.u01()) * invN;
            const double v = (static_cast<double>(col) + rng.u01()) * invN;
            const TorusPoint z = torus_point_from_uv(sys.ring, u, v);
            if (annulus_system_covers(sys, z)) ++rowHits;
        }
        covered += rowHits;
    }

    est.covered = covered;
    est.value = static_cast<double>(covered) / static_cast<double>(est.total);
    est.stderrEst = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) /
                              static_cast<double>(est.total));
    return est;
}

} // namespace cfarey
