#include "cfarey/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "cfarey/prng.hpp"

namespace cfarey::reference {

std::vector<double> nearest_gaps_bruteforce(const FareySet& set, const Region& region) {
    std::vector<double> gaps;
    const std::size_t n = set.fractions.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!region.contains(set.fractions[i].point)) continue;
        if (n == 1) {
            gaps.push_back(set.expT); // systole gap of the degenerate set
            continue;
        }
        double best = HUGE_VAL;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            best = std::min(best, torus_distance(set.ring, set.fractions[i].point,
                                                 set.fractions[j].point));
        }
        gaps.push_back(set.expT * best);
    }
    if (gaps.empty())
        throw std::invalid_argument("nearest_gaps_bruteforce: empty region intersection");
    return gaps;
}

MeasureEstimate union_measure_serial(const AnnulusSystem& sys, const QuadratureConfig& cfg) {
    const int N = cfg.mcGridN;
    if (N < 8) throw std::invalid_argument("union_measure_serial: grid N < 8");

    MeasureEstimate est;
    est.total = static_cast<std::int64_t>(N) * N;

    const double absOmega = std::abs(sys.ring.omega);
    const bool haveAnnuli = !sys.annuli.empty() || !sys.useFamilies;
    if (cfg.disableCoverShortcut) {
        // fall through to actual sampling
    } else if (haveAnnuli) {
        for (const TorusAnnulus& ann : sys.annuli) {
            if (ann.inner <= ann.outer && ann.outer - ann.inner >= absOmega) {
                est.value = 1.0;
                est.covered = est.total;
                return est;
            }
        }
    } else {
        for (const AnnulusFamily& fam : sys.families) {
            if (fam.lat.d1 * fam.lat.d2 == 1 && fam.shellHi - fam.shellLo >= absOmega) {
                est.value = 1.0;
                est.covered = est.total;
                return est;
            }
        }
    }

    std::int64_t covered = 0;
    const double invN = 1.0 / static_cast<double>(N);
    for (int row = 0; row < N; ++row) {
        SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(row)));
        for (int col = 0; col < N; ++col) {
            const double u = (static_cast<double>(row) + rng.u01()) * invN;
            const double v = (static_cast<double>(col) + rng.u01()) * invN;
            const TorusPoint z = torus_point_from_uv(sys.ring, u, v);
            bool hit = false;
            if (haveAnnuli) {
                for (const TorusAnnulus& ann : sys.annuli)
                    if (annulus_contains(sys.ring, ann, z)) {
                        hit = true;
                        break;
                    }
            } else {
                hit = annulus_system_covers(sys, z);
            }
            if (hit) ++covered;
        }
    }

    est.covered = covered;
    est.value = static_cast<double>(covered) / static_cast<double>(est.total);
    est.stderrEst = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) /
                              static_cast<double>(est.total));
    return est;
}

std::vector<TorusPoint> farey_points_bruteforce(const RingSpec& ring, double height) {
    const std::int64_t normBound = llround(height * height);
    std::vector<TorusPoint> pts;
    const double imw = ring.omega.imag();
    const double rew = ring.omega.real();
    const std::int64_t qbMax = static_cast<std::int64_t>(height / imw) + 1;
    for (std::int64_t qb = -qbMax; qb <= qbMax; ++qb) {
        for (std::int64_t qa = -static_cast<std::int64_t>(height + std::abs(rew * qb)) - 1;
             qa <= static_cast<std::int64_t>(height + std::abs(rew * qb)) + 1; ++qa) {
            const RingElem q{qa, qb};
            if (q.isZero() || norm(ring, q) > normBound) continue;
            const double pRad =
                std::sqrt(static_cast<double>(norm(ring, q))) * (ring.coveringRadius + 1);
            const std::int64_t pbMax = static_cast<std::int64_t>(pRad / imw) + 1;
            for (std::int64_t pb = -pbMax; pb <= pbMax; ++pb) {
                const std::int64_t width =
                    static_cast<std::int64_t>(pRad + std::abs(rew * pb)) + 1;
                for (std::int64_t pa = -width; pa <= width; ++pa) {
                    const RingElem p{pa, pb};
                    if (std::abs(embed(ring, p)) > pRad + 1e-9) continue;
                    if (!is_coprime(ring, p, q)) continue;
                    const std::complex<double> zf = embed(ring, p) / embed(ring, q);
                    const TorusPoint z = reduce(ring, zf);
                    bool dup = false;
                    for (const TorusPoint& w : pts)
                        if (torus_distance(ring, z, w) < 1e-9) {
                            dup = true;
                            break;
                        }
                    if (!dup) pts.push_back(z);
                }
            }
        }
    }
    return pts;
}

} // namespace cfarey::reference
