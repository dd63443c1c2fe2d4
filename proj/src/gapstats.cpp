#include "cfarey/gapstats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfarey {

namespace {

using int128 = __int128;

int128 norm128(const RingSpec& ring, std::int64_t a, std::int64_t b) {
    int128 n = static_cast<int128>(a) * a +
               static_cast<int128>(b) * b * ring.normCoeff;
    if (ring.omegaHalfCase) n += static_cast<int128>(a) * b;
    return n;
}

// exact squared numerator of the torus distance between fractions:
// min over nearby lattice shifts lambda of |n - lambda*Q|^2, with
// n = p_i q_j - p_j q_i and Q = q_i q_j.
int128 min_shift_norm(const RingSpec& ring, RingElem n, RingElem Q) {
    const RingElem r = mul(ring, n, conj_elem(ring, Q));
    const double nQ = static_cast<double>(norm(ring, Q));
    const std::int64_t kx = llround(static_cast<double>(r.a) / nQ);
    const std::int64_t ky = llround(static_cast<double>(r.b) / nQ);
    int128 best = -1;
    for (std::int64_t i = -2; i <= 2; ++i) {
        for (std::int64_t j = -2; j <= 2; ++j) {
            const RingElem lam{kx + i, ky + j};
            const RingElem shift = mul(ring, lam, Q);
            const std::int64_t da = checked_sub(n.a, shift.a);
            const std::int64_t db = checked_sub(n.b, shift.b);
            const int128 m = norm128(ring, da, db);
            if (best < 0 || m < best) best = m;
        }
    }
    return best;
}

bool expT_is_integral(double expT) {
    return expT == std::floor(expT) && expT >= 1 && expT < 9.0e18;
}

// rescaled value from the exact integers; >= 1 in floating point whenever
// m * B^2 >= den because division and sqrt round monotonically
double rescaled_from_ints(int128 m, std::int64_t B, std::int64_t nqi, std::int64_t nqj) {
    const int128 num = m * B * B;
    const int128 den = static_cast<int128>(nqi) * nqj;
    return static_cast<double>(
        std::sqrt(static_cast<long double>(num) / static_cast<long double>(den)));
}

struct PairValue {
    double value;
    bool certified; // integer certificate m * B^2 >= nq_i * nq_j checked and true
};

PairValue pair_value(const FareySet& set, std::size_t i, std::size_t j) {
    const RingSpec& ring = set.ring;
    const FareyFraction& fi = set.fractions[i];
    const FareyFraction& fj = set.fractions[j];
    const RingElem n = sub(ring, mul(ring, fi.p, fj.q), mul(ring, fj.p, fi.q));
    const RingElem Q = mul(ring, fi.q, fj.q);
    const int128 m = min_shift_norm(ring, n, Q);
    if (expT_is_integral(set.expT)) {
        const std::int64_t B = static_cast<std::int64_t>(set.expT);
        const int128 num = m * B * B;
        const int128 den = static_cast<int128>(fi.heightSq) * fj.heightSq;
        return {rescaled_from_ints(m, B, fi.heightSq, fj.heightSq), num >= den};
    }
    const double d2 = static_cast<double>(static_cast<long double>(m) /
                                          (static_cast<long double>(fi.heightSq) *
                                           static_cast<long double>(fj.heightSq)));
    return {set.expT * std::sqrt(d2), false};
}

int wrap_cell(int c, int G) {
    c %= G;
    return c < 0 ? c + G : c;
}

// lower bound for the torus distance of points whose wrapped cell-index
// distance from the anchor cell exceeds k
double ring_lower_bound(const RingSpec& ring, int G, int k) {
    const double step = ring.omega.imag() / (G * std::max(1.0, std::abs(ring.omega)));
    return k * step;
}

template <class Fn>
void for_cell_points(const FareySet& set, int ci, int cj, Fn&& fn) {
    const int G = set.grid.cellsPerDim;
    const std::size_t cell = static_cast<std::size_t>(ci) * G + cj;
    const std::int32_t lo = set.grid.cellStart[cell];
    const std::int32_t hi = set.grid.cellStart[cell + 1];
    for (std::int32_t k = lo; k < hi; ++k) fn(set.grid.order[static_cast<std::size_t>(k)]);
}

// nearest distinct neighbour of anchor index ai; returns (index, float distance)
std::pair<std::int32_t, double> grid_nearest(const FareySet& set, std::int32_t ai) {
    const RingSpec& ring = set.ring;
    const int G = set.grid.cellsPerDim;
    const TorusPoint& z = set.fractions[static_cast<std::size_t>(ai)].point;
    const int ci = std::min(G - 1, static_cast<int>(z.u * G));
    const int cj = std::min(G - 1, static_cast<int>(z.v * G));

    double best = HUGE_VAL;
    std::int32_t bestIdx = -1;
    const auto visit = [&](std::int32_t idx) {
        if (idx == ai) return;
        const double d = torus_distance(ring, z, set.fractions[static_cast<std::size_t>(idx)].point);
        if (d < best) {
            best = d;
            bestIdx = idx;
        }
    };

    for (int k = 0;; ++k) {
        if (2 * k - 1 >= G) break; // every cell visited
        if (k == 0) {
            for_cell_points(set, ci, cj, visit);
        } else {
            for (int di = -k; di <= k; ++di) {
                const int i = wrap_cell(ci + di, G);
                for_cell_points(set, i, wrap_cell(cj - k, G), visit);
                for_cell_points(set, i, wrap_cell(cj + k, G), visit);
            }
            for (int dj = -k + 1; dj <= k - 1; ++dj) {
                const int j = wrap_cell(cj + dj, G);
                for_cell_points(set, wrap_cell(ci - k, G), j, visit);
                for_cell_points(set, wrap_cell(ci + k, G), j, visit);
            }
        }
        if (bestIdx >= 0 && best <= ring_lower_bound(ring, G, k)) break;
    }
    return {bestIdx, best};
}

} // namespace

Region Region::rect(double u0, double u1, double v0, double v1) {
    if (!(u0 >= 0 && u0 < u1 && u1 <= 1 && v0 >= 0 && v0 < v1 && v1 <= 1))
        throw std::invalid_argument("Region::rect: need 0 <= u0 < u1 <= 1 and 0 <= v0 < v1 <= 1");
    Region r;
    r.kind = Kind::Rect;
    r.u0 = u0;
    r.u1 = u1;
    r.v0 = v0;
    r.v1 = v1;
    return r;
}

double pair_rescaled_gap(const FareySet& set, std::size_t i, std::size_t j) {
    if (i == j) return 0.0;
    return pair_value(set, i, j).value;
}

GapSample nearest_gaps(const FareySet& set, const Region& region) {
    GapSample sample;
    sample.ring = set.ring;
    sample.t = set.t;
    sample.expT = set.expT;
    sample.region = region;

    for (std::size_t i = 0; i < set.fractions.size(); ++i)
        if (region.contains(set.fractions[i].point))
            sample.anchors.push_back(static_cast<std::int32_t>(i));
    if (sample.anchors.empty())
        throw std::invalid_argument("nearest_gaps: no set point falls in the region");

    const bool exactPath = expT_is_integral(set.expT);
    sample.rescaledGaps.resize(sample.anchors.size());

    if (set.fractions.size() == 1) {
        // degenerate set: the gap is realized by the anchor's own nonzero
        // lattice translates, i.e. the systole 1
        sample.rescaledGaps[0] = set.expT;
        sample.exactCertified = exactPath;
        sample.minGap = sample.maxGap = set.expT;
        return sample;
    }

    int certified = 1;
#pragma omp parallel for schedule(dynamic, 512) reduction(min : certified)
    for (std::size_t a = 0; a < sample.anchors.size(); ++a) {
        const std::int32_t ai = sample.anchors[a];
        const auto [bi, fd] = grid_nearest(set, ai);
        (void)fd;
        const PairValue pv = pair_value(set, static_cast<std::size_t>(ai),
                                        static_cast<std::size_t>(bi));
        sample.rescaledGaps[a] = pv.value;
        certified = std::min(certified, pv.certified ? 1 : 0);
    }

    sample.exactCertified = exactPath && certified == 1;
    const auto [mn, mx] = std::minmax_element(sample.rescaledGaps.begin(), sample.rescaledGaps.end());
    sample.minGap = *mn;
    sample.maxGap = *mx;
    return sample;
}

std::vector<std::pair<double, double>> empirical_cdf(const GapSample& sample,
                                                     const std::vector<double>& deltaGrid) {
    if (!std::is_sorted(deltaGrid.begin(), deltaGrid.end()))
        throw std::invalid_argument("empirical_cdf: grid must be sorted");
    std::vector<double> gaps = sample.rescaledGaps;
    std::sort(gaps.begin(), gaps.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(deltaGrid.size());
    const double n = static_cast<double>(gaps.size());
    for (double d : deltaGrid) {
        const auto it = std::upper_bound(gaps.begin(), gaps.end(), d);
        cdf.emplace_back(d, static_cast<double>(it - gaps.begin()) / n);
    }
    return cdf;
}

GapHistogram empirical_tail_histogram(const GapSample& sample, double binWidth) {
    if (!(binWidth > 0))
        throw std::invalid_argument("empirical_tail_histogram: binWidth must be > 0");
    GapHistogram h;
    h.binWidth = binWidth;
    const double n = static_cast<double>(sample.rescaledGaps.size());
    const int bins = static_cast<int>(std::floor(sample.maxGap / binWidth)) + 1;
    h.density.assign(static_cast<std::size_t>(bins), 0.0);
    for (double g : sample.rescaledGaps) {
        const int b = std::min(bins - 1, static_cast<int>(g / binWidth));
        h.density[static_cast<std::size_t>(b)] += 1.0;
    }
    for (double& d : h.density) d /= n * binWidth;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = b * binWidth;

    std::vector<double> gaps = sample.rescaledGaps;
    std::sort(gaps.begin(), gaps.end());
    h.tailDelta = h.edges;
    h.tailValue.resize(h.tailDelta.size());
    for (std::size_t k = 0; k < h.tailDelta.size(); ++k) {
        const auto it = std::upper_bound(gaps.begin(), gaps.end(), h.tailDelta[k]);
        h.tailValue[k] = static_cast<double>(gaps.end() - it) / n;
    }
    return h;
}

namespace {

// visits all set points in cells within rho of the anchor; exactness of
// boundary ties is decided by the caller through pair_rescaled_gap
template <class Fn>
void for_window_points(const FareySet& set, std::int32_t ai, double rho, Fn&& fn) {
    const RingSpec& ring = set.ring;
    const int G = set.grid.cellsPerDim;
    const TorusPoint& z = set.fractions[static_cast<std::size_t>(ai)].point;
    const double absOmega = std::abs(ring.omega);
    const double duRad = rho * absOmega / ring.omega.imag();
    const double dvRad = rho / ring.omega.imag();
    const int ci = std::min(G - 1, static_cast<int>(z.u * G));
    const int cj = std::min(G - 1, static_cast<int>(z.v * G));
    const int ri = static_cast<int>(duRad * G) + 1;
    const int rj = static_cast<int>(dvRad * G) + 1;
    if (2 * ri + 1 >= G || 2 * rj + 1 >= G) {
        for (std::size_t j = 0; j < set.fractions.size(); ++j)
            fn(static_cast<std::int32_t>(j));
        return;
    }
    for (int di = -ri; di <= ri; ++di)
        for (int dj = -rj; dj <= rj; ++dj)
            for_cell_points(set, wrap_cell(ci + di, G), wrap_cell(cj + dj, G), fn);
}

} // namespace

double window_count_tail(const FareySet& set, int k, double delta, const Region& region) {
    if (k < 0) throw std::invalid_argument("window_count_tail: k must be >= 0");
    if (!(delta > 0)) throw std::invalid_argument("window_count_tail: delta must be > 0");
    const double rho = delta / set.expT;
    if (!(rho <= 0.5))
        throw std::invalid_argument(
            "window_count_tail: delta e^{-t} must be at most systole/2 for injectivity");

    std::vector<std::int32_t> anchors;
    for (std::size_t i = 0; i < set.fractions.size(); ++i)
        if (region.contains(set.fractions[i].point))
            anchors.push_back(static_cast<std::int32_t>(i));
    if (anchors.empty())
        throw std::invalid_argument("window_count_tail: empty region intersection");

    std::int64_t matching = 0;
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : matching)
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const std::int32_t ai = anchors[a];
        const TorusPoint& z = set.fractions[static_cast<std::size_t>(ai)].point;
        int count = 1; // the centre belongs to its own window
        for_window_points(set, ai, rho * (1 + 1e-9), [&](std::int32_t j) {
            if (j == ai) return;
            const double fd =
                torus_distance(set.ring, z, set.fractions[static_cast<std::size_t>(j)].point);
            if (fd > rho * (1 + 1e-9) + 1e-12) return; // cheap prefilter
            if (pair_rescaled_gap(set, static_cast<std::size_t>(ai),
                                  static_cast<std::size_t>(j)) <= delta)
                ++count;
        });
        if (count == k) ++matching;
    }
    return static_cast<double>(matching) / static_cast<double>(anchors.size());
}

std::int64_t cone_count_oracle(const FareySet& set, const FareyFraction& r, double delta) {
    if (delta < 0) throw std::invalid_argument("cone_count_oracle: delta must be >= 0");
    const RingSpec& ring = set.ring;
    const double rho = delta / set.expT;
    if (!(rho <= 0.5))
        throw std::invalid_argument(
            "cone_count_oracle: delta e^{-t} must be at most systole/2 for injectivity");

    const bool exact = expT_is_integral(set.expT);
    const std::int64_t B = static_cast<std::int64_t>(set.expT);
    const std::int64_t nQr = norm(ring, r.q);

    // numerator of the fundamental-domain representative: P - lambda0 Q with
    // P_red / Q = the reduced window centre exactly
    RingElem Pred = r.p;
    {
        const RingElem rc = mul(ring, r.p, conj_elem(ring, r.q));
        const auto fdiv = [&](std::int64_t x) {
            std::int64_t m = x % nQr;
            if (m < 0) m += nQr;
            return (x - m) / nQr;
        };
        const RingElem lam0{fdiv(rc.a), fdiv(rc.b)};
        Pred = sub(ring, r.p, mul(ring, lam0, r.q));
    }

    std::int64_t count = 0;
    const std::vector<RingElem> dens = canonical_denominators(ring, set.normBound);
    for (const RingElem& q0 : dens) {
        for (const RingElem& u : ring.units) {
            const RingElem qt = mul(ring, u, q0);
            const std::int64_t nq = norm(ring, qt);
            // p must satisfy |p - qt * c| <= |qt| rho, c the window centre
            const std::complex<double> w = embed(ring, qt) * r.point.cart;
            const double rad = std::sqrt(static_cast<double>(nq)) * rho;
            detail::scan_lattice_shell(
                ring, w, 0.0, rad * (1 + 1e-9) + 1e-9,
                [&](std::int64_t ma, std::int64_t mb, double) {
                    const RingElem p{ma, mb};
                    if (!is_coprime(ring, p, qt)) return false;
                    // exact acceptance: |p/qt - P_red/Q| rescaled <= delta
                    const RingElem num =
                        sub(ring, mul(ring, p, r.q), mul(ring, qt, Pred));
                    const int128 m = norm128(ring, num.a, num.b);
                    bool ok;
                    if (exact) {
                        ok = rescaled_from_ints(m, B, nq, nQr) <= delta;
                    } else {
                        const double d2 = static_cast<double>(
                            static_cast<long double>(m) /
                            (static_cast<long double>(nq) * static_cast<long double>(nQr)));
                        ok = set.expT * std::sqrt(d2) <= delta;
                    }
                    if (ok) ++count;
                    return false; // keep scanning
                });
        }
    }
    return count;
}

} // namespace cfarey
