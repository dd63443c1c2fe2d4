#include "cfarey/farey.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <unordered_set>

namespace cfarey {

namespace {

std::int64_t mod_pos(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

// e^t, snapped to the nearest integer when t encodes an integral squared
// height (keeps rescaled gaps exact; see gapstats).
double exp_t_snapped(double t) {
    const double et = std::exp(t);
    const double r = std::round(et);
    return (r > 0 && std::abs(et - r) < 1e-6 * std::max(1.0, et)) ? r : et;
}

struct KeyHash {
    std::size_t operator()(const std::array<std::int64_t, 4>& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (std::int64_t v : k) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

// p reduced into the HNF box of the lattice described by lat
RingElem coset_rep(const LatticeTriangular& lat, RingElem p) {
    std::int64_t x = mod_pos(p.a, lat.d1);
    const std::int64_t k = (p.a - x) / lat.d1;
    std::int64_t y = mod_pos(checked_sub(p.b, checked_mul(k, lat.e)), lat.d2);
    return {x, y};
}

TorusPoint exact_fraction_point(const RingSpec& ring, RingElem p, RingElem q) {
    // p/q = p conj(q) / norm(q): exact rational basis coordinates
    const RingElem r = mul(ring, p, conj_elem(ring, q));
    const std::int64_t nq = norm(ring, q);
    const double u = static_cast<double>(mod_pos(r.a, nq)) / static_cast<double>(nq);
    const double v = static_cast<double>(mod_pos(r.b, nq)) / static_cast<double>(nq);
    return torus_point_from_uv(ring, u, v);
}

std::int64_t norm_bound_from_t(double t) {
    const double et = exp_t_snapped(t);
    return static_cast<std::int64_t>(std::floor(et + 1e-9));
}

FareyGrid build_grid(const RingSpec& ring, double expT, const std::vector<FareyFraction>& fr) {
    FareyGrid grid;
    // cell size max(4 e^{-t}, covering diameter / 1024) in basis coordinates
    const double cell = std::max(4.0 / expT, 2.0 * ring.coveringRadius / 1024.0);
    grid.cellsPerDim = std::max(1, static_cast<int>(std::min(4096.0, 1.0 / cell)));
    const int G = grid.cellsPerDim;
    const auto cellOf = [&](const TorusPoint& p) {
        int i = std::min(G - 1, static_cast<int>(p.u * G));
        int j = std::min(G - 1, static_cast<int>(p.v * G));
        return i * G + j;
    };
    std::vector<std::int32_t> counts(static_cast<std::size_t>(G) * G + 1, 0);
    for (const FareyFraction& f : fr) counts[cellOf(f.point) + 1]++;
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    grid.cellStart = counts;
    grid.order.resize(fr.size());
    std::vector<std::int32_t> cursor(grid.cellStart.begin(), grid.cellStart.end() - 1);
    for (std::size_t i = 0; i < fr.size(); ++i)
        grid.order[static_cast<std::size_t>(cursor[cellOf(fr[i].point)]++)] =
            static_cast<std::int32_t>(i);
    return grid;
}

void check_budget(const RingSpec& ring, double expT, std::int64_t maxPoints) {
    const double predicted = ring.mertensConstant * expT * expT;
    if (predicted > 1.2 * static_cast<double>(maxPoints))
        throw std::invalid_argument(
            "enumerate_farey: predicted cardinality " + std::to_string(predicted) +
            " exceeds the memory budget of " + std::to_string(maxPoints) + " points");
}

FareySet enumerate_impl(const RingSpec& ring, double t, double expT,
                        std::int64_t normBound, std::int64_t maxPoints) {
    check_budget(ring, expT, maxPoints);

    FareySet set;
    set.ring = ring;
    set.t = t;
    set.expT = expT;
    set.normBound = normBound;

    const std::vector<RingElem> dens = canonical_denominators(ring, normBound);
    std::vector<std::vector<FareyFraction>> perQ(dens.size());

#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t qi = 0; qi < dens.size(); ++qi) {
        const RingElem q = dens[qi];
        const std::int64_t nq = norm(ring, q);
        const LatticeTriangular lat = principal_lattice_form(ring, q);
        std::vector<FareyFraction>& out = perQ[qi];
        for (std::int64_t x = 0; x < lat.d1; ++x) {
            for (std::int64_t y = 0; y < lat.d2; ++y) {
                const RingElem p{x, y};
                if (!is_coprime(ring, p, q)) continue;
                FareyFraction f;
                f.p = p;
                f.q = q;
                f.heightSq = nq;
                f.point = exact_fraction_point(ring, p, q);
                out.push_back(f);
            }
        }
    }

    // deterministic ordered merge with the key-collision assertion
    std::size_t total = 0;
    for (const auto& v : perQ) total += v.size();
    set.fractions.reserve(total);
    std::unordered_set<std::array<std::int64_t, 4>, KeyHash> keys;
    keys.reserve(total * 2);
    for (const auto& v : perQ) {
        for (const FareyFraction& f : v) {
            if (!keys.insert({f.q.a, f.q.b, f.p.a, f.p.b}).second)
                throw std::logic_error("enumerate_farey: duplicate dedupe key (arithmetic bug)");
            set.fractions.push_back(f);
        }
    }
    set.grid = build_grid(ring, expT, set.fractions);
    return set;
}

} // namespace

std::vector<RingElem> canonical_denominators(const RingSpec& ring, std::int64_t normBound) {
    std::vector<RingElem> dens;
    if (normBound < 1) return dens;
    const double R = std::sqrt(static_cast<double>(normBound));
    const double imw = ring.omega.imag();
    const std::int64_t bMax = static_cast<std::int64_t>(std::floor(R / imw)) + 1;
    for (std::int64_t b = -bMax; b <= bMax; ++b) {
        const double re0 = static_cast<double>(b) * ring.omega.real();
        const std::int64_t aLo = static_cast<std::int64_t>(std::floor(-re0 - R)) - 1;
        const std::int64_t aHi = static_cast<std::int64_t>(std::ceil(-re0 + R)) + 1;
        for (std::int64_t a = aLo; a <= aHi; ++a) {
            const RingElem q{a, b};
            if (q.isZero() || !is_canonical_unit_rep(ring, q)) continue;
            if (norm(ring, q) > normBound) continue;
            dens.push_back(q);
        }
    }
    std::sort(dens.begin(), dens.end(), [&](const RingElem& x, const RingElem& y) {
        const std::int64_t nx = norm(ring, x), ny = norm(ring, y);
        if (nx != ny) return nx < ny;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return dens;
}

FareySet enumerate_farey(const RingSpec& ring, double t, std::int64_t maxPoints) {
    if (t < 0) throw std::invalid_argument("enumerate_farey: t must be >= 0");
    const double expT = exp_t_snapped(t);
    return enumerate_impl(ring, t, expT, norm_bound_from_t(t), maxPoints);
}

FareySet enumerate_farey_height(const RingSpec& ring, double height, std::int64_t maxPoints) {
    if (!(height >= 1))
        throw std::invalid_argument("enumerate_farey_height: height must be >= 1");
    const double hs = height * height;
    const double expT = (std::abs(hs - std::round(hs)) < 1e-9) ? std::round(hs) : hs;
    return enumerate_impl(ring, 2.0 * std::log(height), expT,
                          static_cast<std::int64_t>(std::floor(expT + 1e-9)), maxPoints);
}

std::int64_t count_only(const RingSpec& ring, double t) {
    if (t < 0) throw std::invalid_argument("count_only: t must be >= 0");
    const std::int64_t normBound = norm_bound_from_t(t);
    const std::vector<RingElem> dens = canonical_denominators(ring, normBound);
    std::int64_t total = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : total)
    for (std::size_t qi = 0; qi < dens.size(); ++qi) {
        const RingElem q = dens[qi];
        const LatticeTriangular lat = principal_lattice_form(ring, q);
        std::int64_t c = 0;
        for (std::int64_t x = 0; x < lat.d1; ++x)
            for (std::int64_t y = 0; y < lat.d2; ++y)
                if (is_coprime(ring, RingElem{x, y}, q)) ++c;
        total += c;
    }
    return total;
}

FareySet gaussian_intro_set(const RingSpec& ring, double height, std::int64_t maxPoints) {
    // In a principal ring every fraction reduces to a coprime one of no
    // larger height, so G_T equals F_{2 ln T} as a point set.
    static const std::int64_t classNumberOne[] = {-3, -4, -7, -8, -11, -19, -43, -67, -163};
    const bool principal =
        std::find(std::begin(classNumberOne), std::end(classNumberOne),
                  ring.discriminant) != std::end(classNumberOne);
    if (!principal)
        throw std::invalid_argument(
            "gaussian_intro_set: ring with discriminant " +
            std::to_string(ring.discriminant) +
            " is not principal; the set equality with F_t is unproven there");
    return enumerate_farey_height(ring, height, maxPoints);
}

FareySet farey_set_from_fractions(const RingSpec& ring, double t, double expT,
                                  std::int64_t normBound,
                                  const std::vector<FareyFraction>& fractions) {
    FareySet set;
    set.ring = ring;
    set.t = t;
    set.expT = expT;
    set.normBound = normBound;
    set.fractions.reserve(fractions.size());
    std::unordered_set<std::array<std::int64_t, 4>, KeyHash> keys;
    keys.reserve(fractions.size() * 2);
    for (const FareyFraction& raw : fractions) {
        if (raw.q.isZero()) throw std::invalid_argument("fraction with q = 0");
        FareyFraction f;
        // canonicalize: unit-rotate q, then reduce p into the coset box
        const RingElem qc = canonical_unit_rep(ring, raw.q);
        RingElem u{1, 0};
        for (const RingElem& cand : ring.units)
            if (mul(ring, cand, raw.q) == qc) { u = cand; break; }
        const LatticeTriangular lat = principal_lattice_form(ring, qc);
        f.q = qc;
        f.p = coset_rep(lat, mul(ring, u, raw.p));
        f.heightSq = norm(ring, qc);
        if (f.heightSq > normBound)
            throw std::invalid_argument("fraction above the height bound");
        if (!is_coprime(ring, f.p, f.q))
            throw std::invalid_argument("fraction is not reduced");
        f.point = exact_fraction_point(ring, f.p, f.q);
        if (!keys.insert({f.q.a, f.q.b, f.p.a, f.p.b}).second)
            throw std::logic_error("farey_set_from_fractions: duplicate key");
        set.fractions.push_back(f);
    }
    set.grid = build_grid(ring, expT, set.fractions);
    return set;
}

void save_farey_csv(const FareySet& set, const std::string& path,
                    const std::string& metaHeader) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    if (!metaHeader.empty()) {
        std::size_t pos = 0;
        while (pos < metaHeader.size()) {
            std::size_t nl = metaHeader.find('\n', pos);
            if (nl == std::string::npos) nl = metaHeader.size();
            out << "# " << metaHeader.substr(pos, nl - pos) << "\n";
            pos = nl + 1;
        }
    }
    out << "u,v,p_a,p_b,q_a,q_b,heightSq\n";
    char buf[160];
    for (const FareyFraction& f : set.fractions) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld,%lld,%lld,%lld,%lld\n",
                      f.point.u, f.point.v, static_cast<long long>(f.p.a),
                      static_cast<long long>(f.p.b), static_cast<long long>(f.q.a),
                      static_cast<long long>(f.q.b), static_cast<long long>(f.heightSq));
        out << buf;
    }
}

namespace {
constexpr char kCacheMagic[4] = {'C', 'F', 'R', 'Y'};
constexpr std::uint16_t kCacheVersion = 1;
} // namespace

void save_farey_cache(const FareySet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    char header[16];
    std::memcpy(header, kCacheMagic, 4);
    const std::uint16_t ver = kCacheVersion;
    const std::int16_t disc = static_cast<std::int16_t>(set.ring.discriminant);
    std::memcpy(header + 4, &ver, 2);
    std::memcpy(header + 6, &disc, 2);
    std::memcpy(header + 8, &set.t, 8);
    out.write(header, 16);
    for (const FareyFraction& f : set.fractions) {
        const std::int32_t rec[4] = {
            static_cast<std::int32_t>(f.q.a), static_cast<std::int32_t>(f.q.b),
            static_cast<std::int32_t>(f.p.a), static_cast<std::int32_t>(f.p.b)};
        if (f.q.a != rec[0] || f.q.b != rec[1] || f.p.a != rec[2] || f.p.b != rec[3])
            throw std::runtime_error("fraction coordinates exceed the cache record width");
        out.write(reinterpret_cast<const char*>(rec), 16);
    }
}

FareySet load_farey_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char header[16];
    in.read(header, 16);
    if (in.gcount() != 16 || std::memcmp(header, kCacheMagic, 4) != 0)
        throw std::runtime_error(path + " is not a farey cache file");
    std::uint16_t ver;
    std::int16_t disc;
    double t;
    std::memcpy(&ver, header + 4, 2);
    std::memcpy(&disc, header + 6, 2);
    std::memcpy(&t, header + 8, 8);
    if (ver != kCacheVersion)
        throw std::runtime_error("unsupported cache version " + std::to_string(ver));

    const RingSpec ring = make_ring(disc);
    std::vector<FareyFraction> fractions;
    std::int32_t rec[4];
    while (in.read(reinterpret_cast<char*>(rec), 16)) {
        FareyFraction f;
        f.q = {rec[0], rec[1]};
        f.p = {rec[2], rec[3]};
        fractions.push_back(f);
    }
    const double expT = exp_t_snapped(t);
    return farey_set_from_fractions(ring, t, expT,
                                    static_cast<std::int64_t>(std::floor(expT + 1e-9)),
                                    fractions);
}

} // namespace cfarey
