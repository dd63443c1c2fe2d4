#include "cfarey/limitdist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "cfarey/farey.hpp"
#include "cfarey/prng.hpp"

namespace cfarey {

namespace {

std::int64_t mod_pos(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

AnnulusFamily make_family(const RingSpec& ring, RingElem p) {
    AnnulusFamily fam;
    fam.p = p;
    fam.absP = std::abs(embed(ring, p));
    fam.lat = principal_lattice_form(ring, p);
    const std::int64_t np = norm(ring, p);
    fam.coprime.assign(static_cast<std::size_t>(np), 0);
    for (std::int64_t x = 0; x < fam.lat.d1; ++x)
        for (std::int64_t y = 0; y < fam.lat.d2; ++y)
            if (is_coprime(ring, RingElem{x, y}, p))
                fam.coprime[detail::residue_index(fam.lat, x, y)] = 1;
    return fam;
}

// deterministic per-(s, delta) seed so results do not depend on the order of
// integrand evaluations
std::uint64_t node_seed(std::uint64_t base, double s, double delta) {
    return mix_seed(mix_seed(base, std::bit_cast<std::uint64_t>(s)),
                    std::bit_cast<std::uint64_t>(delta));
}

struct FsRegime {
    enum Kind { Zero, One, Single, Full } kind;
};

FsRegime classify(const RingSpec& ring, double s, double delta) {
    const double absOmega = std::abs(ring.omega);
    if (delta <= 0 || s >= 2.0 * std::log(delta)) return {FsRegime::Zero};
    if (delta >= 4.0 * absOmega) {
        const auto [sm, sp] = s_pm(ring, delta);
        if (s >= sm && s <= sp) return {FsRegime::One};
    }
    if (s >= 2.0 * std::log(absOmega) && s <= std::log(delta / 2.0))
        return {FsRegime::One};
    if (s >= single_annulus_threshold(ring)) return {FsRegime::Single};
    return {FsRegime::Full};
}

struct SimpsonResult {
    double value = 0;
    double errEst = 0;
    double stderrEst = 0; // RSS of node standard errors times weights
    int nodes = 0;
};

// adaptive Simpson on a noisy integrand; plain composite values (no
// Richardson correction) so nonnegative nodes give a nonnegative integral
template <class F>
void simpson_rec(F& f, double a, double m, double b, double fa, double fm, double fb,
                 double sa, double sm_, double sb, double whole, double tol, int depth,
                 SimpsonResult& out) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const auto [flm, slm] = f(lm);
    const auto [frm, srm] = f(rm);
    out.nodes += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = std::abs(left + right - whole) / 15.0;
    const double noise = (b - a) * std::max({sa, sm_, sb, slm, srm});
    if (depth <= 0 || err <= tol || err <= 3.0 * noise || (b - a) < 1e-6) {
        out.value += left + right;
        out.errEst += err;
        const double w = (b - a) / 6.0;
        out.stderrEst = std::hypot(out.stderrEst,
                                   w * std::sqrt(sa * sa + 16.0 * (slm * slm + srm * srm) +
                                                 4.0 * sm_ * sm_ + sb * sb));
        return;
    }
    simpson_rec(f, a, lm, m, fa, flm, fm, sa, slm, sm_, left, tol / 2, depth - 1, out);
    simpson_rec(f, m, rm, b, fm, frm, fb, sm_, srm, sb, right, tol / 2, depth - 1, out);
}

template <class F>
SimpsonResult adaptive_simpson(F f, double a, double b, double tol, int maxDepth) {
    SimpsonResult out;
    if (!(b > a)) return out;
    const double m = 0.5 * (a + b);
    const auto [fa, sa] = f(a);
    const auto [fm, sm_] = f(m);
    const auto [fb, sb] = f(b);
    out.nodes = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, m, b, fa, fm, fb, sa, sm_, sb, whole, tol, maxDepth, out);
    return out;
}

} // namespace

FamilyTable build_family_table(const RingSpec& ring, std::int64_t maxNormP) {
    FamilyTable table;
    table.ring = ring;
    table.maxNorm = maxNormP;
    for (const RingElem& p : canonical_denominators(ring, maxNormP))
        table.entries.push_back(make_family(ring, p));
    return table;
}

std::pair<double, double> s_pm(const RingSpec& ring, double delta) {
    const double absOmega = std::abs(ring.omega);
    if (!(delta >= 4.0 * absOmega))
        throw std::invalid_argument("s_pm: delta < 4 |omega| gives complex roots");
    const double root = std::sqrt(1.0 - 4.0 * absOmega / delta);
    const double xm = delta / 2.0 * (1.0 - root);
    const double xp = delta / 2.0 * (1.0 + root);
    return {2.0 * std::log(xm), 2.0 * std::log(xp)};
}

double single_annulus_threshold(const RingSpec& ring) {
    const double c = ring.cK2nd;
    return 2.0 * std::log(ring.fundDiamParallelogram * c / (c - 1.0));
}

AnnulusSystem build_annulus_system(const RingSpec& ring, double delta, double s,
                                   const QuadratureConfig& cfg, const FamilyTable* table,
                                   bool materializeAnnuli) {
    if (!(delta > 0)) throw std::invalid_argument("build_annulus_system: delta must be > 0");
    if (!(s >= 0)) throw std::invalid_argument("build_annulus_system: s must be >= 0");

    AnnulusSystem sys;
    sys.ring = ring;
    sys.delta = delta;
    sys.s = s;
    sys.useFamilies = true;

    const double inner = std::exp(s) / delta;  // e^s / delta
    const double outerNum = std::exp(0.5 * s); // e^{s/2}; per family outer = this / |p|
    const double maxAbsP = delta * std::exp(-0.5 * s);
    const std::int64_t maxNorm =
        static_cast<std::int64_t>(std::floor(maxAbsP * maxAbsP * (1 + 1e-12)));
    if (maxNorm < 1) return sys; // every annulus degenerate

    FamilyTable local;
    const FamilyTable* src = table;
    if (src == nullptr || src->maxNorm < maxNorm) {
        local = build_family_table(ring, maxNorm);
        src = &local;
    }

    std::size_t annulusCount = 0;
    for (const AnnulusFamily& proto : src->entries) {
        const std::int64_t np = norm(ring, proto.p);
        if (np > maxNorm) break; // entries sorted by norm
        AnnulusFamily fam = proto;
        fam.shellLo = fam.absP * inner;
        fam.shellHi = outerNum;
        if (fam.shellLo > fam.shellHi) continue; // empty family
        std::size_t coprimeCount = 0;
        for (std::uint8_t f : fam.coprime) coprimeCount += f;
        annulusCount += coprimeCount;
        if (annulusCount > cfg.annulusCap)
            throw std::runtime_error(
                "build_annulus_system: system exceeds the annulus cap; lower delta or raise s");
        sys.families.push_back(std::move(fam));
    }

    if (materializeAnnuli) {
        sys.annuli.reserve(annulusCount);
        for (const AnnulusFamily& fam : sys.families) {
            const RingElem p = fam.p;
            const std::int64_t np = norm(ring, p);
            const RingElem pConj = conj_elem(ring, p);
            for (std::int64_t x = 0; x < fam.lat.d1; ++x) {
                for (std::int64_t y = 0; y < fam.lat.d2; ++y) {
                    if (!fam.coprime[detail::residue_index(fam.lat, x, y)]) continue;
                    const RingElem q0{x, y};
                    // exact center q/p and the near-zero coset representative
                    const RingElem r = mul(ring, q0, pConj);
                    const double u = static_cast<double>(mod_pos(r.a, np)) / np;
                    const double v = static_cast<double>(mod_pos(r.b, np)) / np;
                    const RingElem lam{llround(static_cast<double>(r.a) / np),
                                       llround(static_cast<double>(r.b) / np)};
                    TorusAnnulus ann;
                    ann.center = torus_point_from_uv(ring, u, v);
                    ann.inner = inner;
                    ann.outer = outerNum / fam.absP;
                    ann.genP = p;
                    ann.genQ = sub(ring, q0, mul(ring, lam, p));
                    sys.annuli.push_back(ann);
                }
            }
        }
    }
    return sys;
}

FsEvaluation f_s(const RingSpec& ring, double s, double delta, const QuadratureConfig& cfg,
                 const FamilyTable* table, bool forceFullUnion) {
    if (!(s >= 0)) throw std::invalid_argument("f_s: s must be >= 0");
    if (!(delta > 0)) throw std::invalid_argument("f_s: delta must be > 0");

    FsEvaluation ev;
    ev.s = s;
    ev.delta = delta;

    if (!forceFullUnion) {
        const FsRegime regime = classify(ring, s, delta);
        if (regime.kind == FsRegime::Zero) {
            ev.value = 0.0;
            ev.method = FsMethod::ShortcutZero;
            return ev;
        }
        if (regime.kind == FsRegime::One) {
            ev.value = 1.0;
            ev.method = FsMethod::ShortcutOne;
            return ev;
        }
        if (regime.kind == FsRegime::Single) {
            AnnulusSystem sys;
            sys.ring = ring;
            sys.delta = delta;
            sys.s = s;
            sys.useFamilies = true;
            AnnulusFamily unit = make_family(ring, RingElem{1, 0});
            unit.shellLo = std::exp(s) / delta;
            unit.shellHi = std::exp(0.5 * s);
            if (unit.shellLo <= unit.shellHi) sys.families.push_back(std::move(unit));
            QuadratureConfig node = cfg;
            node.seed = node_seed(cfg.seed, s, delta);
            const MeasureEstimate est = union_measure(sys, node);
            ev.value = est.value;
            ev.stderrEst = est.stderrEst;
            ev.method = FsMethod::SingleAnnulus;
            return ev;
        }
    }

    const AnnulusSystem sys = build_annulus_system(ring, delta, s, cfg, table, false);
    QuadratureConfig node = cfg;
    node.seed = node_seed(cfg.seed, s, delta);
    node.disableCoverShortcut = cfg.disableCoverShortcut || forceFullUnion;
    const MeasureEstimate est = union_measure(sys, node);
    ev.value = est.value;
    ev.stderrEst = est.stderrEst;
    ev.method = FsMethod::FullUnion;
    return ev;
}

namespace {

std::vector<double> regime_breakpoints(const RingSpec& ring, double delta) {
    const double top = 2.0 * std::log(delta);
    std::vector<double> pts = {0.0, top};
    const double absOmega = std::abs(ring.omega);
    const auto push = [&](double x) {
        if (x > 0.0 && x < top) pts.push_back(x);
    };
    push(2.0 * std::log(absOmega));
    push(std::log(delta / 2.0));
    if (delta >= 4.0 * absOmega) {
        const auto [sm, sp] = s_pm(ring, delta);
        push(sm);
        push(sp);
    }
    push(single_annulus_threshold(ring));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              pts.end());
    return pts;
}

} // namespace

LimitCdf limit_cdf(const RingSpec& ring, const std::vector<double>& deltaGrid,
                   const QuadratureConfig& cfg) {
    if (!std::is_sorted(deltaGrid.begin(), deltaGrid.end()))
        throw std::invalid_argument("limit_cdf: delta grid must be sorted");
    for (double d : deltaGrid)
        if (!(d >= 0)) throw std::invalid_argument("limit_cdf: deltas must be >= 0");

    LimitCdf out;
    out.deltas = deltaGrid;
    out.F.assign(deltaGrid.size(), 0.0);
    out.errEst.assign(deltaGrid.size(), 0.0);
    out.stderrEst.assign(deltaGrid.size(), 0.0);
    out.bands.resize(deltaGrid.size());

    const double maxDelta = deltaGrid.empty() ? 1.0 : deltaGrid.back();
    const FamilyTable table = build_family_table(
        ring, std::max<std::int64_t>(1, static_cast<std::int64_t>(maxDelta * maxDelta) + 1));

#pragma omp parallel for schedule(dynamic)
    for (std::size_t di = 0; di < deltaGrid.size(); ++di) {
        const double delta = deltaGrid[di];
        if (delta <= 1.0) continue; // f_s = 0 for all s >= 0
        const std::vector<double> pts = regime_breakpoints(ring, delta);
        double F = 0, errEst = 0, stderrSq = 0;
        for (std::size_t b = 0; b + 1 < pts.size(); ++b) {
            const double a = pts[b], c = pts[b + 1];
            QuadBand band;
            band.a = a;
            band.b = c;
            const FsRegime mid = classify(ring, 0.5 * (a + c), delta);
            if (mid.kind == FsRegime::One) {
                // closed form: 2 int e^{-2s} ds
                F += std::exp(-2.0 * a) - std::exp(-2.0 * c);
                band.closedForm = true;
            } else if (mid.kind == FsRegime::Zero) {
                band.closedForm = true;
            } else {
                auto g = [&](double s) -> std::pair<double, double> {
                    const FsEvaluation ev = f_s(ring, s, delta, cfg, &table);
                    return {2.0 * ev.value * std::exp(-2.0 * s),
                            2.0 * ev.stderrEst * std::exp(-2.0 * s)};
                };
                // tolerance scaled to the band's trivial bound so that narrow
                // bands near 2 ln delta are actually resolved
                const double bound = std::exp(-2.0 * a) - std::exp(-2.0 * c);
                const double tol = std::min(cfg.quadTol / static_cast<double>(pts.size()),
                                            std::max(1e-16, 1e-3 * bound));
                const SimpsonResult r = adaptive_simpson(g, a, c, tol, 12);
                F += r.value;
                errEst += r.errEst;
                stderrSq += r.stderrEst * r.stderrEst;
                band.nodes = r.nodes;
                band.errEst = r.errEst;
                band.stderrEst = r.stderrEst;
            }
            out.bands[di].push_back(band);
        }
        out.F[di] = F;
        out.errEst[di] = errEst;
        out.stderrEst[di] = std::sqrt(stderrSq);
    }
    return out;
}

TailReport limit_tail(const RingSpec& ring, double delta, const QuadratureConfig& cfg) {
    const double absOmega = std::abs(ring.omega);
    if (!(delta >= 4.0 * absOmega))
        throw std::invalid_argument("limit_tail: requires delta >= 4 |omega|");

    QuadratureConfig headline = cfg;
    headline.mcGridN = cfg.mcGridTailN; // headline tail numbers get the fine grid

    const FamilyTable table = build_family_table(
        ring, std::max<std::int64_t>(1, static_cast<std::int64_t>(delta * delta) + 1));

    TailReport rep;
    rep.delta = delta;
    const auto [sm, sp] = s_pm(ring, delta);
    const double lnOmega2 = 2.0 * std::log(absOmega); // 0 when |omega| = 1
    const double top = 2.0 * std::log(delta);

    auto oneMinusF = [&](double s) -> std::pair<double, double> {
        const FsEvaluation ev = f_s(ring, s, delta, headline, &table);
        return {2.0 * (1.0 - ev.value) * std::exp(-2.0 * s),
                2.0 * ev.stderrEst * std::exp(-2.0 * s)};
    };

    // each band integral lies in [0, e^{-2a} - e^{-2b}]; scale the tolerance
    // to that bound, otherwise the tiny tail bands accept trivial estimates
    const auto bandTol = [&](double a, double b) {
        const double bound = std::exp(-2.0 * a) - std::exp(-2.0 * b);
        return std::max(1e-16, std::min(cfg.quadTol, 1e-3 * bound));
    };

    // residual low band [0, 2 ln |omega|]; zero width for |omega| = 1
    double stderrSq = 0;
    if (lnOmega2 > 0) {
        const double hi = std::min(lnOmega2, sm);
        const SimpsonResult r = adaptive_simpson(oneMinusF, 0.0, hi, bandTol(0.0, hi), 14);
        rep.residual = r.value;
        rep.errEst += r.errEst;
        stderrSq += r.stderrEst * r.stderrEst;
    }

    // [2 ln|omega|, s_-]: f_s = 1 throughout (s <= ln(delta/2) holds there)
    rep.term1 = 0.0;

    // [s_-, s_+] contributes nothing; beyond 2 ln(delta), f_s = 0 exactly:
    rep.term2 = std::pow(delta, -4.0);

    // [s_+, 2 ln delta]
    {
        const SimpsonResult r = adaptive_simpson(oneMinusF, sp, top, bandTol(sp, top), 14);
        rep.term3 = r.value;
        rep.errEst += r.errEst;
        stderrSq += r.stderrEst * r.stderrEst;
    }

    rep.stderrEst = std::sqrt(stderrSq);
    rep.tail = rep.residual + rep.term1 + rep.term2 + rep.term3;
    return rep;
}

} // namespace cfarey
