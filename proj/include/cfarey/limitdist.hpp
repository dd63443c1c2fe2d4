#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cfarey/torus.hpp"

namespace cfarey {

enum class FsMethod { ShortcutOne, ShortcutZero, SingleAnnulus, FullUnion };

/// One evaluation of f_s(delta) = normalized measure of the annulus union.
struct FsEvaluation {
    double s = 0;
    double delta = 0;
    double value = 0;
    double stderrEst = 0; // 0 for the exact shortcuts
    FsMethod method = FsMethod::FullUnion;
};

/// Quadrature diagnostics for one band of the s-integral.
struct QuadBand {
    double a = 0, b = 0;
    bool closedForm = false;
    int nodes = 0;
    double errEst = 0;
    double stderrEst = 0;
};

struct LimitCdf {
    std::vector<double> deltas;
    std::vector<double> F;
    std::vector<double> errEst;
    std::vector<double> stderrEst;
    std::vector<std::vector<QuadBand>> bands;
};

/// Tail decomposition at one delta:
///   tail = residual + term1 + term2 + term3
///   residual = 2 int_0^{2 ln|omega|} (1 - f_s) e^{-2s} ds  (0 when |omega|=1)
///   term1    = 2 int_{2 ln|omega|}^{s_-} (1 - f_s) e^{-2s} ds (vanishes)
///   term2    = 1/delta^4 exactly
///   term3    = 2 int_{s_+}^{2 ln delta} (1 - f_s) e^{-2s} ds
struct TailReport {
    double delta = 0;
    double tail = 0;
    double residual = 0;
    double term1 = 0;
    double term2 = 0;
    double term3 = 0;
    double stderrEst = 0;
    double errEst = 0;
};

/// Canonical denominators p with precomputed coset data, shared across the
/// (s, delta) systems of one ring. Entries sorted by |p|.
struct FamilyTable {
    RingSpec ring;
    std::int64_t maxNorm = 0;
    std::vector<AnnulusFamily> entries; // shell radii unset, filled per system
};

FamilyTable build_family_table(const RingSpec& ring, std::int64_t maxNormP);

/// Roots s_- <= s_+ of e^{s/2} - e^s/delta - |omega| = 0.
/// Requires delta >= 4 |omega|.
std::pair<double, double> s_pm(const RingSpec& ring, double delta);

/// Threshold 2 ln(|1+omega| c_K / (c_K - 1)) above which the union collapses
/// to the single annulus A(0, e^s/delta, e^{s/2}).
double single_annulus_threshold(const RingSpec& ring);

/// The truncated family of torus annuli A(q/p, e^s/delta, e^{s/2}/|p|) over
/// coprime (p, q), p != 0, |p| <= delta e^{-s/2}, q over the coprime cosets
/// mod p O_K. With materializeAnnuli=false only the family form is stored.
AnnulusSystem build_annulus_system(const RingSpec& ring, double delta, double s,
                                   const QuadratureConfig& cfg = {},
                                   const FamilyTable* table = nullptr,
                                   bool materializeAnnuli = true);

/// f_s(delta) with the regime dispatch: exact 0 / exact 1 shortcuts, the
/// single-annulus form, or the full union (Monte Carlo).
FsEvaluation f_s(const RingSpec& ring, double s, double delta,
                 const QuadratureConfig& cfg = {}, const FamilyTable* table = nullptr,
                 bool forceFullUnion = false);

/// F(delta) = mu([0, delta]) = 2 int_0^inf f_s(delta) e^{-2s} ds on a sorted
/// positive grid. Bands where f_s is constant integrate in closed form; the
/// remainder uses adaptive Simpson with mandatory regime breakpoints.
LimitCdf limit_cdf(const RingSpec& ring, const std::vector<double>& deltaGrid,
                   const QuadratureConfig& cfg = {});

/// The tail mu(]delta, inf[) via the decomposition above. Requires
/// delta >= 4 |omega| (headline Monte Carlo grid mcGridTailN is used).
TailReport limit_tail(const RingSpec& ring, double delta,
                      const QuadratureConfig& cfg = {});

} // namespace cfarey
