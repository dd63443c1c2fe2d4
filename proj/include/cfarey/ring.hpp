#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfarey {

// 64-bit integer arithmetic that refuses to wrap. All exact lattice work in
// this library goes through these.
std::int64_t checked_add(std::int64_t x, std::int64_t y);
std::int64_t checked_sub(std::int64_t x, std::int64_t y);
std::int64_t checked_mul(std::int64_t x, std::int64_t y);
std::int64_t checked_neg(std::int64_t x);

/// Element a + b*omega of the ring of integers, relative to a RingSpec.
struct RingElem {
    std::int64_t a = 0;
    std::int64_t b = 0;
    bool operator==(const RingElem&) const = default;
    bool isZero() const { return a == 0 && b == 0; }
};

/// All constants of one imaginary quadratic field K = Q(sqrt(D)), D < 0
/// fundamental, with ring of integers Z[omega].
struct RingSpec {
    std::int64_t discriminant = 0;   // D_K
    std::int64_t absDisc = 0;        // |D_K|
    bool omegaHalfCase = false;      // true iff D_K = 1 mod 4, omega = (1+i sqrt|D|)/2
    std::int64_t normCoeff = 0;      // |D|/4 or (1+|D|)/4; see norm()
    RingElem omegaSq;                // omega^2 = omegaSq.a + omegaSq.b * omega
    RingElem omegaConj;              // conj(omega) = omegaConj.a + omegaConj.b * omega
    std::complex<double> omega;      // floating embedding of omega
    std::vector<RingElem> units;     // the unit group O_K^x
    double cK2nd = 0;                // min{|z| : z in O_K, |z| > 1}
    double covolume = 0;             // sqrt|D|/2
    double coveringRadius = 0;       // max distance from C to the lattice
    double fundDiamParallelogram = 0;// |1 + omega|
    double zeta2 = 0;                // zeta_K(2)
    double mertensConstant = 0;      // pi / (sqrt|D| * zeta_K(2))

    int unitCount() const { return static_cast<int>(units.size()); }
};

/// Builds the RingSpec for a fundamental discriminant D < 0. Rejects
/// nonnegative and non-fundamental values with a diagnostic naming the
/// violated condition. zetaTol controls the zeta_K(2) truncation.
RingSpec make_ring(std::int64_t discriminant, double zetaTol = 1e-9);

/// Exact |a + b*omega|^2; throws std::overflow_error instead of wrapping.
std::int64_t norm(const RingSpec& ring, RingElem x);

RingElem add(const RingSpec& ring, RingElem x, RingElem y);
RingElem sub(const RingSpec& ring, RingElem x, RingElem y);
RingElem mul(const RingSpec& ring, RingElem x, RingElem y);
RingElem neg(const RingSpec& ring, RingElem x);
RingElem conj_elem(const RingSpec& ring, RingElem x);
RingElem mul_omega(const RingSpec& ring, RingElem x);

std::complex<double> embed(const RingSpec& ring, RingElem x);

/// Lower-triangular integer form of a rank-2 sublattice of Z^2: generated by
/// the columns (d1, e) and (0, d2) with d1, d2 > 0. det = d1*d2.
struct LatticeTriangular {
    std::int64_t d1 = 0;
    std::int64_t e = 0;
    std::int64_t d2 = 0;
};

/// Triangular form of the principal lattice q*O_K in the basis {1, omega}.
/// Requires q != 0; d1*d2 == norm(q).
LatticeTriangular principal_lattice_form(const RingSpec& ring, RingElem q);

/// Index of the Z-module p*O_K + q*O_K inside O_K (= absolute norm of the
/// ideal (p, q)). Requires (p, q) != (0, 0).
std::int64_t module_index(const RingSpec& ring, RingElem p, RingElem q);

/// True iff p*O_K + q*O_K = O_K, i.e. the module index is 1.
bool is_coprime(const RingSpec& ring, RingElem p, RingElem q);

/// The associate of q whose argument lies in [0, 2*pi/|O_K^x|). Exact
/// integer test, no floating point. canonical_unit_rep(0) = 0.
RingElem canonical_unit_rep(const RingSpec& ring, RingElem q);
bool is_canonical_unit_rep(const RingSpec& ring, RingElem q);

/// Kronecker symbol (a/n). Defined for all integers; used with a = D_K.
int kronecker_symbol(std::int64_t a, std::int64_t n);

/// zeta_K(2) = zeta(2) * L(2, chi_D) by direct character series with a proven
/// truncation bound <= tol. Stores zeta2 and mertensConstant in ring and
/// returns the value.
double zeta_K_2(RingSpec& ring, double tol);

} // namespace cfarey
