#include "cfarey/ring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace cfarey {

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r))
        throw std::overflow_error("integer overflow in add");
    return r;
}

std::int64_t checked_sub(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_sub_overflow(x, y, &r))
        throw std::overflow_error("integer overflow in sub");
    return r;
}

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r))
        throw std::overflow_error("integer overflow in mul");
    return r;
}

std::int64_t checked_neg(std::int64_t x) {
    if (x == INT64_MIN) throw std::overflow_error("integer overflow in neg");
    return -x;
}

namespace {

bool is_squarefree(std::int64_t n) {
    n = std::abs(n);
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0) return false;
    return true;
}

std::int64_t mod_pos(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

} // namespace

RingSpec make_ring(std::int64_t discriminant, double zetaTol) {
    if (discriminant >= 0)
        throw std::invalid_argument(
            "discriminant must be negative, got " + std::to_string(discriminant));

    RingSpec ring;
    ring.discriminant = discriminant;
    ring.absDisc = -discriminant;
    const std::int64_t D = ring.absDisc;
    const std::int64_t m4 = mod_pos(discriminant, 4);

    if (m4 == 1) {
        if (!is_squarefree(discriminant))
            throw std::invalid_argument(
                "non-fundamental discriminant " + std::to_string(discriminant) +
                ": D = 1 mod 4 but D is not squarefree");
        ring.omegaHalfCase = true;
    } else if (m4 == 0) {
        const std::int64_t q = discriminant / 4;
        const std::int64_t qm4 = mod_pos(q, 4);
        if (qm4 != 2 && qm4 != 3)
            throw std::invalid_argument(
                "non-fundamental discriminant " + std::to_string(discriminant) +
                ": D = 0 mod 4 but D/4 = " + std::to_string(qm4) +
                " mod 4 (needs 2 or 3)");
        if (!is_squarefree(q))
            throw std::invalid_argument(
                "non-fundamental discriminant " + std::to_string(discriminant) +
                ": D = 0 mod 4 but D/4 is not squarefree");
        ring.omegaHalfCase = false;
    } else {
        throw std::invalid_argument(
            "non-fundamental discriminant " + std::to_string(discriminant) +
            ": D = " + std::to_string(m4) + " mod 4 (needs 0 or 1)");
    }

    const double sqrtD = std::sqrt(static_cast<double>(D));
    if (ring.omegaHalfCase) {
        // omega = (1 + i sqrt|D|)/2, omega^2 = omega - (1+|D|)/4
        ring.normCoeff = (1 + D) / 4;
        ring.omegaSq = RingElem{-ring.normCoeff, 1};
        ring.omegaConj = RingElem{1, -1};
        ring.omega = {0.5, sqrtD / 2.0};
    } else {
        // omega = i sqrt|D|/2, omega^2 = -|D|/4
        ring.normCoeff = D / 4;
        ring.omegaSq = RingElem{-ring.normCoeff, 0};
        ring.omegaConj = RingElem{0, -1};
        ring.omega = {0.0, sqrtD / 2.0};
    }

    if (discriminant == -4) {
        ring.units = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    } else if (discriminant == -3) {
        // powers of omega = e^{i pi/3}
        ring.units = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
    } else {
        ring.units = {{1, 0}, {-1, 0}};
    }

    ring.covolume = sqrtD / 2.0;
    ring.fundDiamParallelogram = std::abs(std::complex<double>(1, 0) + ring.omega);
    if (ring.omegaHalfCase) {
        // circumradius of the Delaunay triangle (0, 1, omega)
        ring.coveringRadius = static_cast<double>(1 + D) / (4.0 * sqrtD);
    } else {
        // rectangular lattice: half diagonal of the fundamental rectangle
        ring.coveringRadius = ring.fundDiamParallelogram / 2.0;
    }

    // cK2nd and the systole by enumerating all lattice points of modulus <= 2.5
    {
        const double R = 2.5;
        std::int64_t bestAbove1 = -1, minNonzero = -1;
        const double imw = ring.omega.imag();
        const std::int64_t bMax = static_cast<std::int64_t>(std::floor(R / imw)) + 1;
        for (std::int64_t b = -bMax; b <= bMax; ++b) {
            const double re0 = static_cast<double>(b) * ring.omega.real();
            const std::int64_t aLo = static_cast<std::int64_t>(std::floor(-re0 - R)) - 1;
            const std::int64_t aHi = static_cast<std::int64_t>(std::ceil(-re0 + R)) + 1;
            for (std::int64_t a = aLo; a <= aHi; ++a) {
                const std::int64_t n = norm(ring, RingElem{a, b});
                if (n == 0) continue;
                if (minNonzero < 0 || n < minNonzero) minNonzero = n;
                if (n > 1 && (bestAbove1 < 0 || n < bestAbove1)) bestAbove1 = n;
            }
        }
        if (minNonzero != 1)
            throw std::logic_error("systole of the lattice is not 1");
        ring.cK2nd = std::sqrt(static_cast<double>(bestAbove1));
    }

    zeta_K_2(ring, zetaTol);
    return ring;
}

std::int64_t norm(const RingSpec& ring, RingElem x) {
    // |a+b omega|^2 = a^2 + b^2|D|/4            (D = 0 mod 4)
    //               = a^2 + ab + b^2(1+|D|)/4   (D = 1 mod 4)
    std::int64_t n = checked_add(checked_mul(x.a, x.a),
                                 checked_mul(checked_mul(x.b, x.b), ring.normCoeff));
    if (ring.omegaHalfCase) n = checked_add(n, checked_mul(x.a, x.b));
    return n;
}

RingElem add(const RingSpec&, RingElem x, RingElem y) {
    return {checked_add(x.a, y.a), checked_add(x.b, y.b)};
}

RingElem sub(const RingSpec&, RingElem x, RingElem y) {
    return {checked_sub(x.a, y.a), checked_sub(x.b, y.b)};
}

RingElem neg(const RingSpec&, RingElem x) {
    return {checked_neg(x.a), checked_neg(x.b)};
}

RingElem mul(const RingSpec& ring, RingElem x, RingElem y) {
    // (a+b w)(c+d w) = ac + (ad+bc) w + bd w^2, with w^2 = omegaSq
    const std::int64_t ac = checked_mul(x.a, y.a);
    const std::int64_t bd = checked_mul(x.b, y.b);
    const std::int64_t cross = checked_add(checked_mul(x.a, y.b), checked_mul(x.b, y.a));
    return {checked_add(ac, checked_mul(bd, ring.omegaSq.a)),
            checked_add(cross, checked_mul(bd, ring.omegaSq.b))};
}

RingElem conj_elem(const RingSpec& ring, RingElem x) {
    return {checked_add(x.a, checked_mul(x.b, ring.omegaConj.a)),
            checked_mul(x.b, ring.omegaConj.b)};
}

RingElem mul_omega(const RingSpec& ring, RingElem x) {
    return mul(ring, x, RingElem{0, 1});
}

std::complex<double> embed(const RingSpec& ring, RingElem x) {
    return std::complex<double>(static_cast<double>(x.a), 0.0) +
           static_cast<double>(x.b) * ring.omega;
}

LatticeTriangular principal_lattice_form(const RingSpec& ring, RingElem q) {
    if (q.isZero()) throw std::invalid_argument("principal_lattice_form: q = 0");
    const RingElem qw = mul_omega(ring, q);
    // column-reduce [[q.a, qw.a], [q.b, qw.b]] to lower triangular
    std::int64_t a1 = q.a, b1 = q.b, a2 = qw.a, b2 = qw.b;
    while (a2 != 0) {
        const std::int64_t k = a1 / a2;
        a1 = checked_sub(a1, checked_mul(k, a2));
        b1 = checked_sub(b1, checked_mul(k, b2));
        std::swap(a1, a2);
        std::swap(b1, b2);
    }
    if (a1 < 0) { a1 = -a1; b1 = -b1; }
    if (b2 < 0) b2 = -b2;
    if (a1 == 0 || b2 == 0)
        throw std::logic_error("principal lattice is not full rank");
    LatticeTriangular t;
    t.d1 = a1;
    t.e = mod_pos(b1, b2);
    t.d2 = b2;
    return t;
}

std::int64_t module_index(const RingSpec& ring, RingElem p, RingElem q) {
    if (p.isZero() && q.isZero())
        throw std::invalid_argument("module_index: (p, q) = (0, 0)");
    // Z-module spanned by {p, p*omega, q, q*omega}, written as a 2x4 integer
    // matrix in the basis {1, omega}; column-reduce and take |d1*d2|.
    RingElem cols[4] = {p, mul_omega(ring, p), q, mul_omega(ring, q)};

    // eliminate the first row down to a single nonzero entry
    for (;;) {
        int piv = -1;
        for (int j = 0; j < 4; ++j)
            if (cols[j].a != 0 &&
                (piv < 0 || std::abs(cols[j].a) < std::abs(cols[piv].a)))
                piv = j;
        if (piv < 0) throw std::logic_error("module_index: rank < 2");
        bool clean = true;
        for (int j = 0; j < 4; ++j) {
            if (j == piv || cols[j].a == 0) continue;
            const std::int64_t k = cols[j].a / cols[piv].a;
            cols[j].a = checked_sub(cols[j].a, checked_mul(k, cols[piv].a));
            cols[j].b = checked_sub(cols[j].b, checked_mul(k, cols[piv].b));
            if (cols[j].a != 0) clean = false;
        }
        if (clean) {
            std::int64_t d1 = std::abs(cols[piv].a);
            std::int64_t d2 = 0;
            for (int j = 0; j < 4; ++j)
                if (j != piv) d2 = std::gcd(d2, cols[j].b);
            if (d2 == 0) throw std::logic_error("module_index: rank < 2");
            return checked_mul(d1, d2);
        }
    }
}

bool is_coprime(const RingSpec& ring, RingElem p, RingElem q) {
    return module_index(ring, p, q) == 1;
}

bool is_canonical_unit_rep(const RingSpec& ring, RingElem q) {
    if (q.isZero()) return true;
    if (ring.unitCount() == 2) {
        // arg in [0, pi): upper half plane, or the positive real axis
        return q.b > 0 || (q.b == 0 && q.a > 0);
    }
    // |units| = 4 or 6: arg in [0, 2pi/n) is exactly the cone {a > 0, b >= 0}
    // spanned by 1 (inclusive) and omega (exclusive) in the basis {1, omega}.
    return q.a > 0 && q.b >= 0;
}

RingElem canonical_unit_rep(const RingSpec& ring, RingElem q) {
    if (q.isZero()) return q;
    RingElem r = q;
    for (int i = 0; i < ring.unitCount(); ++i) {
        if (is_canonical_unit_rep(ring, r)) return r;
        r = mul(ring, r, ring.units[1]); // rotate by the fundamental unit
    }
    throw std::logic_error("no canonical associate found");
}

int kronecker_symbol(std::int64_t a, std::int64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    int v = 0;
    while ((n & 1) == 0) { n >>= 1; ++v; }
    if (v > 0) {
        if ((a & 1) == 0) return 0;
        const std::int64_t am8 = mod_pos(a, 8);
        if ((v & 1) && (am8 == 3 || am8 == 5)) result = -result;
    }
    a = mod_pos(a, n);
    while (a != 0) {
        int v2 = 0;
        while ((a & 1) == 0) { a >>= 1; ++v2; }
        if (v2 & 1) {
            const std::int64_t nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5) result = -result;
        }
        if ((a % 4) == 3 && (n % 4) == 3) result = -result;
        std::swap(a, n);
        a %= n;
    }
    return (n == 1) ? result : 0;
}

double zeta_K_2(RingSpec& ring, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("zeta_K_2: tol must be > 0");
    const std::int64_t P = ring.absDisc; // chi_D has period |D|
    std::vector<int> chi(static_cast<std::size_t>(P));
    for (std::int64_t r = 0; r < P; ++r)
        chi[static_cast<std::size_t>(r)] = kronecker_symbol(ring.discriminant, r);

    // Abel summation with |sum_{n<=x} chi(n)| <= P gives a tail bound
    // |sum_{n>N} chi(n)/n^2| <= 2P/(N+1)^2.
    const std::int64_t N = static_cast<std::int64_t>(
        std::ceil(std::sqrt(2.0 * static_cast<double>(P) / tol))) + 1;

    double L = 0.0, comp = 0.0; // Kahan
    for (std::int64_t n = 1; n <= N; ++n) {
        const int c = chi[static_cast<std::size_t>(n % P)];
        if (c == 0) continue;
        const double term = static_cast<double>(c) /
                            (static_cast<double>(n) * static_cast<double>(n));
        const double y = term - comp;
        const double t = L + y;
        comp = (t - L) - y;
        L = t;
    }

    const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    ring.zeta2 = zeta2 * L;
    ring.mertensConstant =
        std::numbers::pi / (std::sqrt(static_cast<double>(ring.absDisc)) * ring.zeta2);
    return ring.zeta2;
}

} // namespace cfarey
