#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cfarey/prng.hpp"
#include "cfarey/ring.hpp"

using namespace cfarey;

namespace {

// brute-force oracle: does some nonunit d divide both p and q?
bool divides(const RingSpec& ring, RingElem d, RingElem x) {
    const std::int64_t n = norm(ring, d);
    const RingElem r = mul(ring, x, conj_elem(ring, d));
    return r.a % n == 0 && r.b % n == 0;
}

bool coprime_bruteforce(const RingSpec& ring, RingElem p, RingElem q) {
    const std::int64_t np = p.isZero() ? 0 : norm(ring, p);
    const std::int64_t nq = q.isZero() ? 0 : norm(ring, q);
    if (np == 0 && nq == 0) return false;
    std::int64_t bound = (np == 0) ? nq : (nq == 0 ? np : std::min(np, nq));
    const double R = std::sqrt(static_cast<double>(bound)) + 1;
    const std::int64_t bMax = static_cast<std::int64_t>(R / ring.omega.imag()) + 1;
    for (std::int64_t b = -bMax; b <= bMax; ++b) {
        for (std::int64_t a = -2 * static_cast<std::int64_t>(R) - 2;
             a <= 2 * static_cast<std::int64_t>(R) + 2; ++a) {
            const RingElem d{a, b};
            const std::int64_t nd = d.isZero() ? 0 : norm(ring, d);
            if (nd < 2 || nd > bound) continue;
            if ((np == 0 || divides(ring, d, p)) && (nq == 0 || divides(ring, d, q)))
                return false;
        }
    }
    return true;
}

RingElem random_elem(const RingSpec&, SplitMix64& rng, std::int64_t coordBound) {
    const std::int64_t span = 2 * coordBound + 1;
    return {static_cast<std::int64_t>(rng.next() % span) - coordBound,
            static_cast<std::int64_t>(rng.next() % span) - coordBound};
}

} // namespace

TEST_CASE("make_ring constants for the example discriminants") {
    const RingSpec zi = make_ring(-4);
    CHECK(zi.omega == std::complex<double>(0, 1));
    CHECK(zi.unitCount() == 4);
    CHECK(zi.cK2nd == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(zi.covolume == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(zi.coveringRadius == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));

    const RingSpec zj = make_ring(-3);
    CHECK(zj.omega.real() == doctest::Approx(0.5));
    CHECK(zj.omega.imag() == doctest::Approx(std::sqrt(3.0) / 2));
    CHECK(zj.unitCount() == 6);
    CHECK(zj.cK2nd == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(zj.covolume == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
    CHECK(zj.coveringRadius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

    const RingSpec d20 = make_ring(-20);
    CHECK(d20.cK2nd == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d20.covolume == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    CHECK(d20.unitCount() == 2);

    // Remark's table for the other small discriminants
    CHECK(make_ring(-8).cK2nd == doctest::Approx(std::sqrt(2.0)));
    CHECK(make_ring(-7).cK2nd == doctest::Approx(std::sqrt(2.0)));
    CHECK(make_ring(-11).cK2nd == doctest::Approx(std::sqrt(3.0)));
    CHECK(make_ring(-15).cK2nd == doctest::Approx(2.0));
    CHECK(make_ring(-163).cK2nd == doctest::Approx(2.0));
}

TEST_CASE("make_ring rejects bad discriminants") {
    CHECK_THROWS_AS(make_ring(-12), std::invalid_argument); // Q(i sqrt 3) has disc -3
    CHECK_THROWS_AS(make_ring(4), std::invalid_argument);
    CHECK_THROWS_AS(make_ring(0), std::invalid_argument);
    CHECK_THROWS_AS(make_ring(-5), std::invalid_argument);  // 3 mod 4
    CHECK_THROWS_AS(make_ring(-9), std::invalid_argument);  // not squarefree
    CHECK_THROWS_AS(make_ring(-16), std::invalid_argument); // D/4 = 0 mod 4
    CHECK_THROWS_AS(make_ring(-48), std::invalid_argument);
}

TEST_CASE("covolume equals Im(omega)") {
    for (std::int64_t d : {-3, -4, -7, -8, -11, -15, -19, -20, -163}) {
        const RingSpec ring = make_ring(d);
        CHECK(ring.covolume == doctest::Approx(ring.omega.imag()).epsilon(1e-15));
    }
}

TEST_CASE("covering radius is the max distance to the lattice (sampled)") {
    for (std::int64_t d : {-4, -3, -7, -20, -163}) {
        const RingSpec ring = make_ring(d);
        double maxDist = 0;
        const int G = 200;
        for (int i = 0; i <= G; ++i) {
            for (int j = 0; j <= G; ++j) {
                const std::complex<double> z =
                    std::complex<double>(i / double(G), 0) + (j / double(G)) * ring.omega;
                double best = HUGE_VAL;
                for (int a = -2; a <= 2; ++a)
                    for (int b = -2; b <= 2; ++b)
                        best = std::min(best,
                                        std::abs(z - (std::complex<double>(a, 0) +
                                                      double(b) * ring.omega)));
                maxDist = std::max(maxDist, best);
            }
        }
        CHECK(maxDist <= ring.coveringRadius + 1e-9);
        CHECK(maxDist >= ring.coveringRadius - 0.05 * ring.coveringRadius);
    }
}

TEST_CASE("norm examples") {
    const RingSpec zi = make_ring(-4);
    CHECK(norm(zi, {0, 0}) == 0);
    CHECK(norm(zi, {1, 1}) == 2);

    const RingSpec zj = make_ring(-3);
    CHECK(norm(zj, {0, 1}) == 1); // |omega|^2 = 1
}

TEST_CASE("norm matches the complex embedding on random elements") {
    SplitMix64 rng(42);
    for (std::int64_t d : {-4, -3, -7, -8, -163}) {
        const RingSpec ring = make_ring(d);
        for (int i = 0; i < 2000; ++i) {
            const RingElem x = random_elem(ring, rng, 500);
            const double m = std::abs(embed(ring, x));
            CHECK(norm(ring, x) == llround(m * m));
        }
    }
}

TEST_CASE("norm overflow is detected") {
    const RingSpec zi = make_ring(-4);
    CHECK_THROWS_AS(norm(zi, {INT64_MAX / 2, 3}), std::overflow_error);
    CHECK_THROWS_AS(mul(zi, {INT64_MAX / 2, 0}, {3, 0}), std::overflow_error);
}

TEST_CASE("ring arithmetic examples") {
    const RingSpec zi = make_ring(-4);
    CHECK(mul(zi, {1, 1}, {1, -1}) == RingElem{2, 0}); // (1+i)(1-i) = 2

    const RingSpec zj = make_ring(-3);
    CHECK(mul(zj, {0, 1}, {0, 1}) == RingElem{-1, 1}); // omega^2 = omega - 1

    SplitMix64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const RingElem x = random_elem(zj, rng, 1000);
        CHECK(add(zj, x, {0, 0}) == x);
        CHECK(add(zj, x, neg(zj, x)) == RingElem{0, 0});
        // x * conj(x) = norm(x)
        const RingElem n = mul(zj, x, conj_elem(zj, x));
        CHECK(n.b == 0);
        CHECK(n.a == norm(zj, x));
    }
}

TEST_CASE("arithmetic is consistent with the embedding") {
    SplitMix64 rng(11);
    for (std::int64_t d : {-4, -3, -7, -8, -11, -163}) {
        const RingSpec ring = make_ring(d);
        for (int i = 0; i < 500; ++i) {
            const RingElem x = random_elem(ring, rng, 1000);
            const RingElem y = random_elem(ring, rng, 1000);
            const std::complex<double> ex = embed(ring, x), ey = embed(ring, y);
            CHECK(std::abs(embed(ring, mul(ring, x, y)) - ex * ey) <=
                  1e-9 * std::max(1.0, std::abs(ex * ey)));
            CHECK(std::abs(embed(ring, add(ring, x, y)) - (ex + ey)) <= 1e-9);
            CHECK(std::abs(embed(ring, conj_elem(ring, x)) - std::conj(ex)) <= 1e-9);
        }
    }
}

TEST_CASE("is_coprime examples") {
    const RingSpec zi = make_ring(-4);
    CHECK_FALSE(is_coprime(zi, {1, 1}, {2, 0})); // 2 = -i (1+i)^2
    CHECK(is_coprime(zi, {3, 0}, {1, 1}));       // norms 9 and 2 coprime
    CHECK(is_coprime(zi, {0, 0}, {0, 1}));       // (0, unit)
    CHECK(is_coprime(zi, {0, 0}, {1, 0}));
    CHECK_FALSE(is_coprime(zi, {0, 0}, {2, 0})); // ideal 2 O_K
    CHECK_THROWS_AS(is_coprime(zi, {0, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("module_index equals norm for principal lattices") {
    SplitMix64 rng(13);
    for (std::int64_t d : {-4, -3, -7}) {
        const RingSpec ring = make_ring(d);
        for (int i = 0; i < 200; ++i) {
            RingElem q = random_elem(ring, rng, 20);
            if (q.isZero()) q = {1, 0};
            const LatticeTriangular t = principal_lattice_form(ring, q);
            CHECK(t.d1 * t.d2 == norm(ring, q));
            CHECK(module_index(ring, {0, 0}, q) == norm(ring, q));
        }
    }
}

TEST_CASE("is_coprime invariances and brute-force agreement") {
    SplitMix64 rng(17);
    for (std::int64_t d : {-3, -4, -7, -8, -11}) {
        const RingSpec ring = make_ring(d);
        int checked = 0;
        while (checked < 200) {
            const RingElem p = random_elem(ring, rng, 12);
            const RingElem q = random_elem(ring, rng, 12);
            if (p.isZero() && q.isZero()) continue;
            if (!p.isZero() && norm(ring, p) > 400) continue;
            if (!q.isZero() && norm(ring, q) > 400) continue;
            ++checked;
            const bool c = is_coprime(ring, p, q);
            CHECK(c == is_coprime(ring, q, p));
            for (const RingElem& u : ring.units)
                CHECK(c == is_coprime(ring, mul(ring, u, p), q));
            CHECK(c == coprime_bruteforce(ring, p, q));
        }
    }
}

TEST_CASE("canonical unit representative") {
    for (std::int64_t d : {-4, -3, -20}) {
        const RingSpec ring = make_ring(d);
        SplitMix64 rng(23);
        for (int i = 0; i < 300; ++i) {
            RingElem q = random_elem(ring, rng, 50);
            if (q.isZero()) continue;
            const RingElem c = canonical_unit_rep(ring, q);
            CHECK(is_canonical_unit_rep(ring, c));
            CHECK(norm(ring, c) == norm(ring, q));
            // exactly one associate is canonical
            int count = 0;
            for (const RingElem& u : ring.units)
                if (is_canonical_unit_rep(ring, mul(ring, u, q))) ++count;
            CHECK(count == 1);
        }
    }
}

TEST_CASE("kronecker symbol matches the quadratic character") {
    // chi_{-4}: period 4 -> 1, 0, -1, 0
    const int chi4[] = {0, 1, 0, -1};
    for (int n = 1; n < 40; ++n)
        CHECK(kronecker_symbol(-4, n) == chi4[n % 4]);
    // chi_{-3}: period 3 -> 1 for n=1, -1 for n=2, 0 for 3|n
    const int chi3[] = {0, 1, -1};
    for (int n = 1; n < 40; ++n)
        CHECK(kronecker_symbol(-3, n) == chi3[n % 3]);
    // Euler criterion at odd primes p not dividing D
    const std::int64_t primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 101, 997};
    for (std::int64_t D : {-3LL, -4LL, -7LL, -8LL, -20LL, -163LL}) {
        for (std::int64_t p : primes) {
            if ((-D) % p == 0) continue;
            std::int64_t e = 1, base = ((D % p) + p) % p, k = (p - 1) / 2;
            while (k) {
                if (k & 1) e = e * base % p;
                base = base * base % p;
                k >>= 1;
            }
            const int euler = (e == 1) ? 1 : -1;
            CHECK(kronecker_symbol(D, p) == euler);
        }
    }
}

TEST_CASE("zeta_K(2) values") {
    // Q(i): zeta(2) * Catalan
    const double catalan = 0.9159655941772190151;
    RingSpec zi = make_ring(-4);
    const double zetaRef = std::numbers::pi * std::numbers::pi / 6.0 * catalan;
    CHECK(zi.zeta2 == doctest::Approx(zetaRef).epsilon(1e-9));
    CHECK(zi.zeta2 == doctest::Approx(1.5067030099229851).epsilon(1e-9));
    CHECK(zi.mertensConstant ==
          doctest::Approx(std::numbers::pi / (2 * zetaRef)).epsilon(1e-9));

    // direct partial-sum oracle for chi_{-3}
    RingSpec zj = make_ring(-3);
    double L = 0;
    for (std::int64_t n = 3000000; n >= 1; --n) {
        const int c = (n % 3 == 1) ? 1 : (n % 3 == 2 ? -1 : 0);
        L += c / (static_cast<double>(n) * static_cast<double>(n));
    }
    CHECK(zj.zeta2 ==
          doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0 * L).epsilon(1e-8));
    CHECK(zj.zeta2 == doctest::Approx(1.2851909554841494).epsilon(1e-9));

    // cross-source reference values
    CHECK(make_ring(-7).zeta2 == doctest::Approx(1.8948414489688065).epsilon(1e-9));
    CHECK(make_ring(-8).zeta2 == doctest::Approx(1.7514175100868651).epsilon(1e-9));
    CHECK(make_ring(-11).zeta2 == doctest::Approx(1.4961318594779134).epsilon(1e-9));
    CHECK(make_ring(-163).zeta2 == doctest::Approx(1.0895818440717603).epsilon(1e-8));
}

TEST_CASE("zeta_K(2) bounds and truncation stability") {
    const double zeta2sq = std::pow(std::numbers::pi * std::numbers::pi / 6.0, 2);
    for (std::int64_t d : {-3, -4, -7, -8, -11, -15, -19, -20, -43, -163}) {
        RingSpec ring = make_ring(d);
        CHECK(ring.zeta2 > 1.0);
        CHECK(ring.zeta2 < zeta2sq);
        const double z1 = zeta_K_2(ring, 1e-9);
        const double z2 = zeta_K_2(ring, 2.5e-10); // doubles the truncation length
        CHECK(std::abs(z1 - z2) < 1e-8);
    }
    RingSpec ring = make_ring(-4);
    CHECK_THROWS_AS(zeta_K_2(ring, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(zeta_K_2(ring, -1.0), std::invalid_argument);
}

TEST_CASE("systole is exactly 1 for all supported discriminants") {
    for (std::int64_t d : {-3, -4, -7, -8, -11, -15, -19, -20, -43, -67, -163}) {
        const RingSpec ring = make_ring(d);
        std::int64_t minNorm = INT64_MAX;
        const std::int64_t bMax =
            static_cast<std::int64_t>(2.0 / ring.omega.imag()) + 1;
        for (std::int64_t b = -bMax; b <= bMax; ++b)
            for (std::int64_t a = -4; a <= 4; ++a) {
                const RingElem x{a, b};
                if (x.isZero()) continue;
                const std::int64_t n = norm(ring, x);
                if (n <= 4) minNorm = std::min(minNorm, n);
            }
        CHECK(minNorm == 1);
    }
}
