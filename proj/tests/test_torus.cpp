#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "cfarey/prng.hpp"
#include "cfarey/torus.hpp"

using namespace cfarey;

namespace {

// 11x11 shift-block oracle for the quotient distance
double distance_bruteforce(const RingSpec& ring, const TorusPoint& x, const TorusPoint& y) {
    double best = HUGE_VAL;
    for (int i = -5; i <= 5; ++i)
        for (int j = -5; j <= 5; ++j) {
            const std::complex<double> w =
                x.cart - y.cart -
                (std::complex<double>(i, 0) + double(j) * ring.omega);
            best = std::min(best, std::abs(w));
        }
    return best;
}

// 11x11 lambda-scan oracle for closed-annulus membership
bool contains_bruteforce(const RingSpec& ring, const TorusAnnulus& ann, const TorusPoint& z) {
    if (ann.inner > ann.outer) return false;
    for (int i = -5; i <= 5; ++i)
        for (int j = -5; j <= 5; ++j) {
            const std::complex<double> w =
                z.cart - ann.center.cart -
                (std::complex<double>(i, 0) + double(j) * ring.omega);
            const double d = std::abs(w);
            if (d >= ann.inner && d <= ann.outer) return true;
        }
    return false;
}

TorusPoint random_point(const RingSpec& ring, SplitMix64& rng) {
    return torus_point_from_uv(ring, rng.u01(), rng.u01());
}

} // namespace

TEST_CASE("reduce examples") {
    const RingSpec zi = make_ring(-4);
    const TorusPoint p = reduce(zi, {1.25, 0.5});
    CHECK(p.u == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(p.v == doctest::Approx(0.5).epsilon(1e-14));

    // lattice points land on (0, 0)
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
            const TorusPoint q = reduce(zi, std::complex<double>(a, b));
            CHECK(std::min(q.u, 1 - q.u) < 1e-12);
            CHECK(std::min(q.v, 1 - q.v) < 1e-12);
        }

    const RingSpec zj = make_ring(-3);
    const TorusPoint w = reduce(zj, zj.omega);
    CHECK(w.u == doctest::Approx(0.0));
    CHECK(w.v == doctest::Approx(0.0));

    // idempotent
    SplitMix64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const TorusPoint a = random_point(zj, rng);
        const TorusPoint b = reduce(zj, a.cart);
        CHECK(std::abs(a.u - b.u) < 1e-12);
        CHECK(std::abs(a.v - b.v) < 1e-12);
    }
}

TEST_CASE("cartesian cache is consistent") {
    SplitMix64 rng(5);
    for (std::int64_t d : {-4, -3, -163}) {
        const RingSpec ring = make_ring(d);
        for (int i = 0; i < 300; ++i) {
            const TorusPoint p = random_point(ring, rng);
            const std::complex<double> z =
                std::complex<double>(p.u, 0) + p.v * ring.omega;
            CHECK(std::abs(z - p.cart) < 1e-12);
        }
    }
}

TEST_CASE("torus_distance examples and properties") {
    const RingSpec zi = make_ring(-4);
    const TorusPoint o = torus_point_from_uv(zi, 0, 0);
    const TorusPoint c = torus_point_from_uv(zi, 0.5, 0.5);
    CHECK(torus_distance(zi, o, c) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
    CHECK(torus_distance(zi, c, c) == 0.0);

    SplitMix64 rng(7);
    for (std::int64_t d : {-4, -3, -7, -163}) {
        const RingSpec ring = make_ring(d);
        for (int i = 0; i < 2500; ++i) {
            const TorusPoint x = random_point(ring, rng);
            const TorusPoint y = random_point(ring, rng);
            const double dxy = torus_distance(ring, x, y);
            CHECK(dxy == doctest::Approx(torus_distance(ring, y, x)).epsilon(1e-12));
            CHECK(dxy <= ring.coveringRadius + 1e-9);
            CHECK(dxy <= std::abs(x.cart - y.cart) + 1e-12);
            CHECK(dxy == doctest::Approx(distance_bruteforce(ring, x, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("torus_distance triangle inequality") {
    SplitMix64 rng(11);
    for (std::int64_t d : {-4, -3, -163}) {
        const RingSpec ring = make_ring(d);
        for (int i = 0; i < 3500; ++i) {
            const TorusPoint x = random_point(ring, rng);
            const TorusPoint y = random_point(ring, rng);
            const TorusPoint z = random_point(ring, rng);
            CHECK(torus_distance(ring, x, z) <=
                  torus_distance(ring, x, y) + torus_distance(ring, y, z) + 1e-9);
        }
    }
}

TEST_CASE("annulus membership examples") {
    const RingSpec zi = make_ring(-4);
    const TorusPoint o = torus_point_from_uv(zi, 0, 0);
    const TorusPoint c = torus_point_from_uv(zi, 0.5, 0.5);

    // empty annulus
    TorusAnnulus empty{o, 0.7, 0.3, {0, 0}, {0, 0}};
    CHECK_FALSE(annulus_contains(zi, empty, c));
    CHECK_FALSE(annulus_contains(zi, empty, o));

    // |(0.5,0.5) - lambda| takes values sqrt(2)/2, then larger
    TorusAnnulus thin{o, 0.6, 0.65, {0, 0}, {0, 0}};
    CHECK_FALSE(annulus_contains(zi, thin, c));
    TorusAnnulus wider{o, 0.6, 0.72, {0, 0}, {0, 0}};
    CHECK(annulus_contains(zi, wider, c));

    // inner = 0 reduces to a torus disk
    SplitMix64 rng(13);
    for (int i = 0; i < 500; ++i) {
        const TorusPoint z = random_point(zi, rng);
        const double r = 0.05 + 0.6 * rng.u01();
        TorusAnnulus disk{o, 0.0, r, {0, 0}, {0, 0}};
        CHECK(annulus_contains(zi, disk, z) == (torus_distance(zi, z, o) <= r));
    }
}

TEST_CASE("annulus membership agrees with the 11x11 scan") {
    SplitMix64 rng(17);
    for (std::int64_t d : {-4, -3, -7}) {
        const RingSpec ring = make_ring(d);
        int disagreements = 0;
        for (int i = 0; i < 4000; ++i) {
            TorusAnnulus ann;
            ann.center = random_point(ring, rng);
            const double r1 = 3.0 * rng.u01();
            const double r2 = 3.0 * rng.u01();
            ann.inner = std::min(r1, r2);
            ann.outer = std::max(r1, r2);
            if (ann.outer - ann.inner >= std::abs(ring.omega)) continue; // oracle box too small
            const TorusPoint z = random_point(ring, rng);
            if (annulus_contains(ring, ann, z) != contains_bruteforce(ring, ann, z))
                ++disagreements;
        }
        CHECK(disagreements == 0);
    }
}

TEST_CASE("union_measure basics") {
    const RingSpec zi = make_ring(-4);
    QuadratureConfig cfg;
    cfg.mcGridN = 256;

    AnnulusSystem empty;
    empty.ring = zi;
    CHECK(union_measure(empty, cfg).value == 0.0);

    CHECK_THROWS_AS(([&] {
                        QuadratureConfig bad = cfg;
                        bad.mcGridN = 4;
                        union_measure(empty, bad);
                    }()),
                    std::invalid_argument);

    // full-cover annulus: width >= |omega|
    AnnulusSystem full;
    full.ring = zi;
    full.annuli.push_back({torus_point_from_uv(zi, 0, 0), 2.0, 3.5, {0, 0}, {0, 0}});
    CHECK(union_measure(full, cfg).value == 1.0);

    // a disk of radius 0.25 embeds injectively (0.5 < systole): its share of
    // the torus is (pi/16) / covolume, whatever the lattice
    for (std::int64_t d : {-4, -3, -163}) {
        const RingSpec ring = make_ring(d);
        AnnulusSystem disk;
        disk.ring = ring;
        disk.annuli.push_back({torus_point_from_uv(ring, 0.3, 0.6), 0.0, 0.25, {0, 0}, {0, 0}});
        const MeasureEstimate est = union_measure(disk, cfg);
        const double expect = std::numbers::pi / 16.0 / ring.covolume;
        CHECK(std::abs(est.value - expect) <= 3 * std::max(est.stderrEst, 1e-4));
    }
}

TEST_CASE("union_measure is monotone under adding annuli") {
    const RingSpec zj = make_ring(-3);
    QuadratureConfig cfg;
    cfg.mcGridN = 128;
    SplitMix64 rng(19);
    AnnulusSystem sys;
    sys.ring = zj;
    double prev = 0;
    for (int i = 0; i < 12; ++i) {
        TorusAnnulus ann;
        ann.center = random_point(zj, rng);
        ann.inner = 0.3 * rng.u01();
        ann.outer = ann.inner + 0.2 * rng.u01();
        sys.annuli.push_back(ann);
        const double v = union_measure(sys, cfg).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("union_measure is independent of thread count") {
    const RingSpec zi = make_ring(-4);
    QuadratureConfig cfg;
    cfg.mcGridN = 64;
    AnnulusSystem sys;
    sys.ring = zi;
    sys.annuli.push_back({torus_point_from_uv(zi, 0.3, 0.4), 0.1, 0.35, {0, 0}, {0, 0}});
    sys.annuli.push_back({torus_point_from_uv(zi, 0.7, 0.1), 0.0, 0.2, {0, 0}, {0, 0}});

#ifdef _OPENMP
    omp_set_num_threads(1);
    const double v1 = union_measure(sys, cfg).value;
    omp_set_num_threads(2);
    const double v2 = union_measure(sys, cfg).value;
    CHECK(v1 == v2);
#else
    CHECK(union_measure(sys, cfg).value == union_measure(sys, cfg).value);
#endif
}
