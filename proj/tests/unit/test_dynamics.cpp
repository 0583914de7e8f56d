#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "orbitchaos/chaos/chaos.hpp"
#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/estimate.hpp"
#include "orbitchaos/core/grammar.hpp"
#include "orbitchaos/core/parallel.hpp"
#include "orbitchaos/dynamics/system.hpp"

using namespace orbitchaos;

namespace {

PlanarPoint step(const SystemDescriptor& sys, double x, double y, int k = 1) {
    return iterate(sys, PhaseSpacePoint::planar(x, y), k).as_planar();
}

template <class F>
MonteCarloEstimate mc_mean(std::uint64_t n, std::uint64_t seed, F&& f) {
    return run_batched<MeanAccumulator>(n, seed, [&](SampleStream& rng, MeanAccumulator& acc) { acc.add(f(rng)); })
        .estimate(seed);
}

}  // namespace

TEST(Iterate, BakerLowerBranch) {
    const auto p = step(SystemDescriptor::baker(), 0.25, 0.5);
    EXPECT_EQ(p.x, 0.5);
    EXPECT_EQ(p.y, 0.25);
}

TEST(Iterate, BakerUpperBranch) {
    const auto p = step(SystemDescriptor::baker(), 0.75, 0.5);
    EXPECT_EQ(p.x, 0.5);
    EXPECT_EQ(p.y, 0.75);
}

TEST(Iterate, CatWrapsModOne) {
    const auto p = step(SystemDescriptor::cat(), 0.5, 0.5);
    EXPECT_EQ(p.x, 0.0);
    EXPECT_EQ(p.y, 0.5);
}

TEST(Iterate, ZeroStepsIsIdentity) {
    const auto x = PhaseSpacePoint::planar(0.3, 0.7);
    EXPECT_EQ(iterate(SystemDescriptor::baker(), x, 0), x);
    EXPECT_EQ(iterate(SystemDescriptor::cat(), x, 0), x);
    const auto w = PhaseSpacePoint::product(1, {0.1, 0.2, 0.3});
    EXPECT_EQ(iterate(SystemDescriptor::product_phi(), w, 0), w);
}

TEST(Iterate, CatIsInvertibleOnGrid) {
    // inverse of [[1,1],[1,2]] is [[2,-1],[-1,1]], applied on the 2^-53 grid
    const auto cat = SystemDescriptor::cat();
    const auto grid = [](double v) { return static_cast<std::int64_t>(std::ldexp(v, 53)); };
    const std::int64_t mask = (std::int64_t{1} << 53) - 1;
    SampleStream rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = uniform01(rng), y = uniform01(rng);
        const auto p = step(cat, x, y);
        EXPECT_EQ((2 * grid(p.x) - grid(p.y)) & mask, grid(x));
        EXPECT_EQ((grid(p.y) - grid(p.x)) & mask, grid(y));
    }
}

TEST(Iterate, CompositionAddsSteps) {
    for (const auto& sys : {SystemDescriptor::baker(), SystemDescriptor::cat()}) {
        const auto x = PhaseSpacePoint::planar(0.1234375, 0.65625);
        EXPECT_EQ(iterate(sys, iterate(sys, x, 3), 4), iterate(sys, x, 7));
    }
}

TEST(Iterate, ProductShiftAppliesInnerMapAndDrops) {
    const auto sys = SystemDescriptor::product_shift(InnerMap::baker);
    const auto w = PhaseSpacePoint::product(2, {0.1, 0.2, 0.25, 0.5, 0.75, 0.5});
    const auto s = iterate(sys, w, 1).as_product();
    ASSERT_EQ(s.depth(), 2u);
    EXPECT_EQ(s.coords, (std::vector<double>{0.5, 0.25, 0.5, 0.75}));
    EXPECT_THROW(iterate(sys, w, 3), Error);
    const auto id = iterate(SystemDescriptor::product_phi(), PhaseSpacePoint::product(1, {0.1, 0.2, 0.3}), 2);
    EXPECT_EQ(id.as_product().coords, std::vector<double>{0.3});
}

TEST(Sample, LebesgueSquareMean) {
    const auto sys = SystemDescriptor::baker();
    const auto m = mc_mean(1'000'000, 3, [&](SampleStream& rng) { return sample(sys, rng, 0).as_planar().x; });
    EXPECT_LE(std::fabs(m.value - 0.5), 3 * m.std_error);
}

TEST(Sample, PhiCoordinateMeans) {
    const auto sys = SystemDescriptor::product_phi();
    const double mean1 = oracle::phi_integral(1, [](double x) { return x; }, 0.0, 1.0);
    const double mean2 = oracle::phi_integral(2, [](double x) { return x; }, 0.0, 1.0);
    EXPECT_NEAR(mean1, 0.25, 1e-12);
    EXPECT_NEAR(mean2, 7.0 / 16.0, 1e-12);
    const auto m1 = mc_mean(1'000'000, 4, [&](SampleStream& rng) { return sample(sys, rng, 2).as_product().coords[0]; });
    const auto m2 = mc_mean(1'000'000, 5, [&](SampleStream& rng) { return sample(sys, rng, 2).as_product().coords[1]; });
    EXPECT_LE(std::fabs(m1.value - mean1), 3 * m1.std_error);
    EXPECT_LE(std::fabs(m2.value - mean2), 3 * m2.std_error);
}

TEST(Sample, SphereRadius) {
    const auto p = sample(SystemDescriptor::sphere_static(10), 7, 0).as_sphere();
    double r2 = 0.0;
    for (double v : p.x) r2 += v * v;
    EXPECT_NEAR(r2, 10.0, 1e-12);
}

TEST(BaseMeasure, SquareBox) {
    EXPECT_DOUBLE_EQ(base_measure_of_box(SystemDescriptor::baker(), parse_event_set("box:0,0.5;0,0.25")), 0.125);
}

TEST(BaseMeasure, PhiCylinders) {
    const auto sys = SystemDescriptor::product_phi();
    const auto one = [](double) { return 1.0; };
    EXPECT_NEAR(oracle::phi_integral(2, one, 0.5, 0.75), 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(base_measure_of_box(sys, parse_event_set("cyl:2:[0.5,0.75)")), 0.5);
    EXPECT_DOUBLE_EQ(base_measure_of_box(sys, parse_event_set("cyl:1:[0,1)")), 1.0);
    EXPECT_NEAR(base_measure_of_box(sys, parse_event_set("cyl:1:[0.25,0.5);3:[0.75,1)")),
                oracle::phi_integral(1, one, 0.25, 0.5) * oracle::phi_integral(3, one, 0.75, 1.0), 1e-12);
    EXPECT_THROW(base_measure_of_box(SystemDescriptor::sphere_static(4), parse_event_set("box:0,1;0,1")), UnsupportedSet);
}

TEST(PhiDensity, MatchesDefinition) {
    for (int k = 1; k <= 6; ++k) {
        for (double x : {0.0, 0.1, 0.3, 0.5, 0.6, 0.74, 0.8, 0.9, 0.97, 0.999}) {
            EXPECT_EQ(phi_density::density(k, x), oracle::phi(k, x)) << k << " " << x;
            const double F = oracle::phi_integral(k, [](double) { return 1.0; }, 0.0, x > 0 ? x : 1e-300);
            EXPECT_NEAR(phi_density::cdf(k, x), F, 1e-12);
        }
        for (double u : {0.0, 0.2, 0.5, 0.7, 0.9, 0.99}) {
            EXPECT_NEAR(phi_density::cdf(k, phi_density::inverse_cdf(k, u)), u, 1e-15);
        }
    }
}

TEST(BakerPreimage, VerticalHalf) {
    const auto a = DyadicRect::from_box(parse_event_set("box:0,0.5;0,1").as_box());
    const auto p = baker_preimage(a, 1);
    const auto expected = DyadicRect::from_box(parse_event_set("box:0,0.25;0,1").as_box());
    const auto expected2 = DyadicRect::from_box(parse_event_set("box:0.5,0.75;0,1").as_box());
    EXPECT_DOUBLE_EQ(p.measure(), 0.5);
    EXPECT_DOUBLE_EQ(p.intersect(expected).measure(), 0.25);
    EXPECT_DOUBLE_EQ(p.intersect(expected2).measure(), 0.25);
}

TEST(BakerPreimage, Quadrant) {
    const auto a = DyadicRect::from_box(parse_event_set("box:0,0.5;0,0.5").as_box());
    const auto p = baker_preimage(a, 1);
    EXPECT_DOUBLE_EQ(p.measure(), 0.25);
    EXPECT_DOUBLE_EQ(p.intersect(DyadicRect::from_box(parse_event_set("box:0,0.25;0,1").as_box())).measure(), 0.25);
    EXPECT_EQ(baker_preimage(a, 0), a);
}

TEST(BakerPreimage, MembershipAgreesWithForwardMap) {
    const auto baker = SystemDescriptor::baker();
    const auto a = DyadicRect::from_box(parse_event_set("box:0.25,0.625;0.125,0.75").as_box());
    for (int k = 1; k <= 5; ++k) {
        const auto p = baker_preimage(a, k);
        EXPECT_DOUBLE_EQ(p.measure(), a.measure());
        SampleStream rng(100 + k);
        for (int i = 0; i < 20000; ++i) {
            const double x = uniform01(rng), y = uniform01(rng);
            const auto s = step(baker, x, y, k);
            ASSERT_EQ(p.contains(x, y), a.contains(s.x, s.y)) << k << " " << x << " " << y;
        }
    }
}

TEST(BakerPreimage, ResolutionLimit) {
    const auto a = DyadicRect::from_box(parse_event_set("box:0,0.5;0,0.5").as_box());
    EXPECT_NO_THROW(baker_preimage(a, 12));
    EXPECT_THROW(baker_preimage(a, 30), ResolutionOverflow);
}

TEST(Trajectory, CatMatchesIterate) {
    const auto cat = SystemDescriptor::cat();
    SampleStream rng(8);
    const auto t = sample_trajectory(cat, rng, 20);
    ASSERT_EQ(t.size(), 21u);
    for (int k = 1; k <= 20; ++k) EXPECT_EQ(t[k], iterate(cat, t[k - 1], 1));
}

TEST(Trajectory, BakerRefillsLowBits) {
    const auto baker = SystemDescriptor::baker();
    SampleStream rng(9);
    const auto t = sample_trajectory(baker, rng, 200);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const auto prev = iterate(baker, t[k - 1], 1).as_planar();
        const auto cur = t[k].as_planar();
        EXPECT_LE(std::fabs(prev.x - cur.x), 0x1.0p-53);
        EXPECT_EQ(prev.y, cur.y);
    }
    // far along the orbit x is still spread over [0, 1)
    int upper = 0;
    SampleStream rng2(10);
    for (int i = 0; i < 2000; ++i) upper += sample_trajectory(baker, rng2, 120)[120].as_planar().x >= 0.5;
    EXPECT_NEAR(upper / 2000.0, 0.5, 0.05);
}

TEST(Trajectory, ProductFollowsShiftRule) {
    // (S w)_1 = T(w_2): the first factor of each step is the inner map applied
    // to the second factor of the previous point
    const auto sys = SystemDescriptor::product_shift(InnerMap::cat);
    SampleStream rng(12);
    const auto t = sample_trajectory(sys, rng, 5, 2);
    ASSERT_EQ(t.size(), 6u);
    for (std::size_t k = 1; k < t.size(); ++k) {
        ASSERT_EQ(t[k].as_product().depth(), 2u);
        const auto prev = t[k - 1].as_product().factor(2);
        const auto expect = step(SystemDescriptor::cat(), prev[0], prev[1]);
        const auto cur = t[k].as_product().factor(1);
        EXPECT_EQ(cur[0], expect.x);
        EXPECT_EQ(cur[1], expect.y);
    }
}

TEST(OrbitTuple, BakerTwoSteps) {
    const auto t = orbit_tuple_of(SystemDescriptor::baker(), PhaseSpacePoint::planar(0.25, 0.5), 2);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t.values[0], PhaseSpacePoint::planar(0.5, 0.25));
    EXPECT_EQ(t.values[1], PhaseSpacePoint::planar(0.0, 0.625));
    EXPECT_EQ(t.order, (std::vector<int>{1, 2}));
}

TEST(Registry, RoundTripsIds) {
    for (const char* id : {"baker", "cat", "product-phi", "product-shift:identity", "product-shift:baker",
                           "product-shift:cat", "sphere:8"}) {
        EXPECT_EQ(make_system(id).id(), id);
    }
    EXPECT_THROW(make_system("tent"), Error);
    EXPECT_FALSE(SystemDescriptor::product_phi().is_measure_preserving);
}
