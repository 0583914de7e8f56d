#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "orbitchaos/chaos/chaos.hpp"
#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/grammar.hpp"

using namespace orbitchaos;

namespace {

const auto kBaker = SystemDescriptor::baker();
const auto kCat = SystemDescriptor::cat();
const auto kPlanar = FunctionDomain::planar();
const auto kStrip = parse_test_function("ind:box:0,0.5;0,1", kPlanar);
const auto kStripSet = parse_event_set("box:0,0.5;0,1");
const auto kQuadrantSet = parse_event_set("box:0,0.5;0,0.5");

NuIntegral closed(double v) { return {v, 0.0, NuProvenance::closed_form}; }

bool within(const MonteCarloEstimate& e, double exact, double z = 3.0) {
    return std::fabs(e.value - exact) <= z * e.std_error + 1e-15;
}

}  // namespace

TEST(Oracles, DigitEnumerationMatchesClosedForm) {
    for (int n = 1; n <= 16; ++n) EXPECT_NEAR(oracle::baker_strip_j(n), 0.25 / n, 1e-13) << n;
}

TEST(ChaosFunctional, ConstantIsZero) {
    const auto c = parse_test_function("const:2.5", kPlanar);
    for (const auto& sys : {kBaker, kCat}) {
        for (int n : {1, 7, 64}) {
            const auto j = chaos_functional(sys, c, n, closed(2.5), 2000, 1);
            EXPECT_EQ(j.value, 0.0);
            EXPECT_EQ(j.std_error, 0.0);
        }
    }
}

TEST(ChaosFunctional, BakerStripRate) {
    for (int n : {8, 32, 128}) {
        const auto j = chaos_functional(kBaker, kStrip, n, closed(0.5), 100'000, 100 + n);
        const double expected = n <= 16 ? oracle::baker_strip_j(n) : 0.25 / n;
        EXPECT_TRUE(within(j, expected)) << n << " " << j.value;
    }
}

TEST(ChaosFunctional, BakerQuadrantMatchesEnumeration) {
    const auto g = parse_test_function("ind:box:0,0.5;0,0.5", kPlanar);
    for (int n : {4, 10}) {
        const auto j = chaos_functional(kBaker, g, n, closed(0.25), 100'000, 200 + n);
        EXPECT_TRUE(within(j, oracle::baker_quadrant_j(n))) << n << " " << j.value << " vs " << oracle::baker_quadrant_j(n);
    }
}

TEST(ChaosFunctional, CatCosineDecreases) {
    const auto g = parse_test_function("trig:cos:1,0", kPlanar);
    const auto r = chaos_sweep(kCat, g, {8, 16, 32, 64, 128}, closed(0.0), 20'000, 3);
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].j_n.value, r.rows[i - 1].j_n.value);
    EXPECT_LT(r.rows.back().j_n.value, r.rows.front().j_n.value);
}

TEST(ChaosFunctional, PermutedAgreesWithUnpermuted) {
    const auto plain = chaos_functional(kBaker, kStrip, 16, closed(0.5), 50'000, 4, false);
    const auto perm = chaos_functional(kBaker, kStrip, 16, closed(0.5), 50'000, 5, true);
    EXPECT_LE(std::fabs(plain.value - perm.value), 3 * std::hypot(plain.std_error, perm.std_error));
}

TEST(ChaosFunctional, MissingNuThrows) {
    EXPECT_THROW(chaos_functional(kBaker, kStrip, 4, std::nullopt, 10, 1), MissingStationaryLimit);
    const auto sphere = SystemDescriptor::sphere_static(4);
    EXPECT_THROW(resolve_nu(sphere, kStrip, 100, 1), Error);
}

TEST(ChaosFunctional, NuErrorIsPropagated) {
    const auto exact = chaos_functional(kBaker, kStrip, 8, closed(0.5), 10'000, 6);
    const auto noisy = chaos_functional(kBaker, kStrip, 8, NuIntegral{0.5, 0.01, NuProvenance::stationary_extrapolation},
                                        10'000, 6);
    EXPECT_EQ(exact.value, noisy.value);
    EXPECT_GT(noisy.std_error, exact.std_error);
}

TEST(ResolveNu, ClosedFormsAndExtrapolation) {
    const auto nu = resolve_nu(kBaker, parse_test_function("poly:x*y", kPlanar), 100, 1);
    EXPECT_EQ(nu.provenance, NuProvenance::closed_form);
    EXPECT_DOUBLE_EQ(nu.value, 0.25);
    const auto phi = SystemDescriptor::product_phi();
    const auto strip = parse_test_function("ind:cyl:1:[0.5,0.75)", phi.domain());
    EXPECT_DOUBLE_EQ(resolve_nu(phi, strip, 100, 1).value, 0.25);
    EXPECT_EQ(provenance_name(NuProvenance::stationary_extrapolation), "stationary-extrapolation");
}

TEST(ChaosSweep, SharedSamplesAndSlope) {
    const auto r = chaos_sweep(kBaker, kStrip, {8, 16, 32, 64, 128}, closed(0.5), 50'000, 7);
    ASSERT_EQ(r.rows.size(), 5u);
    ASSERT_TRUE(r.slope.has_value());
    EXPECT_NEAR(*r.slope, -1.0, 0.05);
    for (const auto& row : r.rows) EXPECT_TRUE(within(row.j_n, 0.25 / row.n, 4.0));
    EXPECT_EQ(r.g_id, "ind:box:0,0.5;0,1");
    EXPECT_EQ(r.system, "baker");
}

TEST(WeightedSlope, ExactLineAndDegenerateInputs) {
    const auto f = weighted_slope({0, 1, 2, 3}, {1, 3, 5, 7}, {1, 2, 1, 3});
    ASSERT_TRUE(f.has_value());
    EXPECT_NEAR(f->slope, 2.0, 1e-12);
    EXPECT_GT(f->half_width, 0.0);
    EXPECT_FALSE(weighted_slope({0, 1}, {0, 1}, {1, 1}).has_value());
    EXPECT_FALSE(weighted_slope({0, 1, 2}, {0, NAN, 1}, {1, 1, 1}).has_value());
}

TEST(MarginalFactorization, BakerStripPairs) {
    const auto r = marginal_factorization_test(kBaker, {kStrip, kStrip}, 16, {0.5, 0.5}, 100'000, 8);
    EXPECT_DOUBLE_EQ(r.rhs, 0.25);
    EXPECT_TRUE(within(r.lhs, 0.25));
}

TEST(MarginalFactorization, SingleMarginalCesaroMean) {
    const auto phi = SystemDescriptor::product_phi();
    const auto g = parse_test_function("ind:cyl:1:[0.5,0.75)", phi.domain());
    for (int n : {2, 8, 32}) {
        const auto r = marginal_factorization_test(phi, {g}, n, {0.25}, 50'000, 9);
        const double cesaro = (0.5 + 0.25 * (n - 1)) / n;  // i = 1 has mass 1/2, later lags 1/4
        EXPECT_TRUE(within(r.lhs, cesaro)) << n;
        EXPECT_NEAR(r.gap, std::fabs(r.lhs.value - 0.25), 1e-15);
    }
}

TEST(MarginalFactorization, ArityChecks) {
    EXPECT_THROW(marginal_factorization_test(kBaker, {kStrip, kStrip, kStrip}, 8, {0.5, 0.5, 0.5}, 10, 1), ArityError);
    EXPECT_THROW(marginal_factorization_test(kBaker, {kStrip, kStrip}, 1, {0.5, 0.5}, 10, 1), ArityError);
    EXPECT_THROW(marginal_factorization_test(kBaker, {kStrip, kStrip}, 4, {0.5}, 10, 1), ArityError);
}

TEST(OrbitTuple, PermutationReordersSameOrbit) {
    const auto plain = sample_orbit_tuple(kCat, 12, 77, false);
    const auto perm = sample_orbit_tuple(kCat, 12, 77, true);
    auto sorted = perm.order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 12; ++i) EXPECT_EQ(sorted[i], i + 1);
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(perm.values[i], plain.values[perm.order[i] - 1]);
    EXPECT_NE(perm.order, plain.order);
}

TEST(Symmetrization, IdentityAndSwaps) {
    const auto orbit = sample_orbit_tuple(kBaker, 2, 10, false);
    EXPECT_EQ(symmetrization_invariance_check(kStrip, orbit, 0.5, 0, 1), 0.0);
    EXPECT_LE(symmetrization_invariance_check(parse_test_function("poly:x*y", kPlanar), orbit, 0.25, 10, 2), 1e-12);
}

TEST(Symmetrization, ManyPermutationsOfLongOrbit) {
    const auto orbit = sample_orbit_tuple(kBaker, 64, 11, false);
    for (const char* g : {"ind:box:0,0.5;0,1", "trig:cos:1,0", "poly:2*x^2-y+1"}) {
        const auto fn = parse_test_function(g, kPlanar);
        EXPECT_LE(symmetrization_invariance_check(fn, orbit, lebesgue_integral(fn), 1000, 12), 1e-12) << g;
    }
}

TEST(EmpiricalMean, OrderIndependentBitForBit) {
    const auto g = parse_test_function("trig:sin:3,1", kPlanar);
    auto orbit = sample_orbit_tuple(kCat, 50, 13, false);
    const double base = empirical_mean(g, orbit);
    std::reverse(orbit.values.begin(), orbit.values.end());
    EXPECT_EQ(empirical_mean(g, orbit), base);
}

TEST(Decomposition, StripExactTotal) {
    for (int n : {4, 8, 12}) {
        const auto d = prop33_decomposition(kBaker, kStripSet, n, DecompositionMode::exact, 0, 0);
        EXPECT_NEAR(d.total.value, oracle::baker_strip_j(n), 1e-13);
        EXPECT_LE(d.residual, 1e-12);
        EXPECT_EQ(d.method, Method::exact_dyadic);
        EXPECT_NEAR(d.pair_sum, d.pair_covariance + d.pair_product, 1e-15);
        for (double s : d.lag_sums) EXPECT_NEAR(s, 0.0, 1e-15);
    }
    EXPECT_DOUBLE_EQ(prop33_decomposition(kBaker, kStripSet, 8, DecompositionMode::exact, 0, 0).total.value, 1.0 / 32);
}

TEST(Decomposition, SingleTermHasNoPairs) {
    const auto d = prop33_decomposition(kBaker, kQuadrantSet, 1, DecompositionMode::exact, 0, 0);
    EXPECT_EQ(d.pair_covariance, 0.0);
    EXPECT_EQ(d.pair_product, 0.0);
    EXPECT_TRUE(d.lag_sums.empty());
    const double m = 0.25, nu = 0.25;
    EXPECT_NEAR(d.total.value, m - 2 * nu * m + nu * nu, 1e-15);
}

TEST(Decomposition, QuadrantLagOneOnly) {
    const auto d = prop33_decomposition(kBaker, kQuadrantSet, 4, DecompositionMode::exact, 0, 0);
    ASSERT_EQ(d.lag_sums.size(), 3u);
    EXPECT_DOUBLE_EQ(d.lag_sums[0], 3.0 / 16);
    EXPECT_EQ(d.lag_sums[1], 0.0);
    EXPECT_EQ(d.lag_sums[2], 0.0);
    EXPECT_LE(d.residual, 1e-12);
    EXPECT_NEAR(d.total.value, oracle::baker_quadrant_j(4), 1e-13);
    EXPECT_NEAR(prop33_decomposition(kBaker, kQuadrantSet, 9, DecompositionMode::exact, 0, 0).total.value,
                oracle::baker_quadrant_j(9), 1e-13);
}

TEST(Decomposition, MonteCarloModeAgreesWithExact) {
    const auto exact = prop33_decomposition(kBaker, kQuadrantSet, 6, DecompositionMode::exact, 0, 0);
    const auto mc = prop33_decomposition(kBaker, kQuadrantSet, 6, DecompositionMode::mc, 100'000, 14);
    EXPECT_TRUE(within(mc.total, exact.total.value));
    EXPECT_LE(mc.residual, 1e-9);
}

TEST(Decomposition, ProductPhiClosedForm) {
    const auto phi = SystemDescriptor::product_phi();
    const auto d = prop33_decomposition(phi, parse_event_set("cyl:1:[0.5,0.75)"), 5, DecompositionMode::exact, 0, 0);
    EXPECT_EQ(d.method, Method::closed_form);
    EXPECT_LE(d.residual, 1e-12);
    EXPECT_THROW(prop33_decomposition(kCat, kQuadrantSet, 4, DecompositionMode::exact, 0, 0), UnsupportedSet);
}

TEST(DefaultFamilies, ShapesPerSystem) {
    EXPECT_EQ(default_test_functions(kBaker).size(), 5u);
    EXPECT_EQ(default_test_functions(SystemDescriptor::product_shift(InnerMap::cat)).size(), 5u);
    EXPECT_TRUE(default_test_functions(SystemDescriptor::sphere_static(6)).empty());
    for (const auto& g : default_test_functions(SystemDescriptor::product_shift(InnerMap::identity))) {
        EXPECT_TRUE(g.accepts(SpaceKind::product, 1));
    }
}
