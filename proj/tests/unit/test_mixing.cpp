#include <gtest/gtest.h>

#include <cmath>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "oracles.hpp"
#include "orbitchaos/core/error.hpp"
#include "orbitchaos/core/grammar.hpp"
#include "orbitchaos/mixing/mixing.hpp"

using namespace orbitchaos;

namespace {

const auto kBaker = SystemDescriptor::baker();
const auto kPhi = SystemDescriptor::product_phi();
const EventSet kQuadrant = parse_event_set("box:0,0.5;0,0.5");
const EventSet kPhiStrip = parse_event_set("cyl:1:[0.5,0.75)");

/// 2 (1 - prod_{s >= k} (1 - 2^-s)) in 50-digit arithmetic, product taken
/// until the factors are 1 to working precision.
double tail_bound_oracle(int k) {
    using big = boost::multiprecision::cpp_dec_float_50;
    big p = 1;
    for (int s = k; s < k + 200; ++s) p *= 1 - pow(big(2), -s);
    return static_cast<double>(2 * (1 - p));
}

bool within(const MonteCarloEstimate& e, double exact, double z = 3.0) {
    return std::fabs(e.value - exact) <= z * e.std_error + 1e-15;
}

}  // namespace

TEST(Correlation, BakerQuadrantLagOne) {
    EXPECT_DOUBLE_EQ(correlation_exact(kBaker, kQuadrant, kQuadrant, 1), 1.0 / 16);
    EXPECT_TRUE(within(correlation(kBaker, kQuadrant, kQuadrant, 1, 200'000, 1), 1.0 / 16));
}

TEST(Correlation, BakerQuadrantLagTwo) {
    EXPECT_EQ(correlation_exact(kBaker, kQuadrant, kQuadrant, 2), 0.0);
    // |cov| has a folded distribution at 0, so compare on the 3 se scale only
    EXPECT_TRUE(within(correlation(kBaker, kQuadrant, kQuadrant, 2, 200'000, 2), 0.0));
}

TEST(Correlation, FullSpaceIsUncorrelated) {
    const auto full = parse_event_set("box:0,1;0,1");
    for (int k : {1, 3, 9}) {
        EXPECT_EQ(correlation_exact(kBaker, full, kQuadrant, k), 0.0);
        EXPECT_NEAR(correlation(SystemDescriptor::cat(), full, kQuadrant, k, 10'000, 3).value, 0.0, 1e-15);
    }
}

TEST(Correlation, ExactJointMatchesMembershipSampling) {
    const auto a = parse_event_set("box:0.25,0.75;0,0.5");
    const auto b = parse_event_set("box:0,0.5;0.25,1");
    const auto ra = DyadicRect::from_box(a.as_box());
    const auto rb = DyadicRect::from_box(b.as_box());
    SampleStream rng(4);
    for (auto [i, j] : {std::pair{0, 1}, {1, 3}, {2, 2}, {0, 5}}) {
        const double exact = *exact_joint_measure(kBaker, a, i, b, j);
        // independent oracle: fraction of the 2^-10 grid cells whose centre lands in both sets
        int hits = 0;
        const int m = 1 << 10;
        for (int cx = 0; cx < m; ++cx) {
            for (int cy = 0; cy < m; ++cy) {
                const auto x = PhaseSpacePoint::planar((cx + 0.5) / m, (cy + 0.5) / m);
                const auto xi = iterate(kBaker, x, i).as_planar();
                const auto xj = iterate(kBaker, x, j).as_planar();
                hits += ra.contains(xi.x, xi.y) && rb.contains(xj.x, xj.y);
            }
        }
        EXPECT_DOUBLE_EQ(exact, static_cast<double>(hits) / (m * m)) << i << "," << j;
    }
}

TEST(Correlation, ExactMethodSelection) {
    EXPECT_EQ(exact_method(kBaker, kQuadrant, kQuadrant), Method::exact_dyadic);
    EXPECT_EQ(exact_method(kPhi, kPhiStrip, kPhiStrip), Method::closed_form);
    EXPECT_FALSE(exact_method(SystemDescriptor::cat(), kQuadrant, kQuadrant).has_value());
    EXPECT_FALSE(exact_method(kBaker, parse_event_set("box:0,0.1;0,1"), kQuadrant).has_value());
    EXPECT_THROW(correlation_exact(SystemDescriptor::cat(), kQuadrant, kQuadrant, 1), UnsupportedSet);
    EXPECT_THROW(correlation(kBaker, kPhiStrip, kQuadrant, 1, 10, 1), DomainMismatch);
}

TEST(UniformCorrelation, BakerCollapsesToPlain) {
    for (int k = 1; k <= 4; ++k) {
        const auto u = uniform_correlation_exact(kBaker, kQuadrant, kQuadrant, k, 8);
        EXPECT_EQ(u.estimate.value, correlation_exact(kBaker, kQuadrant, kQuadrant, k));
        EXPECT_EQ(u.per_i.size(), 8u);
    }
    EXPECT_EQ(uniform_correlation_exact(kBaker, kQuadrant, kQuadrant, 2, 8).estimate.value, 0.0);
}

TEST(UniformCorrelation, ProductPhiFactorizesBeyondSupport) {
    for (int k = 2; k <= 6; ++k) {
        for (int i_max : {1, 4, 12}) {
            EXPECT_EQ(uniform_correlation_exact(kPhi, kPhiStrip, kPhiStrip, k, i_max).estimate.value, 0.0);
        }
    }
    const auto mc = uniform_correlation(kPhi, kPhiStrip, kPhiStrip, 3, 4, 50'000, 5);
    EXPECT_LE(mc.estimate.value, 4 * mc.estimate.std_error);
}

TEST(UniformCorrelation, EmptySetGivesZero) {
    const auto e = EventSet::empty();
    EXPECT_EQ(uniform_correlation(kBaker, e, kQuadrant, 1, 4, 1000, 6).estimate.value, 0.0);
    EXPECT_EQ(uniform_correlation_exact(kBaker, e, kQuadrant, 1, 4).estimate.value, 0.0);
}

TEST(UniformCorrelation, SmallestMaximizerOnTies) {
    const auto u = uniform_correlation_exact(kBaker, kQuadrant, kQuadrant, 1, 6);
    EXPECT_EQ(u.i_star, 1);
}

TEST(Scans, CarryMethodAndSeed) {
    const auto r = correlation_scan(kBaker, kQuadrant, kQuadrant, {1, 2}, 1000, 7, true);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.rows[0].method, Method::exact_dyadic);
    EXPECT_DOUBLE_EQ(r.rows[0].estimate.value, 1.0 / 16);
    const auto m = correlation_scan(kBaker, kQuadrant, kQuadrant, {1, 2}, 1000, 7, false);
    EXPECT_EQ(m.rows[1].method, Method::mc);
    EXPECT_EQ(m.rows[1].estimate.n_samples, 1000u);
    EXPECT_EQ(method_name(Method::closed_form), "closed-form");
}

TEST(Stationary, PhiStripLagOne) {
    const auto s = stationary_scan(kPhi, kPhiStrip, {1, 2, 5}, 100'000, 8);
    ASSERT_TRUE(s.nu.has_value());
    EXPECT_DOUBLE_EQ(*s.nu, 0.25);
    EXPECT_DOUBLE_EQ(*s.rows[0].exact, 0.5);
    EXPECT_DOUBLE_EQ(*s.rows[0].exact_gap, 0.25);
    EXPECT_DOUBLE_EQ(*s.rows[1].exact, 0.25);
    EXPECT_DOUBLE_EQ(*s.rows[1].exact_gap, 0.0);
    EXPECT_DOUBLE_EQ(*s.rows[2].exact_gap, 0.0);
    // independent value of the k = 1 row: mass of phi_2 on [1/2, 3/4)
    EXPECT_NEAR(oracle::phi_integral(2, [](double) { return 1.0; }, 0.5, 0.75), 0.5, 1e-12);
    for (const auto& row : s.rows) EXPECT_TRUE(within(row.estimate, *row.exact));
}

TEST(Stationary, BakerIsExactlyStationary) {
    const auto a = parse_event_set("box:0.125,0.5;0.25,0.875");
    const auto s = stationary_scan(kBaker, a, {0, 1, 2, 3, 7}, 20'000, 9);
    for (const auto& row : s.rows) EXPECT_DOUBLE_EQ(*row.exact, 0.375 * 0.625);
}

TEST(Stationary, RejectsBadLagLists) {
    EXPECT_THROW(stationary_scan(kBaker, kQuadrant, {2, 1}, 10, 1), Error);
    EXPECT_THROW(stationary_scan(kBaker, kQuadrant, {-1}, 10, 1), Error);
}

TEST(TailBound, MatchesHighPrecisionProduct) {
    for (int k = 1; k <= 40; ++k) {
        EXPECT_NEAR(tail_bound_check(k).bound, tail_bound_oracle(k), 1e-14 * std::max(1.0, tail_bound_oracle(k)))
            << k;
    }
    EXPECT_NEAR(tail_bound_check(1).bound, 1.4224238098, 1e-10);
    EXPECT_EQ(tail_bound_check(1).partial_product_terms, 61);
}

TEST(TailBound, DecreasesToZero) {
    for (int k = 1; k < 60; ++k) EXPECT_LT(tail_bound_check(k + 1).bound, tail_bound_check(k).bound);
    EXPECT_LT(tail_bound_check(4).bound, tail_bound_check(3).bound);
    EXPECT_LT(tail_bound_check(60).bound, 1e-17);
}

TEST(TailBound, DominatesExactGaps) {
    SampleStream rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const double lo = uniform_index(rng, 16) / 16.0;
        const auto a = EventSet::cylinder({{1 + static_cast<int>(uniform_index(rng, 3)), Interval(lo, lo + 1.0 / 16)}});
        for (int k = 1; k <= 8; ++k) {
            const double gap = std::fabs(*exact_preimage_measure(kPhi, a, k) - *stationary_limit_measure(kPhi, a));
            EXPECT_LE(gap, tail_bound_check(k).bound);
        }
    }
}

TEST(PreimageCache, MatchesDirectPreimage) {
    const auto base = DyadicRect::from_box(kQuadrant.as_box());
    PreimageCache cache(base);
    for (int k : {3, 1, 6, 0, 6}) EXPECT_EQ(cache.get(k), baker_preimage(base, k));
}
