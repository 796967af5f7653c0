#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "facmon/rng.hpp"

using namespace facmon;

TEST(Philox, DeterministicAndKeySensitive) {
    const rng::Block c{7, 11, 0, 0};
    const rng::Block a = rng::philox4(1, 2, c);
    const rng::Block b = rng::philox4(1, 2, c);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, rng::philox4(1, 3, c));
    EXPECT_NE(a, rng::philox4(2, 2, c));
    EXPECT_NE(a, rng::philox4(1, 2, rng::Block{7, 12, 0, 0}));
}

TEST(Philox, LanesDiffer) {
    const rng::Block b = rng::philox4(42, 0, rng::Block{0, 0, 0, 0});
    std::set<std::uint64_t> lanes(b.begin(), b.end());
    EXPECT_EQ(lanes.size(), 4u);
}

TEST(DeriveSeed, SpreadsIndices) {
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(rng::derive_seed(123, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(rng::derive_seed(123, 0), rng::derive_seed(124, 0));
}

TEST(InverseNormal, KnownQuantiles) {
    EXPECT_NEAR(rng::inverse_normal_cdf(0.5), 0.0, 1e-15);
    EXPECT_NEAR(rng::inverse_normal_cdf(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(rng::inverse_normal_cdf(0.95), 1.6448536269514722, 1e-12);
    EXPECT_NEAR(rng::inverse_normal_cdf(0.05), -1.6448536269514722, 1e-12);
    EXPECT_NEAR(rng::inverse_normal_cdf(1e-10), -6.361340902404056, 1e-9);
    EXPECT_THROW(rng::inverse_normal_cdf(0.0), std::invalid_argument);
    EXPECT_THROW(rng::inverse_normal_cdf(1.0), std::invalid_argument);
}

TEST(InverseNormal, RoundTripsCdf) {
    for (double x : {-3.5, -1.0, -0.1, 0.0, 0.3, 2.0, 4.0}) {
        EXPECT_NEAR(rng::inverse_normal_cdf(rng::normal_cdf(x)), x, 1e-9) << "x=" << x;
    }
}

TEST(NormalStream, FillMatchesIndexedAccess) {
    rng::NormalStream s(99, rng::Purpose::theta_draws, 17);
    std::vector<double> bulk(23);
    s.fill_normal(bulk);
    for (std::size_t i = 0; i < bulk.size(); ++i) {
        EXPECT_EQ(bulk[i], s.normal_at(i)) << "i=" << i;
    }
}

TEST(NormalStream, StreamsAreIndependentAcrossMajorAndPurpose) {
    rng::NormalStream a(5, rng::Purpose::theta_draws, 1);
    rng::NormalStream b(5, rng::Purpose::theta_draws, 2);
    rng::NormalStream c(5, rng::Purpose::gamma_draws, 1);
    EXPECT_NE(a.normal_at(0), b.normal_at(0));
    EXPECT_NE(a.normal_at(0), c.normal_at(0));
}

TEST(NormalStream, MomentsLookStandardNormal) {
    rng::NormalStream s(2024, rng::Purpose::dgp_idio, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal_at(i);
        sum += x;
        sum2 += x * x;
        sum3 += x * x * x;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sum2 / n, 1.0, 0.02);
    EXPECT_NEAR(sum3 / n, 0.0, 0.05);
}

TEST(NormalStream, UniformStaysInsideOpenInterval) {
    rng::NormalStream s(7, rng::Purpose::dgp_idio_scales, 0);
    for (int i = 0; i < 1000; ++i) {
        const double u = s.uniform_at(i);
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}
