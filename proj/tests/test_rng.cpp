#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "sle4/rng.hpp"

using namespace sle4::rng;

namespace {

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero) {
    const Block out = philox4x32_10({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
    const Block out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    const Block out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(OpenUnit, StaysInsideTheInterval) {
    EXPECT_GT(to_open_unit(0u), 0.0);
    EXPECT_LT(to_open_unit(0xffffffffu), 1.0);
}

TEST(PhiloxEngine, DeterministicAndRandomAccess) {
    PhiloxEngine a(42, 7, Stream::Normal);
    PhiloxEngine b(42, 7, Stream::Normal);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
    const PhiloxEngine c(42, 7, Stream::Normal);
    EXPECT_EQ(c.block(3), c.block(3));
}

TEST(PhiloxEngine, StreamsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t seed : {1u, 2u}) {
        for (std::uint64_t path : {0u, 1u, 1000u}) {
            for (Stream s : {Stream::Normal, Stream::Barrier}) {
                PhiloxEngine e(seed, path, s);
                EXPECT_TRUE(seen.insert(e()).second);
            }
        }
    }
}

TEST(PathNoise, NormalMoments) {
    PathNoise noise(3, 11);
    constexpr int n = 200000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = noise.next_normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(PathNoise, BarrierUniformsIndependentOfNormalConsumption) {
    PathNoise a(5, 9);
    PathNoise b(5, 9);
    for (int i = 0; i < 37; ++i) (void)b.next_normal();
    for (std::uint64_t step : {0u, 1u, 17u, 100000u}) EXPECT_EQ(a.barrier_uniforms(step), b.barrier_uniforms(step));
    const auto u = a.barrier_uniforms(4);
    EXPECT_GT(u[0], 0.0);
    EXPECT_LT(u[1], 1.0);
}

TEST(PathNoise, UniformMean) {
    const PathNoise noise(8, 2);
    double s = 0.0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) s += noise.barrier_uniforms(static_cast<std::uint64_t>(i))[0];
    EXPECT_NEAR(s / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

}  // namespace
