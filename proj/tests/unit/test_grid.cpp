// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/grid.hpp"
#include "ldm3d/rng.hpp"

#include "test_util.hpp"

#include <set>

using namespace ldm3d;
using ldm3d::testing::throws_code;

namespace {
struct TestTag;
using Rgb = Grid<int, 3, TestTag>;
} // namespace

TEST(Grid, InterleavedRowMajorLayout) {
    Rgb g(3, 2);
    g.at(2, 1, 1) = 7;
    EXPECT_EQ(g.values()[(1 * 3 + 2) * 3 + 1], 7);
    EXPECT_EQ(g.pixel(5)[1], 7);
    EXPECT_EQ(g.pixel_count(), 6u);
}

TEST(Grid, RejectsZeroDimensions) {
    EXPECT_TRUE(throws_code([] { Rgb(0, 4); }, ErrorCode::InvalidArgument));
    EXPECT_TRUE(throws_code([] { Rgb(4, 0); }, ErrorCode::InvalidArgument));
}

TEST(Grid, RejectsWrongBufferSize) {
    EXPECT_TRUE(throws_code([] { Rgb(2, 2, std::vector<int>(11)); }, ErrorCode::DimensionMismatch));
}

TEST(Grid, EqualityComparesContents) {
    Rgb a(2, 2, 1), b(2, 2, 1);
    EXPECT_EQ(a, b);
    b.at(0, 0, 2) = 3;
    EXPECT_NE(a, b);
}

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.next_u64(), b.next_u64());
    }
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
    Rng rng(3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, NormalMomentsAreStandard) {
    Rng rng(11);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}
