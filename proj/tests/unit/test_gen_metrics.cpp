// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/gen_metrics.hpp"
#include "ldm3d/rng.hpp"

#include "test_util.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace ldm3d;
using ldm3d::testing::slurp;
using ldm3d::testing::spit;
using ldm3d::testing::throws_code;

namespace {

FeatureSet random_features(Rng &rng, std::size_t n, std::size_t d, double shift = 0.0) {
    std::vector<double> rows(n * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = rng.normal() * (1.0 + 0.3 * static_cast<double>(i % d)) + shift;
    }
    return FeatureSet(n, d, std::move(rows));
}

Eigen::MatrixXd as_matrix(const FeatureSet &f) {
    Eigen::MatrixXd m(f.n(), f.d());
    for (std::size_t i = 0; i < f.n(); ++i) {
        for (std::size_t j = 0; j < f.d(); ++j) {
            m(i, j) = f.row(i)[j];
        }
    }
    return m;
}

double eigen_fid(const FeatureSet &fa, const FeatureSet &fb) {
    const Eigen::MatrixXd a = as_matrix(fa), b = as_matrix(fb);
    const Eigen::RowVectorXd ma = a.colwise().mean(), mb = b.colwise().mean();
    const Eigen::MatrixXd ca = (a.rowwise() - ma).transpose() * (a.rowwise() - ma) / (a.rows() - 1.0);
    const Eigen::MatrixXd cb = (b.rowwise() - mb).transpose() * (b.rowwise() - mb) / (b.rows() - 1.0);
    const Eigen::MatrixXd sa = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ca).operatorSqrt();
    const Eigen::MatrixXd inner = sa * cb * sa;
    const Eigen::VectorXd lam =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (inner + inner.transpose())).eigenvalues();
    double tr = 0;
    for (int i = 0; i < lam.size(); ++i) {
        tr += std::sqrt(std::max(lam(i), 0.0));
    }
    return (ma - mb).squaredNorm() + ca.trace() + cb.trace() - 2 * tr;
}

GaussianStats one_d(double mu, double var) {
    GaussianStats s{{mu}, SquareMatrix(1, var)};
    return s;
}

ProbabilitySet one_hot(std::size_t n, std::size_t k) {
    std::vector<double> rows(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i * k + i % k] = 1.0;
    }
    return ProbabilitySet(n, k, std::move(rows));
}

} // namespace

TEST(GaussianStats, HandExample) {
    const auto s = gaussian_stats(FeatureSet(2, 2, {0, 0, 2, 2}));
    EXPECT_EQ(s.mean, (std::vector<double>{1, 1}));
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            EXPECT_EQ(s.cov(r, c), 2.0);
        }
    }
}

TEST(GaussianStats, IdenticalRowsHaveZeroCovariance) {
    const auto s = gaussian_stats(FeatureSet(3, 2, {1, 5, 1, 5, 1, 5}));
    EXPECT_EQ(max_abs(s.cov), 0.0);
}

TEST(GaussianStats, Errors) {
    EXPECT_TRUE(throws_code([] { gaussian_stats(FeatureSet(1, 3, {1, 2, 3})); },
                            ErrorCode::TooFewSamples));
    EXPECT_TRUE(throws_code([] { FeatureSet(2, 2, {1, 2, 3}); }, ErrorCode::DimensionMismatch));
    EXPECT_TRUE(throws_code([] { FeatureSet(1, 1, {NAN}); }, ErrorCode::InvalidArgument));
}

TEST(FrechetDistance, IdenticalStatsAreZero) {
    Rng rng(1);
    const auto s = gaussian_stats(random_features(rng, 50, 6));
    EXPECT_LT(frechet_distance(s, s), 1e-8);
}

TEST(FrechetDistance, OneDimensionalClosedForm) {
    EXPECT_NEAR(frechet_distance(one_d(0, 1), one_d(1, 4)), 2.0, 1e-12);
}

TEST(FrechetDistance, DiagonalCaseDecomposesPerAxis) {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + rng.below(8);
        GaussianStats a{std::vector<double>(d), SquareMatrix(d)};
        GaussianStats b{std::vector<double>(d), SquareMatrix(d)};
        double expected = 0;
        for (std::size_t j = 0; j < d; ++j) {
            a.mean[j] = rng.normal();
            b.mean[j] = rng.normal();
            a.cov(j, j) = rng.uniform(0.1, 4);
            b.cov(j, j) = rng.uniform(0.1, 4);
            const double ds = std::sqrt(a.cov(j, j)) - std::sqrt(b.cov(j, j));
            expected += (a.mean[j] - b.mean[j]) * (a.mean[j] - b.mean[j]) + ds * ds;
        }
        EXPECT_NEAR(frechet_distance(a, b), expected, 1e-10);
    }
}

TEST(FrechetDistance, MatchesEigenOracle) {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 1 + rng.below(8);
        const auto fa = random_features(rng, 20 + rng.below(40), d);
        const auto fb = random_features(rng, 20 + rng.below(40), d, 0.5);
        EXPECT_NEAR(frechet_distance(gaussian_stats(fa), gaussian_stats(fb)), eigen_fid(fa, fb),
                    1e-8);
    }
}

TEST(FrechetDistance, SymmetricAndRotationInvariant) {
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 1 + rng.below(8);
        const auto fa = random_features(rng, 30, d);
        const auto fb = random_features(rng, 25, d, 1.0);
        const double ab = frechet_distance(gaussian_stats(fa), gaussian_stats(fb));
        EXPECT_NEAR(ab, frechet_distance(gaussian_stats(fb), gaussian_stats(fa)), 1e-6);

        Eigen::MatrixXd g(d, d);
        for (std::size_t i = 0; i < d * d; ++i) {
            g.data()[i] = rng.normal();
        }
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
        auto rotate = [&](const FeatureSet &f) {
            const Eigen::MatrixXd r = as_matrix(f) * q.transpose();
            std::vector<double> rows(f.n() * d);
            for (std::size_t i = 0; i < f.n(); ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    rows[i * d + j] = r(i, j);
                }
            }
            return FeatureSet(f.n(), d, std::move(rows));
        };
        EXPECT_NEAR(frechet_distance(gaussian_stats(rotate(fa)), gaussian_stats(rotate(fb))), ab,
                    1e-6);
    }
}

TEST(FrechetDistance, NeverNegative) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_features(rng, 3, 6);
        EXPECT_GE(frechet_distance(gaussian_stats(f), gaussian_stats(f)), 0.0);
    }
}

TEST(FrechetDistance, DimensionMismatch) {
    EXPECT_TRUE(throws_code(
        [] {
            frechet_distance(one_d(0, 1), GaussianStats{{0, 0}, SquareMatrix::identity(2)});
        },
        ErrorCode::DimensionMismatch));
}

TEST(InceptionScore, UniformRowsScoreExactlyOne) {
    for (std::size_t k : {2u, 3u, 7u, 1000u}) {
        const ProbabilitySet p(40, k, std::vector<double>(40 * k, 1.0 / static_cast<double>(k)));
        const auto s = inception_score(p, 4);
        EXPECT_EQ(s.mean, 1.0) << k;
        EXPECT_EQ(s.std, 0.0);
    }
}

TEST(InceptionScore, BalancedOneHotScoresK) {
    for (std::size_t k : {2u, 5u, 10u, 1000u}) {
        const auto s = inception_score(one_hot(3 * k, k), 1);
        EXPECT_NEAR(s.mean, static_cast<double>(k), 1e-9 * static_cast<double>(k));
    }
}

TEST(InceptionScore, HandTwoClassMixture) {
    // rows (1,0) and (0.5,0.5): marginal (0.75,0.25)
    // KL1 = ln(4/3); KL2 = 0.5 ln(2/3) + 0.5 ln 2
    const auto s = inception_score(ProbabilitySet(2, 2, {1, 0, 0.5, 0.5}), 1);
    const double expected =
        std::exp(0.5 * (std::log(4.0 / 3.0) + 0.5 * std::log(2.0 / 3.0) + 0.5 * std::log(2.0)));
    EXPECT_NEAR(s.mean, expected, 1e-14);
}

TEST(InceptionScore, LastSplitAbsorbsRemainder) {
    // 7 rows, 2 splits: rows 0..2 and 3..6. Split 0 one-hot over 3 classes (IS 3),
    // split 1 all class 0 (IS 1).
    std::vector<double> rows(7 * 3, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        rows[i * 3 + i] = 1;
    }
    for (std::size_t i = 3; i < 7; ++i) {
        rows[i * 3] = 1;
    }
    const auto s = inception_score(ProbabilitySet(7, 3, rows), 2);
    EXPECT_NEAR(s.mean, 2.0, 1e-12);
    EXPECT_NEAR(s.std, 1.0, 1e-12);
}

TEST(InceptionScore, RowOrderInvariantWithOneSplit) {
    Rng rng(6);
    std::vector<double> rows;
    for (int i = 0; i < 30; ++i) {
        double sum = 0;
        std::vector<double> r(5);
        for (auto &v : r) {
            sum += v = rng.uniform();
        }
        for (auto &v : r) {
            rows.push_back(v / sum);
        }
    }
    std::vector<double> reversed;
    for (int i = 29; i >= 0; --i) {
        reversed.insert(reversed.end(), rows.begin() + i * 5, rows.begin() + i * 5 + 5);
    }
    EXPECT_NEAR(inception_score(ProbabilitySet(30, 5, rows), 1).mean,
                inception_score(ProbabilitySet(30, 5, reversed), 1).mean, 1e-12);
}

TEST(InceptionScore, LogitsShiftInvariant) {
    const auto a = ProbabilitySet::from_logits(FeatureSet(2, 3, {1, 2, 3, 0, 0, 5}));
    const auto b = ProbabilitySet::from_logits(FeatureSet(2, 3, {101, 102, 103, -7, -7, -2}));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_NEAR(a.row(i)[j], b.row(i)[j], 1e-15);
        }
    }
}

TEST(InceptionScore, Errors) {
    EXPECT_TRUE(throws_code([] { inception_score(ProbabilitySet(0, 3, {}), 1); },
                            ErrorCode::EmptySet));
    EXPECT_TRUE(throws_code([] { inception_score(one_hot(4, 2), 5); }, ErrorCode::InvalidArgument));
    EXPECT_TRUE(throws_code([] { inception_score(one_hot(4, 2), 0); }, ErrorCode::InvalidArgument));
    EXPECT_TRUE(throws_code([] { ProbabilitySet(1, 2, {0.5, 0.6}); }, ErrorCode::InvalidArgument));
    EXPECT_TRUE(throws_code([] { ProbabilitySet(1, 2, {1.5, -0.5}); }, ErrorCode::InvalidArgument));
}

TEST(ClipSimilarity, AnchorCases) {
    const FeatureSet unit(1, 2, {1, 0});
    EXPECT_EQ(clip_similarity(unit, unit).mean, 100.0);
    EXPECT_EQ(clip_similarity(unit, FeatureSet(1, 2, {0, 3})).mean, 0.0);
    EXPECT_EQ(clip_similarity(unit, FeatureSet(1, 2, {-2, 0})).mean, -100.0);
}

TEST(ClipSimilarity, MeanAndPopulationStd) {
    // scores 100 and 0
    const auto s = clip_similarity(FeatureSet(2, 2, {1, 0, 1, 0}), FeatureSet(2, 2, {1, 0, 0, 1}));
    EXPECT_EQ(s.mean, 50.0);
    EXPECT_EQ(s.std, 50.0);
}

TEST(ClipSimilarity, PositiveRescalingInvariant) {
    Rng rng(7);
    const auto a = random_features(rng, 10, 16);
    const auto b = random_features(rng, 10, 16);
    std::vector<double> scaled(a.values().begin(), a.values().end());
    for (std::size_t i = 0; i < 10; ++i) {
        const double k = rng.uniform(0.01, 100);
        for (std::size_t j = 0; j < 16; ++j) {
            scaled[i * 16 + j] *= k;
        }
    }
    EXPECT_NEAR(clip_similarity(a, b).mean, clip_similarity(FeatureSet(10, 16, scaled), b).mean,
                1e-10);
}

TEST(ClipSimilarity, Errors) {
    EXPECT_TRUE(throws_code(
        [] { clip_similarity(FeatureSet(1, 2, {0, 0}), FeatureSet(1, 2, {1, 0})); },
        ErrorCode::ZeroVector));
    EXPECT_TRUE(throws_code(
        [] { clip_similarity(FeatureSet(1, 2, {1, 0}), FeatureSet(1, 3, {1, 0, 0})); },
        ErrorCode::DimensionMismatch));
}

class FeatureFiles : public ldm3d::testing::TempDirTest {};

TEST_F(FeatureFiles, TextRoundTripIsExact) {
    Rng rng(8);
    const auto f = random_features(rng, 5, 3);
    write_features(path("f.txt"), f);
    const auto g = read_features(path("f.txt"));
    EXPECT_TRUE(std::equal(f.values().begin(), f.values().end(), g.values().begin()));
}

TEST_F(FeatureFiles, TextFormatParsesHandFile) {
    spit(path("h.txt"), "2 3\n1 2 3\n4.5 -6 7e-1\n");
    const auto f = read_features(path("h.txt"));
    ASSERT_EQ(f.n(), 2u);
    ASSERT_EQ(f.d(), 3u);
    EXPECT_EQ(f.row(1)[2], 0.7);
}

TEST_F(FeatureFiles, BinaryLayout) {
    write_features(path("f.feat"), FeatureSet(1, 2, {0.25, -1.0}));
    const std::string bytes = slurp(path("f.feat"));
    EXPECT_EQ(bytes, std::string("\x01\0\0\0\x02\0\0\0\0\0\x80\x3E\0\0\x80\xBF", 16));
    const auto f = read_features(path("f.feat"));
    EXPECT_EQ(f.row(0)[0], 0.25);
}

TEST_F(FeatureFiles, MalformedFilesAreRejected) {
    spit(path("short.txt"), "2 2\n1 2 3\n");
    spit(path("extra.txt"), "1 1\n1 2\n");
    spit(path("noheader.txt"), "abc");
    spit(path("short.feat"), std::string("\x02\0\0\0\x01\0\0\0\0\0\x80\x3E", 12));
    spit(path("long.feat"), std::string("\x01\0\0\0\x01\0\0\0\0\0\x80\x3Ez", 13));
    for (const char *name : {"short.txt", "extra.txt", "noheader.txt", "short.feat", "long.feat"}) {
        EXPECT_TRUE(throws_code([&] { read_features(path(name)); }, ErrorCode::FormatError)) << name;
    }
    EXPECT_TRUE(throws_code([&] { read_features(path("missing.txt")); }, ErrorCode::IoError));
}
