// SPDX-License-Identifier: MIT
#include "fanova/synth.hpp"
#include "fanova/density.hpp"
#include "fanova/purify.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace fanova {
namespace {

AdditiveModel purify_uniform(const AdditiveModel& model) {
    return purify_model(model, estimate_density(model, DensitySpec{})).model;
}

TEST(Fig1, EveryRowPredictsPlusQuarterAtZeroOne) {
    for (Fig1Row row : {Fig1Row::a, Fig1Row::b, Fig1Row::c, Fig1Row::d}) {
        EXPECT_DOUBLE_EQ(predict(gen_boolean_fig1(row), {{"X1", 0.0}, {"X2", 1.0}}), 0.25);
    }
}

TEST(Fig1, ParseRow) {
    EXPECT_EQ(parse_fig1_row("c"), Fig1Row::c);
    EXPECT_THROW(parse_fig1_row("e"), DomainError);
}

TEST(Wright, InteractionOnlyTensor) {
    const auto model = gen_wright("Interaction Only");
    EXPECT_EQ(model.find({"SNP1", "SNP2"})->values.at({1, 1}), 1.0);
    EXPECT_EQ(model.find({"SNP1"})->values.max_abs(), 0.0);
}

TEST(Wright, Redundant) {
    const auto model = gen_wright("Redundant");
    EXPECT_EQ(model.find({"SNP1"})->values.at({1}), 1.0);
    EXPECT_EQ(model.find({"SNP2"})->values.at({1}), 1.0);
    EXPECT_EQ(model.find({"SNP1", "SNP2"})->values.at({1, 1}), -1.0);
}

TEST(Wright, UnknownName) { EXPECT_THROW(gen_wright("Epistatic"), DomainError); }

TEST(Wright, NoInteractionPurifiesToZeroInteraction) {
    const auto pure = purify_uniform(gen_wright("No Interaction"));
    EXPECT_EQ(pure.find({"SNP1", "SNP2"})->values.max_abs(), 0.0);
}

TEST(Wright, InteractionOnlyPurified) {
    const auto pure = purify_uniform(gen_wright("Interaction Only"));
    const auto& f1 = pure.find({"SNP1"})->values;
    const auto& f2 = pure.find({"SNP2"})->values;
    EXPECT_NEAR(f1.at({1}) - f1.at({0}), 0.5, 1e-12);
    EXPECT_NEAR(f2.at({1}) - f2.at({0}), 0.5, 1e-12);
    EXPECT_NEAR(pure.find({"SNP1", "SNP2"})->values.at({1, 1}), 0.25, 1e-12);
}

TEST(Multiplicative, PredictsTheProductForm) {
    const std::size_t n = 7;
    const auto model = gen_multiplicative({0.0, 1.0, 1.0, 1.0, 0.0, 0.0}, n);
    const auto mid = unit_midpoints(n);
    for (double x1 : mid) {
        for (double x2 : mid) {
            EXPECT_NEAR(predict(model, {{"x1", x1}, {"x2", x2}}), x1 + x2 + x1 * x2, 1e-12);
        }
    }
}

TEST(Multiplicative, ReparametrizationKeepsPredictions) {
    const std::size_t n = 9;
    const auto base = gen_multiplicative({0.3, -1.0, 2.0, 1.5, 0.0, 0.0}, n);
    const auto shifted = gen_multiplicative({0.3, -1.0, 2.0, 1.5, -1.0, -1.0}, n);
    EXPECT_GT(testing::max_model_diff(base, shifted), 0.1);
    for (double x1 : unit_midpoints(n)) {
        for (double x2 : unit_midpoints(n)) {
            const Point p{{"x1", x1}, {"x2", x2}};
            EXPECT_NEAR(predict(base, p), predict(shifted, p), 1e-12);
        }
    }
}

// Oracle: for Y = x1 x2 on the midpoint grid under uniform weights the grid
// means are exactly 1/2, so the decomposition is 1/4 + (x1 - 1/2)/2 +
// (x2 - 1/2)/2 + (x1 - 1/2)(x2 - 1/2).
TEST(Multiplicative, PurifiedProduct) {
    const std::size_t n = 64;
    const auto pure = purify_uniform(gen_multiplicative({0.0, 0.0, 0.0, 1.0, 0.0, 0.0}, n));
    const auto mid = unit_midpoints(n);
    EXPECT_NEAR(pure.intercept(), 0.25, 1e-12);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(pure.find({"x1"})->values[i], 0.5 * (mid[i] - 0.5), 1e-12);
        EXPECT_NEAR(pure.find({"x2"})->values[i], 0.5 * (mid[i] - 0.5), 1e-12);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_NEAR(pure.find({"x1", "x2"})->values[i * n + j], (mid[i] - 0.5) * (mid[j] - 0.5), 1e-12);
        }
    }
}

TEST(LogLambda, ZeroIsAdditive) {
    const std::size_t n = 64;
    const auto pure = purify_uniform(gen_log_lambda(0.0, n));
    const auto mid = unit_midpoints(n);
    double mean_log = 0.0;
    for (double m : mid) mean_log += std::log(m);
    mean_log /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(pure.find({"x1"})->values[i], std::log(mid[i]) - mean_log, 1e-6);
        EXPECT_NEAR(pure.find({"x2"})->values[i], std::log(mid[i]) - mean_log, 1e-6);
    }
    EXPECT_LE(pure.find({"x1", "x2"})->values.max_abs(), 1e-10);
}

TEST(LogLambda, OneIsTheProduct) {
    const std::size_t n = 16;
    const auto a = gen_log_lambda(1.0, n);
    const auto b = gen_multiplicative({0.0, 0.0, 0.0, 1.0, 0.0, 0.0}, n);
    EXPECT_LE(testing::max_model_diff(purify_uniform(a), purify_uniform(b)), 1e-12);
}

TEST(LogLambda, RejectsOutOfRange) {
    EXPECT_THROW(gen_log_lambda(1.5, 8), DomainError);
    EXPECT_THROW(gen_log_lambda(0.5, 1), DomainError);
}

TEST(RandomBench, SameSeedSameDraws) {
    const auto a = gen_random_bench(10.0, 25, BenchWeights::random, 42);
    const auto b = gen_random_bench(10.0, 25, BenchWeights::random, 42);
    EXPECT_EQ(a.tensor().values, b.tensor().values);
    EXPECT_EQ(a.weights.at(RandomBench::vars()), b.weights.at(RandomBench::vars()));
    const auto c = gen_random_bench(10.0, 25, BenchWeights::random, 43);
    EXPECT_NE(a.tensor().values, c.tensor().values);
}

TEST(RandomBench, RandomModeMovesMostMassInPassOne) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto bench = gen_random_bench(1.0, 25, BenchWeights::random, seed);
        const auto result = purify_tensor(bench.model, RandomBench::vars(), bench.weights);
        const auto& trace = result.report.trace;
        ASSERT_GE(trace.size(), 3u);
        EXPECT_LT(trace[2].mass, 0.5 * trace[0].mass);
    }
}

TEST(RandomBench, Validation) {
    EXPECT_THROW(gen_random_bench(0.0, 4, BenchWeights::uniform, 1), DomainError);
    EXPECT_THROW(gen_random_bench(1.0, 1, BenchWeights::uniform, 1), DomainError);
    EXPECT_THROW(parse_bench_weights("normal"), DomainError);
}

}  // namespace
}  // namespace fanova
