// SPDX-License-Identifier: MIT
#include "fanova/density.hpp"
#include "fanova/synth.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace fanova {
namespace {

AdditiveModel boolean_pair() {
    AdditiveModel model;
    model.add_feature(boolean_feature("X1"));
    model.add_feature(boolean_feature("X2"));
    model.set_effect({{"X1", "X2"}, Tensor({2, 2})});
    return model;
}

GridDataset four_rows() {
    return GridDataset({"X1", "X2"}, {{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

void expect_values(const Tensor& t, std::vector<double> expected) {
    ASSERT_EQ(t.size(), expected.size());
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(t[k], expected[k], 1e-15) << "cell " << k;
}

TEST(Density, UniformQuarterEach) {
    const auto w = estimate_density(boolean_pair(), DensitySpec{});
    expect_values(w.at({"X1", "X2"}), {0.25, 0.25, 0.25, 0.25});
    expect_values(w.at({"X1"}), {0.5, 0.5});
    expect_values(w.at({}), {1.0});
}

TEST(Density, EmpiricalCounts) {
    const auto w = estimate_density(boolean_pair(), {DensityMode::empirical, four_rows()});
    expect_values(w.at({"X1", "X2"}), {0.5, 0.25, 0.0, 0.25});
    expect_values(w.at({"X1"}), {0.75, 0.25});
    expect_values(w.at({"X2"}), {0.5, 0.5});
}

TEST(Density, LaplaceAddsOne) {
    const auto w = estimate_density(boolean_pair(), {DensityMode::laplace, four_rows()});
    expect_values(w.at({"X1", "X2"}), {3.0 / 8, 2.0 / 8, 1.0 / 8, 2.0 / 8});
}

TEST(Density, LaplaceMixture) {
    DensitySpec spec{DensityMode::laplace, four_rows()};
    spec.laplace_mixture = true;
    const auto w = estimate_density(boolean_pair(), spec);
    expect_values(w.at({"X1", "X2"}), {0.375, 0.25, 0.125, 0.25});
    expect_values(w.at({"X1"}), {0.625, 0.375});
}

TEST(Density, EmptyDataIsAnError) {
    EXPECT_THROW(estimate_density(boolean_pair(), {DensityMode::empirical, GridDataset({"X1", "X2"}, {})}),
                 DomainError);
    EXPECT_THROW(estimate_density(boolean_pair(), {DensityMode::laplace, std::nullopt}), DomainError);
}

TEST(Density, UnknownLabelIsAnError) {
    AdditiveModel model;
    model.add_feature(FeatureBins::categorical("c", {"a", "b"}));
    model.set_effect({{"c"}, Tensor({2})});
    EXPECT_THROW(estimate_density(model, {DensityMode::empirical, GridDataset({"c"}, {{std::string("z")}})}),
                 DomainError);
}

TEST(Density, MissingColumnIsAnError) {
    EXPECT_THROW(estimate_density(boolean_pair(), {DensityMode::empirical, GridDataset({"X1"}, {{0.0}})}),
                 DomainError);
}

TEST(Density, ParseMode) {
    EXPECT_EQ(parse_density_mode("laplace"), DensityMode::laplace);
    EXPECT_THROW(parse_density_mode("kde"), DomainError);
}

TEST(Density, EmpiricalMarginalsAreConsistent) {
    testing::Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto model = testing::random_model(rng);
        const auto data = testing::random_dataset(rng, model.bins(), 50);
        const auto w = estimate_density(model, {DensityMode::empirical, data});
        for (const auto& [vars, joint] : w.tensors()) {
            for (std::size_t axis = 0; axis < vars.size(); ++axis) {
                const Tensor& marginal = w.at(without_axis(vars, axis));
                const SliceLayout layout = slice_layout(joint.shape(), axis);
                for (std::size_t s = 0; s < layout.count; ++s) {
                    double sum = 0.0;
                    for (std::size_t k = 0, pos = layout.base(s); k < layout.length; ++k, pos += layout.stride) {
                        sum += joint[pos];
                    }
                    EXPECT_NEAR(sum, marginal[s], 1e-12);
                }
            }
        }
    }
}

TEST(Density, LaplaceIsStrictlyPositive) {
    testing::Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const auto model = testing::random_model(rng);
        for (bool mixture : {false, true}) {
            DensitySpec spec{DensityMode::laplace, testing::random_dataset(rng, model.bins(), 5)};
            spec.laplace_mixture = mixture;
            const auto w = estimate_density(model, spec);
            for (const auto& [vars, t] : w.tensors()) {
                for (double v : t.values()) EXPECT_GT(v, 0.0);
            }
        }
    }
}

TEST(WeightDensity, RejectsBadTensors) {
    WeightDensity w;
    EXPECT_THROW(w.insert({"a"}, Tensor({2}, {0.5, 0.6})), DomainError);
    EXPECT_THROW(w.insert({"a"}, Tensor({2}, {1.5, -0.5})), DomainError);
    EXPECT_THROW(w.insert({"b", "a"}, Tensor({1, 1}, 1.0)), DomainError);
    EXPECT_THROW(w.at({"a"}), DomainError);
}

}  // namespace
}  // namespace fanova
