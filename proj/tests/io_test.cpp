// SPDX-License-Identifier: MIT
#include "fanova/io.hpp"
#include "fanova/synth.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace fanova {
namespace {

TEST(FormatNumber, RoundTripsAndSignedZero) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "-0.0");
    EXPECT_EQ(format_number(0.25), "0.25");
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_THROW(format_number(NAN), DomainError);
}

TEST(ModelJson, RoundTripIsByteIdentical) {
    testing::Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto model = testing::random_model(rng);
        const std::string text = model_to_json(model);
        const auto back = model_from_string(text);
        EXPECT_EQ(model_to_json(back), text);
        EXPECT_EQ(testing::max_model_diff(model, back), 0.0);
        EXPECT_EQ(model.bins(), back.bins());
    }
}

TEST(ModelJson, Fig1Layout) {
    const std::string text = model_to_json(gen_boolean_fig1(Fig1Row::d));
    EXPECT_NE(text.find("{\"vars\": [\"X1\", \"X2\"], \"values\": [[-0.25, 0.25], [0.25, -0.25]]}"),
              std::string::npos)
        << text;
}

TEST(ModelJson, Errors) {
    EXPECT_THROW(model_from_string("{"), DomainError);
    EXPECT_THROW(model_from_string("{\"features\": []}"), DomainError);
    EXPECT_THROW(model_from_string(R"({"features": [], "effects": [{"vars": ["x"], "values": [1]}]})"), DomainError);
    EXPECT_THROW(model_from_string(R"({"features": [{"name": "x", "kind": "continuous", "edges": [0.5]}],
        "effects": [{"vars": ["x"], "values": [1, 2, 3]}]})"),
                 DomainError);
    EXPECT_THROW(model_from_string(R"({"features": [{"name": "x", "kind": "ordinal"}], "effects": []})"),
                 DomainError);
    EXPECT_THROW(model_from_string(R"({"features": [{"name": "x", "kind": "continuous", "edges": [0.5]}],
        "effects": [{"vars": ["x"], "values": [1, 2]}, {"vars": ["x"], "values": [1, 2]}]})"),
                 DomainError);
}

TEST(DensityJson, RoundTrip) {
    const auto model = gen_boolean_fig1(Fig1Row::a);
    const auto w = estimate_density(model, DensitySpec{});
    std::stringstream buf;
    write_density_json(buf, w, "uniform");
    const auto back = read_density_json(buf);
    EXPECT_EQ(back.tensors(), w.tensors());
}

TEST(EnsembleJson, ParseAndRoundTrip) {
    std::istringstream in(R"({"base_score": 0.5, "trees": [
        {"split": "x", "threshold": 1.5, "left": {"leaf": -1}, "right": {"leaf": 2}},
        {"split": "c", "threshold": {"labels": ["a", "b"]}, "left": {"leaf": 1}, "right": {"leaf": 0}}]})");
    const auto e = read_ensemble_json(in);
    EXPECT_EQ(e.base_score, 0.5);
    ASSERT_EQ(e.trees.size(), 2u);
    EXPECT_EQ(e.trees[0].root().feature, "x");
    std::stringstream out;
    write_ensemble_json(out, e);
    const auto back = read_ensemble_json(out);
    EXPECT_EQ(back.trees, e.trees);
}

TEST(EnsembleJson, Errors) {
    std::istringstream missing(R"({"base_score": 0})");
    EXPECT_THROW(read_ensemble_json(missing), DomainError);
    std::istringstream bad(R"({"trees": [{"split": "x", "threshold": "high", "left": {"leaf": 0}, "right": {"leaf": 1}}]})");
    EXPECT_THROW(read_ensemble_json(bad), DomainError);
}

TEST(DataCsv, ParsesNumbersAndLabels) {
    BinRegistry bins;
    bins.emplace("x", FeatureBins::continuous("x", {0.5}));
    bins.emplace("c", FeatureBins::categorical("c", {"a", "b c"}));
    std::istringstream in("x,c\n0.25,a\r\n1e1,\"b c\"\n\n");
    const auto data = read_data_csv(in, bins);
    ASSERT_EQ(data.size(), 2u);
    EXPECT_EQ(std::get<double>(data.rows()[1][0]), 10.0);
    EXPECT_EQ(std::get<std::string>(data.rows()[1][1]), "b c");
}

TEST(DataCsv, Errors) {
    BinRegistry bins;
    bins.emplace("x", FeatureBins::continuous("x", {0.5}));
    auto parse = [&](const std::string& text) {
        std::istringstream in(text);
        return read_data_csv(in, bins);
    };
    EXPECT_THROW(parse(""), DomainError);
    EXPECT_THROW(parse("x\nabc\n"), DomainError);
    EXPECT_THROW(parse("x\n1.5x\n"), DomainError);
    EXPECT_THROW(parse("x\ninf\n"), DomainError);
    EXPECT_THROW(parse("x,y\n1\n"), DomainError);
    EXPECT_THROW(parse("x,y\n,2\n"), DomainError);
    EXPECT_THROW(parse("x,y\n\"1,2\n"), DomainError);
}

TEST(Reports, ConvergenceCsv) {
    ConvergenceReport r;
    r.vars = {"X1", "X2"};
    r.trace = {{0, 0.5}, {1, 0.25}, {2, 0.0}};
    std::ostringstream out;
    write_convergence_csv(out, {r});
    EXPECT_EQ(out.str(), "tensor_vars,iteration,mass\nX1*X2,0,0.5\nX1*X2,1,0.25\nX1*X2,2,0\n");
}

TEST(Reports, PredictionsCsv) {
    std::ostringstream out;
    write_predictions_csv(out, {1.5, -0.0});
    EXPECT_EQ(out.str(), "prediction\n1.5\n-0.0\n");
}

}  // namespace
}  // namespace fanova
