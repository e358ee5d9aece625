// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/bins.hpp"
#include "fanova/error.hpp"
#include "fanova/model.hpp"
#include "fanova/tensor.hpp"
#include "fanova/weights.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fanova {

// Boolean features use one edge at 0.5, so the values 0 and 1 land in cells 0 and 1.
inline FeatureBins boolean_feature(std::string name) { return FeatureBins::continuous(std::move(name), {0.5}); }

enum class Fig1Row { a, b, c, d };

inline Fig1Row parse_fig1_row(std::string_view row) {
    if (row == "a") return Fig1Row::a;
    if (row == "b") return Fig1Row::b;
    if (row == "c") return Fig1Row::c;
    if (row == "d") return Fig1Row::d;
    throw DomainError("unknown Boolean example row '" + std::string(row) + "' (expected a, b, c or d)");
}

/// Four additive representations of the same function of two Booleans
/// (AND-, OR- and two XOR-flavoured), all equal to -0.25 + 0.5 * XOR.
/// Interaction tensors are indexed [X1][X2].
inline AdditiveModel gen_boolean_fig1(Fig1Row row) {
    struct Parts {
        double f0;
        std::array<double, 2> f1, f2;
        std::array<double, 4> f3;
    };
    Parts p{};
    switch (row) {
        case Fig1Row::a: p = {0.25, {-0.25, 0.25}, {-0.25, 0.25}, {0.0, 0.0, 0.0, -1.0}}; break;
        case Fig1Row::b: p = {-0.75, {0.25, -0.25}, {0.25, -0.25}, {0.0, 1.0, 1.0, 1.0}}; break;
        case Fig1Row::c: p = {-0.25, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.5, 0.5, 0.0}}; break;
        case Fig1Row::d: p = {0.0, {0.0, 0.0}, {0.0, 0.0}, {-0.25, 0.25, 0.25, -0.25}}; break;
    }
    AdditiveModel model;
    model.add_feature(boolean_feature("X1"));
    model.add_feature(boolean_feature("X2"));
    model.set_effect({{}, Tensor::scalar(p.f0)});
    model.set_effect({{"X1"}, Tensor({2}, {p.f1[0], p.f1[1]})});
    model.set_effect({{"X2"}, Tensor({2}, {p.f2[0], p.f2[1]})});
    model.set_effect({{"X1", "X2"}, Tensor({2, 2}, std::vector<double>(p.f3.begin(), p.f3.end()))});
    return model;
}

struct WrightCoefficients {
    std::string_view name;
    double snp1;
    double snp2;
    double product;
};

/// SNP interaction generators: y = snp1 * SNP1 + snp2 * SNP2 + product * SNP1 * SNP2.
inline constexpr std::array<WrightCoefficients, 5> kWrightModels{{
    {"Interaction Only", 0.0, 0.0, 1.0},
    {"Modifier SNP", 0.0, 1.0, 1.0},
    {"No Interaction", 1.0, 1.0, 0.0},
    {"Redundant", 1.0, 1.0, -1.0},
    {"Synergistic", 1.0, 1.0, 1.0},
}};

inline const WrightCoefficients& wright_coefficients(std::string_view name) {
    for (const auto& m : kWrightModels) {
        if (m.name == name) return m;
    }
    throw DomainError("unknown SNP generator '" + std::string(name) + "'");
}

inline AdditiveModel gen_wright(std::string_view name) {
    const auto& c = wright_coefficients(name);
    AdditiveModel model;
    model.add_feature(boolean_feature("SNP1"));
    model.add_feature(boolean_feature("SNP2"));
    model.set_effect({{"SNP1"}, Tensor({2}, {0.0, c.snp1})});
    model.set_effect({{"SNP2"}, Tensor({2}, {0.0, c.snp2})});
    model.set_effect({{"SNP1", "SNP2"}, Tensor({2, 2}, {0.0, 0.0, 0.0, c.product})});
    return model;
}

/// Midpoints (k + 0.5) / n of the n uniform cells of (0, 1].
inline std::vector<double> unit_midpoints(std::size_t n) {
    std::vector<double> mid(n);
    for (std::size_t k = 0; k < n; ++k) mid[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    return mid;
}

/// Edges k / n, k = 1..n-1: n cells over the line, the interior ones covering (0, 1].
inline FeatureBins unit_grid_feature(std::string name, std::size_t n) {
    std::vector<double> edges;
    for (std::size_t k = 1; k < n; ++k) edges.push_back(static_cast<double>(k) / static_cast<double>(n));
    return FeatureBins::continuous(std::move(name), std::move(edges));
}

struct MultiplicativeParams {
    double a = 0.0, b = 1.0, c = 1.0, d = 1.0;
    double alpha = 0.0, beta = 0.0;
};

/// a + b x1 + c x2 + d x1 x2 written as
/// (a - d alpha beta) + (b + d beta) x1 + (c + d alpha) x2 + d (x1 - alpha)(x2 - beta),
/// tabulated at cell midpoints of an n x n grid on (0, 1]^2.
inline AdditiveModel gen_multiplicative(const MultiplicativeParams& p, std::size_t n) {
    if (n < 2) throw DomainError("grid size must be at least 2");
    for (double v : {p.a, p.b, p.c, p.d, p.alpha, p.beta}) {
        if (!std::isfinite(v)) throw DomainError("multiplicative coefficients must be finite");
    }
    const auto mid = unit_midpoints(n);
    AdditiveModel model;
    model.add_feature(unit_grid_feature("x1", n));
    model.add_feature(unit_grid_feature("x2", n));
    model.set_effect({{}, Tensor::scalar(p.a - p.d * p.alpha * p.beta)});
    Tensor f1({n}), f2({n}), f12({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        f1[i] = (p.b + p.d * p.beta) * mid[i];
        f2[i] = (p.c + p.d * p.alpha) * mid[i];
        for (std::size_t j = 0; j < n; ++j) f12[i * n + j] = p.d * (mid[i] - p.alpha) * (mid[j] - p.beta);
    }
    model.set_effect({{"x1"}, std::move(f1)});
    model.set_effect({{"x2"}, std::move(f2)});
    model.set_effect({{"x1", "x2"}, std::move(f12)});
    return model;
}

/// Y = (1 - lambda) log(x1 x2) + lambda x1 x2 as a single interaction tensor
/// on the n x n midpoint grid; mains and intercept are left for purification.
inline AdditiveModel gen_log_lambda(double lambda, std::size_t n) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
    if (n < 2) throw DomainError("grid size must be at least 2");
    const auto mid = unit_midpoints(n);
    AdditiveModel model;
    model.add_feature(unit_grid_feature("x1", n));
    model.add_feature(unit_grid_feature("x2", n));
    Tensor y({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double prod = mid[i] * mid[j];
            y[i * n + j] = (1.0 - lambda) * std::log(prod) + lambda * prod;
        }
    }
    model.set_effect({{"x1", "x2"}, std::move(y)});
    return model;
}

enum class BenchWeights { uniform, random };

inline BenchWeights parse_bench_weights(std::string_view name) {
    if (name == "uniform") return BenchWeights::uniform;
    if (name == "random") return BenchWeights::random;
    throw DomainError("bench weights must be 'uniform' or 'random', got '" + std::string(name) + "'");
}

/// A P x P interaction with i.i.d. normal(0, sigma) entries over features
/// "a" and "b", plus weights: all ones, or absolute normal(0, sigma) draws,
/// normalized. The density also carries the row, column and total marginals.
struct RandomBench {
    double sigma = 1.0;
    std::size_t dims = 2;
    std::uint64_t seed = 0;
    AdditiveModel model;
    WeightDensity weights;

    static const Vars& vars() {
        static const Vars v{"a", "b"};
        return v;
    }
    const EffectTensor& tensor() const { return *model.find(vars()); }
};

inline RandomBench gen_random_bench(double sigma, std::size_t dims, BenchWeights mode, std::uint64_t seed) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
    if (dims < 2) throw DomainError("dims must be at least 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);

    RandomBench bench;
    bench.sigma = sigma;
    bench.dims = dims;
    bench.seed = seed;
    std::vector<double> edges;
    for (std::size_t k = 1; k < dims; ++k) edges.push_back(static_cast<double>(k));
    bench.model.add_feature(FeatureBins::continuous("a", edges));
    bench.model.add_feature(FeatureBins::continuous("b", edges));

    Tensor t({dims, dims});
    for (double& v : t.values()) v = normal(rng);
    Tensor w({dims, dims}, 1.0);
    if (mode == BenchWeights::random) {
        for (double& v : w.values()) v = std::abs(normal(rng));
    }
    w = normalized(std::move(w), "bench weights");

    Tensor rows({dims}), cols({dims});
    for (std::size_t i = 0; i < dims; ++i) {
        for (std::size_t j = 0; j < dims; ++j) {
            rows[i] += w[i * dims + j];
            cols[j] += w[i * dims + j];
        }
    }
    bench.weights.insert({"a", "b"}, w);
    bench.weights.insert({"a"}, normalized(std::move(rows), "bench row weights"));
    bench.weights.insert({"b"}, normalized(std::move(cols), "bench column weights"));
    bench.weights.insert({}, Tensor::scalar(1.0));
    bench.model.set_effect({RandomBench::vars(), std::move(t)});
    return bench;
}

}  // namespace fanova
