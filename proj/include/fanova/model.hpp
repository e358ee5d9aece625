// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/bins.hpp"
#include "fanova/error.hpp"
#include "fanova/tensor.hpp"
#include "fanova/weights.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fanova {

/// A point to predict at: feature name -> raw value.
using Point = std::map<std::string, FeatureValue>;

/// f_0 + sum_u f_u(x_u) over a shared bin registry.
///
/// The intercept (empty subset) is always present. Subsets without an effect
/// contribute nothing; `effect()` creates a zero tensor on demand.
class AdditiveModel {
public:
    AdditiveModel() { effects_.emplace(Vars{}, EffectTensor{Vars{}, Tensor::scalar(0.0)}); }

    explicit AdditiveModel(BinRegistry bins) : AdditiveModel() { bins_ = std::move(bins); }

    const BinRegistry& bins() const noexcept { return bins_; }

    const FeatureBins& feature(const std::string& name) const {
        auto it = bins_.find(name);
        if (it == bins_.end()) throw DomainError("unknown feature '" + name + "'");
        return it->second;
    }

    void add_feature(FeatureBins bins) {
        std::string name = bins.name();
        auto [it, inserted] = bins_.emplace(name, bins);
        if (!inserted && !(it->second == bins)) {
            throw DomainError("feature '" + name + "' registered twice with different bins");
        }
    }

    std::vector<std::size_t> grid_shape(const Vars& vars) const {
        std::vector<std::size_t> shape;
        shape.reserve(vars.size());
        for (const auto& name : vars) shape.push_back(feature(name).cell_count());
        return shape;
    }

    const std::map<Vars, EffectTensor>& effects() const noexcept { return effects_; }

    const EffectTensor* find(const Vars& vars) const {
        auto it = effects_.find(vars);
        return it == effects_.end() ? nullptr : &it->second;
    }

    bool contains(const Vars& vars) const { return effects_.count(vars) != 0; }

    /// Mutable access; a missing subset is created as zeros over its grid.
    EffectTensor& effect(const Vars& vars) {
        auto it = effects_.find(vars);
        if (it != effects_.end()) return it->second;
        check_vars(vars);
        return effects_.emplace(vars, EffectTensor{vars, Tensor(grid_shape(vars))}).first->second;
    }

    /// Inserts or replaces one effect after validating it against the bins.
    void set_effect(EffectTensor effect) {
        validate(effect);
        Vars key = effect.vars;
        effects_.insert_or_assign(std::move(key), std::move(effect));
    }

    /// Adds `effect` cellwise into the stored tensor for its subset.
    void add_to_effect(const EffectTensor& effect) {
        validate(effect);
        auto values = this->effect(effect.vars).values.values();
        auto src = effect.values.values();
        for (std::size_t k = 0; k < values.size(); ++k) values[k] += src[k];
    }

    void erase_effect(const Vars& vars) {
        if (vars.empty()) {
            effects_.at(vars).values = Tensor::scalar(0.0);
        } else {
            effects_.erase(vars);
        }
    }

    double intercept() const { return effects_.at(Vars{}).values[0]; }

    /// Throws unless `effect` is a well-formed tensor over this model's bins.
    void validate(const EffectTensor& effect) const {
        check_vars(effect.vars);
        const auto shape = grid_shape(effect.vars);
        if (effect.values.shape_vector() != shape) {
            throw DomainError("effect (" + join_vars(effect.vars, ", ") +
                              ") shape does not match the feature bin counts");
        }
        if (!effect.values.all_finite()) {
            throw DomainError("effect (" + join_vars(effect.vars, ", ") + ") has non-finite values");
        }
    }

private:
    void check_vars(const Vars& vars) const {
        if (!is_canonical(vars)) {
            throw DomainError("effect vars (" + join_vars(vars, ", ") + ") must be sorted and distinct");
        }
        for (const auto& name : vars) feature(name);
    }

    BinRegistry bins_;
    std::map<Vars, EffectTensor> effects_;
};

/// Sum of every effect's entry at the given per-feature cell indices.
inline double predict_cells(const AdditiveModel& model, const std::map<std::string, std::size_t>& cells) {
    double total = 0.0;
    std::vector<std::size_t> index;
    for (const auto& [vars, effect] : model.effects()) {
        index.clear();
        for (const auto& name : vars) {
            auto it = cells.find(name);
            if (it == cells.end()) throw DomainError("no cell given for feature '" + name + "'");
            index.push_back(it->second);
        }
        total += effect.values.at(index);
    }
    return total;
}

inline double predict(const AdditiveModel& model, const Point& point) {
    std::map<std::string, std::size_t> cells;
    for (const auto& [vars, effect] : model.effects()) {
        for (const auto& name : vars) {
            if (cells.count(name)) continue;
            auto it = point.find(name);
            if (it == point.end()) throw DomainError("point has no value for feature '" + name + "'");
            cells.emplace(name, bin_index(model.feature(name), it->second));
        }
    }
    return predict_cells(model, cells);
}

/// Weighted variance sum_c w_c (v_c - mu)^2 with mu the w-weighted mean.
inline double effect_variance(const Tensor& values, const Tensor& weights) {
    if (values.shape_vector() != weights.shape_vector()) {
        throw DomainError("effect_variance: weight shape does not match the tensor");
    }
    double total = 0.0;
    double mean = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        total += weights[k];
        mean += weights[k] * values[k];
    }
    if (!(total > 0.0)) throw DomainError("effect_variance: weights sum to zero");
    mean /= total;
    double var = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double d = values[k] - mean;
        var += weights[k] * d * d;
    }
    return var / total;
}

inline double effect_variance(const EffectTensor& effect, const WeightDensity& w) {
    return effect_variance(effect.values, w.at(effect.vars));
}

/// Tabular data keyed by column name; carrier for training rows.
class GridDataset {
public:
    GridDataset(std::vector<std::string> columns, std::vector<std::vector<FeatureValue>> rows)
        : columns_(std::move(columns)), rows_(std::move(rows)) {
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            if (!column_index_.emplace(columns_[c], c).second) {
                throw DomainError("duplicate data column '" + columns_[c] + "'");
            }
        }
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r].size() != columns_.size()) {
                throw DomainError("data row " + std::to_string(r) + " has " +
                                  std::to_string(rows_[r].size()) + " values, expected " +
                                  std::to_string(columns_.size()));
            }
            for (const auto& v : rows_[r]) {
                if (const double* x = std::get_if<double>(&v); x && !std::isfinite(*x)) {
                    throw DomainError("data row " + std::to_string(r) + " has a non-finite value");
                }
            }
        }
    }

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<FeatureValue>>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    std::optional<std::size_t> column(const std::string& name) const {
        auto it = column_index_.find(name);
        if (it == column_index_.end()) return std::nullopt;
        return it->second;
    }

    Point point(std::size_t row) const {
        Point p;
        for (std::size_t c = 0; c < columns_.size(); ++c) p.emplace(columns_[c], rows_[row][c]);
        return p;
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<FeatureValue>> rows_;
    std::map<std::string, std::size_t> column_index_;
};

}  // namespace fanova
