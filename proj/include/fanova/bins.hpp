// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace fanova {

/// A raw feature value: real for continuous features, label for categorical.
using FeatureValue = std::variant<double, std::string>;

enum class FeatureKind { continuous, categorical };

inline const char* to_string(FeatureKind kind) {
    return kind == FeatureKind::continuous ? "continuous" : "categorical";
}

/// The finite value domain of one feature.
///
/// Continuous features are cut by strictly increasing edges e_1 < ... < e_k
/// into k + 1 half-open cells (-inf, e_1), [e_1, e_2), ..., [e_k, +inf), so a
/// value equal to an edge falls in the upper cell ("x < t goes left").
/// Categorical features have one cell per distinct label, in label order.
class FeatureBins {
public:
    static FeatureBins continuous(std::string name, std::vector<double> edges) {
        for (std::size_t k = 0; k < edges.size(); ++k) {
            if (!std::isfinite(edges[k])) {
                throw DomainError("feature '" + name + "': bin edges must be finite");
            }
            if (k > 0 && !(edges[k - 1] < edges[k])) {
                throw DomainError("feature '" + name + "': bin edges must be strictly increasing");
            }
        }
        FeatureBins bins;
        bins.name_ = std::move(name);
        bins.kind_ = FeatureKind::continuous;
        bins.edges_ = std::move(edges);
        return bins;
    }

    static FeatureBins categorical(std::string name, std::vector<std::string> labels) {
        if (labels.empty()) {
            throw DomainError("feature '" + name + "': categorical feature needs at least one label");
        }
        std::unordered_set<std::string> seen;
        for (const auto& label : labels) {
            if (!seen.insert(label).second) {
                throw DomainError("feature '" + name + "': duplicate label '" + label + "'");
            }
        }
        FeatureBins bins;
        bins.name_ = std::move(name);
        bins.kind_ = FeatureKind::categorical;
        bins.labels_ = std::move(labels);
        return bins;
    }

    const std::string& name() const noexcept { return name_; }
    FeatureKind kind() const noexcept { return kind_; }
    bool is_continuous() const noexcept { return kind_ == FeatureKind::continuous; }

    std::size_t cell_count() const noexcept {
        return is_continuous() ? edges_.size() + 1 : labels_.size();
    }

    std::span<const double> edges() const noexcept { return edges_; }
    std::span<const std::string> labels() const noexcept { return labels_; }

    /// Cell containing `value`.
    std::size_t index_of(const FeatureValue& value) const {
        if (is_continuous()) {
            const double* x = std::get_if<double>(&value);
            if (x == nullptr) {
                throw DomainError("feature '" + name_ + "' is continuous but got label '" +
                                  std::get<std::string>(value) + "'");
            }
            if (std::isnan(*x)) {
                throw DomainError("feature '" + name_ + "': NaN has no cell");
            }
            return static_cast<std::size_t>(
                std::upper_bound(edges_.begin(), edges_.end(), *x) - edges_.begin());
        }
        const std::string* label = std::get_if<std::string>(&value);
        if (label == nullptr) {
            throw DomainError("feature '" + name_ + "' is categorical but got a number");
        }
        auto it = std::find(labels_.begin(), labels_.end(), *label);
        if (it == labels_.end()) {
            throw DomainError("feature '" + name_ + "': unknown label '" + *label + "'");
        }
        return static_cast<std::size_t>(it - labels_.begin());
    }

    /// A value that lands in `cell`: its lower edge, a point just below the
    /// first edge for cell 0, or the label itself.
    FeatureValue representative(std::size_t cell) const {
        if (!is_continuous()) return labels_.at(cell);
        if (cell > edges_.size()) throw DomainError("feature '" + name_ + "': cell out of range");
        if (edges_.empty()) return 0.0;
        if (cell == 0) return std::nextafter(edges_.front(), -HUGE_VAL);
        return edges_[cell - 1];
    }

    friend bool operator==(const FeatureBins&, const FeatureBins&) = default;

private:
    FeatureBins() = default;

    std::string name_;
    FeatureKind kind_ = FeatureKind::continuous;
    std::vector<double> edges_;
    std::vector<std::string> labels_;
};

/// Feature name -> bins. Ordered so every traversal is deterministic.
using BinRegistry = std::map<std::string, FeatureBins>;

inline std::size_t bin_index(const FeatureBins& bins, const FeatureValue& value) {
    return bins.index_of(value);
}

}  // namespace fanova
