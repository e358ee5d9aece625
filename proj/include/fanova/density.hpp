// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/error.hpp"
#include "fanova/model.hpp"
#include "fanova/purify.hpp"
#include "fanova/weights.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fanova {

enum class DensityMode { uniform, empirical, laplace };

inline const char* to_string(DensityMode mode) {
    switch (mode) {
        case DensityMode::uniform: return "uniform";
        case DensityMode::empirical: return "empirical";
        case DensityMode::laplace: return "laplace";
    }
    return "unknown";
}

inline DensityMode parse_density_mode(std::string_view name) {
    if (name == "uniform") return DensityMode::uniform;
    if (name == "empirical") return DensityMode::empirical;
    if (name == "laplace") return DensityMode::laplace;
    throw DomainError("unknown weight mode '" + std::string(name) + "'");
}

struct DensitySpec {
    DensityMode mode = DensityMode::uniform;
    std::optional<GridDataset> data;
    /// Laplace only: use 0.5 * uniform + 0.5 * empirical instead of add-one counts.
    bool laplace_mixture = false;
};

namespace detail {

inline Tensor cell_counts(const AdditiveModel& model, const Vars& vars,
                          const std::vector<std::vector<std::size_t>>& binned,
                          const std::vector<std::size_t>& column_of) {
    Tensor counts(model.grid_shape(vars));
    const auto& shape = counts.shape_vector();
    for (const auto& row : binned) {
        std::size_t flat = 0;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            flat = flat * shape[k] + row[column_of[k]];
        }
        counts[flat] += 1.0;
    }
    return counts;
}

}  // namespace detail

/// Cell weights on the grid of each subset in `subsets`.
///
/// uniform: every cell 1. empirical: number of data rows in the cell.
/// laplace: count + 1 (or the equal mixture of the normalized uniform and
/// empirical weights when `laplace_mixture` is set). Each subset is
/// normalized to sum to one independently.
inline WeightDensity estimate_density(const AdditiveModel& model, const std::set<Vars>& subsets,
                                      const DensitySpec& spec) {
    WeightDensity density;
    if (spec.mode == DensityMode::uniform) {
        for (const auto& vars : subsets) {
            density.insert(vars, normalized(Tensor(model.grid_shape(vars), 1.0), "uniform density"));
        }
        return density;
    }

    if (!spec.data || spec.data->size() == 0) {
        throw DomainError(std::string(to_string(spec.mode)) + " density needs a nonempty dataset");
    }
    const GridDataset& data = *spec.data;

    // Bin every referenced feature of every row once.
    std::vector<std::string> features;
    for (const auto& vars : subsets) {
        for (const auto& name : vars) {
            if (std::find(features.begin(), features.end(), name) == features.end()) features.push_back(name);
        }
    }
    std::vector<std::size_t> source(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
        auto col = data.column(features[f]);
        if (!col) throw DomainError("dataset has no column for feature '" + features[f] + "'");
        source[f] = *col;
    }
    std::vector<std::vector<std::size_t>> binned(data.size(), std::vector<std::size_t>(features.size()));
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t f = 0; f < features.size(); ++f) {
            try {
                binned[r][f] = bin_index(model.feature(features[f]), data.rows()[r][source[f]]);
            } catch (const DomainError& e) {
                throw DomainError("data row " + std::to_string(r) + ": " + e.what());
            }
        }
    }

    for (const auto& vars : subsets) {
        std::vector<std::size_t> column_of;
        for (const auto& name : vars) {
            column_of.push_back(static_cast<std::size_t>(
                std::find(features.begin(), features.end(), name) - features.begin()));
        }
        Tensor counts = detail::cell_counts(model, vars, binned, column_of);
        const std::string what = std::string(to_string(spec.mode)) + " density for (" + join_vars(vars, ", ") + ")";
        if (spec.mode == DensityMode::empirical) {
            density.insert(vars, normalized(std::move(counts), what));
        } else if (spec.laplace_mixture) {
            Tensor emp = normalized(std::move(counts), what);
            const double uniform = 1.0 / static_cast<double>(emp.size());
            for (double& v : emp.values()) v = 0.5 * uniform + 0.5 * v;
            density.insert(vars, normalized(std::move(emp), what));
        } else {
            for (double& v : counts.values()) v += 1.0;
            density.insert(vars, normalized(std::move(counts), what));
        }
    }
    return density;
}

/// Weights for every subset purification of `model` will touch.
inline WeightDensity estimate_density(const AdditiveModel& model, const DensitySpec& spec) {
    return estimate_density(model, required_subsets(model), spec);
}

}  // namespace fanova
