// SPDX-License-Identifier: MIT
#pragma once

// Mass-moving purification of additive models into their functional ANOVA
// form. Every 1-D slice of every effect tensor is made zero-mean under the
// weights of its subset; each subtracted slice mean is added to the matching
// cell of the next-lower-order tensor, so predictions never change.

#include "fanova/error.hpp"
#include "fanova/model.hpp"
#include "fanova/tensor.hpp"
#include "fanova/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace fanova {

enum class DegeneratePolicy {
    skip,    // leave zero-weight slices untouched and count them
    strict,  // throw DegenerateSlice
};

struct PurifyOptions {
    /// Target for every |weighted slice mean|. Tensors too large for rounding
    /// to reach it stop once the means stall below tol * max(1, M^0, max|T|).
    double tol = 1e-12;
    /// Full passes allowed per tensor; defaults to default_pass_cap(tol).
    std::optional<std::size_t> max_passes;
    DegeneratePolicy degenerate = DegeneratePolicy::skip;
};

enum class Termination { mass_below_tol, pure_flag, max_iters };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::mass_below_tol: return "mass_below_tol";
        case Termination::pure_flag: return "pure_flag";
        case Termination::max_iters: return "max_iters";
    }
    return "unknown";
}

/// Unpurified mass after `iteration` single-axis sweeps (0 = before any move).
struct MassSample {
    std::size_t iteration = 0;
    double mass = 0.0;
};

struct ConvergenceReport {
    Vars vars;
    std::vector<MassSample> trace;
    Termination terminated_by = Termination::pure_flag;
    std::size_t passes = 0;             // full sweeps over every axis
    std::size_t pass_cap = 0;
    double tolerance = 0.0;             // stall threshold, tol * max(1, M^0, max|T|)
    double max_slice_mean = 0.0;        // after the last pass
    std::size_t degenerate_slices = 0;  // zero-weight slices skipped
    /// The mass of tensors with more than two axes is a generalization
    /// (sum over every axis), not the two-variable definition.
    bool mass_is_extension = false;

    double initial_mass() const { return trace.empty() ? 0.0 : trace.front().mass; }
    double final_mass() const { return trace.empty() ? 0.0 : trace.back().mass; }
};

/// Raised when a tensor is still impure after the allowed passes.
class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(ConvergenceReport report)
        : std::runtime_error("tensor (" + join_vars(report.vars, ", ") + ") did not converge in " +
                             std::to_string(report.passes) + " passes (mass " +
                             std::to_string(report.final_mass()) + ")"),
          report_(std::move(report)) {}

    const ConvergenceReport& report() const noexcept { return report_; }

private:
    ConvergenceReport report_;
};

/// 100 * ceil(log2(1 / tol)) passes. A halving rate would need about ten per
/// bit, but sparse weights mix far slower (a 2x2 table contracts by the
/// squared correlation of its margins every two sweeps).
inline std::size_t default_pass_cap(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("tolerance must be positive and finite");
    const double bits = std::ceil(std::log2(1.0 / tol));
    return static_cast<std::size_t>(std::max(1.0, 100.0 * bits));
}

namespace detail {

inline void check_weight_shape(const Tensor& values, const Tensor& weights, const Vars& vars) {
    if (values.shape_vector() != weights.shape_vector()) {
        throw DomainError("weights for (" + join_vars(vars, ", ") + ") do not match the tensor shape");
    }
}

struct SliceSums {
    double weight = 0.0;
    double weighted = 0.0;
};

inline SliceSums slice_sums(std::span<const double> values, std::span<const double> weights,
                            const SliceLayout& layout, std::size_t slice) {
    SliceSums s;
    std::size_t pos = layout.base(slice);
    for (std::size_t k = 0; k < layout.length; ++k, pos += layout.stride) {
        s.weight += weights[pos];
        s.weighted += weights[pos] * values[pos];
    }
    return s;
}

}  // namespace detail

/// Weighted mean of the slice of `values` along `axis` at `slice` (the flat
/// index over the remaining axes). Throws DegenerateSlice on zero weight.
inline double slice_weighted_mean(const Tensor& values, const Tensor& weights, std::size_t axis,
                                  std::size_t slice, const Vars& vars = {}) {
    detail::check_weight_shape(values, weights, vars);
    const SliceLayout layout = slice_layout(values.shape(), axis);
    if (slice >= layout.count) throw DomainError("slice index out of range");
    const auto s = detail::slice_sums(values.values(), weights.values(), layout, slice);
    if (!(s.weight > 0.0)) throw DegenerateSlice(vars, axis, slice);
    return s.weighted / s.weight;
}

/// Weighted mean of the slice of `effect` along `axis`, with the other axes
/// fixed at `fixed` (given in axis order, skipping `axis`).
inline double slice_weighted_mean(const EffectTensor& effect, const WeightDensity& w, std::size_t axis,
                                  std::span<const std::size_t> fixed) {
    const auto& shape = effect.values.shape_vector();
    if (axis >= shape.size()) throw DomainError("slice axis out of range");
    if (fixed.size() + 1 != shape.size()) throw DomainError("fixed index has wrong rank");
    std::size_t slice = 0;
    for (std::size_t k = 0, f = 0; k < shape.size(); ++k) {
        if (k == axis) continue;
        if (fixed[f] >= shape[k]) throw DomainError("fixed index out of range");
        slice = slice * shape[k] + fixed[f++];
    }
    return slice_weighted_mean(effect.values, w.at(effect.vars), axis, slice, effect.vars);
}

/// Unpurified mass: for every axis and every slice, the slice weight times
/// the absolute weighted slice mean, summed. For a matrix this is
/// sum_ij w_ij (|r_i| + |c_j|) with r, c the weighted row and column means.
inline double unpurified_mass(const Tensor& values, const Tensor& weights) {
    detail::check_weight_shape(values, weights, {});
    double mass = 0.0;
    for (std::size_t axis = 0; axis < values.rank(); ++axis) {
        const SliceLayout layout = slice_layout(values.shape(), axis);
        for (std::size_t s = 0; s < layout.count; ++s) {
            mass += std::abs(detail::slice_sums(values.values(), weights.values(), layout, s).weighted);
        }
    }
    return mass;
}

inline double unpurified_mass(const EffectTensor& effect, const WeightDensity& w) {
    return unpurified_mass(effect.values, w.at(effect.vars));
}

/// Largest |weighted slice mean| over all axes and nonzero-weight slices.
inline double max_abs_slice_mean(const Tensor& values, const Tensor& weights,
                                 std::size_t* degenerate = nullptr) {
    detail::check_weight_shape(values, weights, {});
    double worst = 0.0;
    std::size_t zero = 0;
    for (std::size_t axis = 0; axis < values.rank(); ++axis) {
        const SliceLayout layout = slice_layout(values.shape(), axis);
        for (std::size_t s = 0; s < layout.count; ++s) {
            const auto sums = detail::slice_sums(values.values(), weights.values(), layout, s);
            if (sums.weight > 0.0) {
                worst = std::max(worst, std::abs(sums.weighted / sums.weight));
            } else {
                ++zero;
            }
        }
    }
    if (degenerate) *degenerate = zero;
    return worst;
}

/// Every subset of every effect in `model`, down to the intercept.
inline std::set<Vars> required_subsets(const AdditiveModel& model) {
    std::set<Vars> out;
    for (const auto& [vars, effect] : model.effects()) {
        const std::size_t n = vars.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            Vars sub;
            for (std::size_t k = 0; k < n; ++k) {
                if (mask & (std::size_t{1} << k)) sub.push_back(vars[k]);
            }
            out.insert(std::move(sub));
        }
    }
    return out;
}

/// Throws DomainError unless `w` holds correctly shaped weights for every
/// subset in `subsets`.
inline void check_coverage(const AdditiveModel& model, const WeightDensity& w, const std::set<Vars>& subsets) {
    for (const auto& vars : subsets) {
        const Tensor* weights = w.find(vars);
        if (weights == nullptr) {
            throw DomainError("density is missing subset (" + join_vars(vars, ", ") + ")");
        }
        if (weights->shape_vector() != model.grid_shape(vars)) {
            throw DomainError("density for (" + join_vars(vars, ", ") + ") does not match the bin grid");
        }
    }
}

/// Purifies T_u in place (one call of the per-tensor mass-moving loop).
///
/// Axes are swept in `vars` order; along each axis every slice's weighted mean
/// is subtracted from the slice and added to T_{u\i}. A full pass over all
/// axes repeats until no slice moved anything (pure_flag) or every slice mean
/// is within tolerance (mass_below_tol). The mass is recorded after every
/// single-axis sweep.
inline ConvergenceReport purify_tensor_in_place(AdditiveModel& model, const Vars& vars, const WeightDensity& w,
                                                const PurifyOptions& options = {}) {
    if (!model.contains(vars)) {
        throw DomainError("model has no effect for (" + join_vars(vars, ", ") + ")");
    }
    const std::size_t rank = vars.size();
    {
        std::set<Vars> needed{vars};
        for (std::size_t axis = 0; axis < rank; ++axis) needed.insert(without_axis(vars, axis));
        check_coverage(model, w, needed);
    }
    const Tensor& weights = w.at(vars);

    ConvergenceReport report;
    report.vars = vars;
    report.mass_is_extension = rank > 2;
    report.pass_cap = options.max_passes.value_or(default_pass_cap(options.tol));
    if (rank == 0) return report;

    // Deposit targets first: creating them must not disturb the reference below.
    std::vector<Tensor*> targets(rank);
    for (std::size_t axis = 0; axis < rank; ++axis) {
        targets[axis] = &model.effect(without_axis(vars, axis)).values;
    }
    Tensor& tensor = model.effect(vars).values;
    std::vector<SliceLayout> layouts(rank);
    for (std::size_t axis = 0; axis < rank; ++axis) layouts[axis] = slice_layout(tensor.shape(), axis);

    const double initial = unpurified_mass(tensor, weights);
    report.tolerance = options.tol * std::max({1.0, initial, tensor.max_abs()});
    report.trace.push_back({0, initial});

    std::span<double> values = tensor.values();
    std::span<const double> wv = weights.values();
    std::size_t iteration = 0;
    double previous = HUGE_VAL;
    bool done = false;
    for (std::size_t pass = 1; pass <= report.pass_cap; ++pass) {
        bool moved = false;
        for (std::size_t axis = 0; axis < rank; ++axis) {
            const SliceLayout& layout = layouts[axis];
            std::span<double> target = targets[axis]->values();
            for (std::size_t s = 0; s < layout.count; ++s) {
                const auto sums = detail::slice_sums(values, wv, layout, s);
                if (!(sums.weight > 0.0)) {
                    if (options.degenerate == DegeneratePolicy::strict) throw DegenerateSlice(vars, axis, s);
                    if (pass == 1) ++report.degenerate_slices;
                    continue;
                }
                const double mean = sums.weighted / sums.weight;
                if (mean == 0.0) continue;
                moved = true;
                std::size_t pos = layout.base(s);
                for (std::size_t k = 0; k < layout.length; ++k, pos += layout.stride) values[pos] -= mean;
                target[s] += mean;
            }
            report.trace.push_back({++iteration, unpurified_mass(tensor, weights)});
        }
        report.passes = pass;
        if (!moved) {
            report.terminated_by = Termination::pure_flag;
            done = true;
            break;
        }
        const double worst = max_abs_slice_mean(tensor, weights);
        report.max_slice_mean = worst;
        // Below tol, or no longer improving at the rounding floor.
        if (worst <= options.tol || (worst <= report.tolerance && worst >= previous)) {
            report.terminated_by = Termination::mass_below_tol;
            done = true;
            break;
        }
        previous = worst;
    }
    if (!done) {
        report.terminated_by = Termination::max_iters;
        throw NonConvergence(std::move(report));
    }
    return report;
}

struct TensorPurification {
    AdditiveModel model;
    ConvergenceReport report;
};

inline TensorPurification purify_tensor(AdditiveModel model, const Vars& vars, const WeightDensity& w,
                                        const PurifyOptions& options = {}) {
    ConvergenceReport report = purify_tensor_in_place(model, vars, w, options);
    return {std::move(model), std::move(report)};
}

struct ModelPurification {
    AdditiveModel model;
    std::vector<ConvergenceReport> reports;  // one per purified tensor, in processing order
};

/// Purifies every tensor, highest order first (ties lexicographic by vars),
/// cascading mass down to the intercept. Tensors created by the cascade are
/// purified in their turn.
inline ModelPurification purify_model(AdditiveModel model, const WeightDensity& w,
                                      const PurifyOptions& options = {}) {
    check_coverage(model, w, required_subsets(model));

    std::size_t top = 0;
    for (const auto& [vars, effect] : model.effects()) top = std::max(top, vars.size());

    ModelPurification out;
    for (std::size_t order = top; order >= 1; --order) {
        std::vector<Vars> level;
        for (const auto& [vars, effect] : model.effects()) {
            if (vars.size() == order) level.push_back(vars);
        }
        for (const auto& vars : level) out.reports.push_back(purify_tensor_in_place(model, vars, w, options));
    }
    out.model = std::move(model);
    return out;
}

struct PurityEntry {
    Vars vars;
    double max_abs_slice_mean = 0.0;
    std::size_t degenerate_slices = 0;
    bool pass = true;
};

struct PurityReport {
    std::vector<PurityEntry> entries;  // non-intercept tensors, in model order
    double max_abs_slice_mean = 0.0;
    double tol = 0.0;
    bool pass = true;
};

/// Checks the zero-mean-slice conditions on every non-intercept tensor.
inline PurityReport check_purity(const AdditiveModel& model, const WeightDensity& w, double tol) {
    check_coverage(model, w, required_subsets(model));
    PurityReport report;
    report.tol = tol;
    for (const auto& [vars, effect] : model.effects()) {
        if (vars.empty()) continue;
        PurityEntry entry;
        entry.vars = vars;
        entry.max_abs_slice_mean = max_abs_slice_mean(effect.values, w.at(vars), &entry.degenerate_slices);
        entry.pass = entry.max_abs_slice_mean <= tol;
        report.max_abs_slice_mean = std::max(report.max_abs_slice_mean, entry.max_abs_slice_mean);
        report.pass = report.pass && entry.pass;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace fanova
