// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/error.hpp"
#include "fanova/tensor.hpp"

#include <cmath>
#include <map>

namespace fanova {

/// Normalized, nonnegative cell weights for every feature subset a
/// purification needs. Each subset carries its own tensor over its grid.
class WeightDensity {
public:
    static constexpr double kSumTolerance = 1e-12;

    /// Adds (or replaces) the weights of one subset after checking that they are
    /// finite, nonnegative and sum to one.
    void insert(Vars vars, Tensor weights) {
        if (!is_canonical(vars)) {
            throw DomainError("density subset (" + join_vars(vars, ", ") + ") is not sorted and unique");
        }
        double total = 0.0;
        for (double v : weights.values()) {
            if (!std::isfinite(v) || v < 0.0) {
                throw DomainError("density for (" + join_vars(vars, ", ") +
                                  ") has a negative or non-finite weight");
            }
            total += v;
        }
        if (std::abs(total - 1.0) > kSumTolerance) {
            throw DomainError("density for (" + join_vars(vars, ", ") + ") sums to " +
                              std::to_string(total) + ", not 1");
        }
        tensors_.insert_or_assign(std::move(vars), std::move(weights));
    }

    const Tensor* find(const Vars& vars) const {
        auto it = tensors_.find(vars);
        return it == tensors_.end() ? nullptr : &it->second;
    }

    const Tensor& at(const Vars& vars) const {
        const Tensor* w = find(vars);
        if (w == nullptr) {
            throw DomainError("density has no weights for subset (" + join_vars(vars, ", ") + ")");
        }
        return *w;
    }

    bool contains(const Vars& vars) const { return tensors_.count(vars) != 0; }

    const std::map<Vars, Tensor>& tensors() const noexcept { return tensors_; }

private:
    std::map<Vars, Tensor> tensors_;
};

/// Divides by the total so the tensor sums to one. Throws on a zero total.
inline Tensor normalized(Tensor weights, const std::string& what) {
    const double total = weights.sum();
    if (!(total > 0.0)) throw DomainError(what + ": total weight is zero");
    for (double& v : weights.values()) v /= total;
    return weights;
}

}  // namespace fanova
