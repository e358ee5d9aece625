// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace fanova {

/// Sorted, duplicate-free feature names identifying one effect (empty = intercept).
using Vars = std::vector<std::string>;

inline bool is_canonical(const Vars& vars) {
    return std::adjacent_find(vars.begin(), vars.end(), std::greater_equal<>{}) == vars.end();
}

inline std::string join_vars(const Vars& vars, std::string_view sep = "*") {
    std::string out;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (k) out += sep;
        out += vars[k];
    }
    return out;
}

/// `vars` with the entry at `axis` removed.
inline Vars without_axis(const Vars& vars, std::size_t axis) {
    Vars out;
    out.reserve(vars.size() - 1);
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (k != axis) out.push_back(vars[k]);
    }
    return out;
}

/// Dense row-major real tensor. Rank 0 holds a single scalar.
class Tensor {
public:
    Tensor() : values_(1, 0.0) {}

    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
        : shape_(std::move(shape)), values_(product(shape_), fill) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> values)
        : shape_(std::move(shape)), values_(std::move(values)) {
        if (values_.size() != product(shape_)) {
            throw DomainError("tensor holds " + std::to_string(values_.size()) +
                              " values but its shape needs " + std::to_string(product(shape_)));
        }
    }

    static Tensor scalar(double value) { return Tensor({}, std::vector<double>{value}); }

    std::span<const std::size_t> shape() const noexcept { return shape_; }
    const std::vector<std::size_t>& shape_vector() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double& operator[](std::size_t flat) { return values_[flat]; }
    double operator[](std::size_t flat) const { return values_[flat]; }

    std::size_t offset(std::span<const std::size_t> index) const {
        if (index.size() != shape_.size()) throw DomainError("tensor index has wrong rank");
        std::size_t flat = 0;
        for (std::size_t k = 0; k < shape_.size(); ++k) {
            if (index[k] >= shape_[k]) throw DomainError("tensor index out of range");
            flat = flat * shape_[k] + index[k];
        }
        return flat;
    }

    double& at(std::span<const std::size_t> index) { return values_[offset(index)]; }
    double at(std::span<const std::size_t> index) const { return values_[offset(index)]; }
    double& at(std::initializer_list<std::size_t> index) { return at(std::span(index.begin(), index.size())); }
    double at(std::initializer_list<std::size_t> index) const { return at(std::span(index.begin(), index.size())); }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    static std::size_t product(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
    }

    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

/// Geometry of the 1-D slices of a row-major tensor along one axis.
///
/// Slices are numbered in row-major order over the remaining axes, which is
/// also the flat index of the matching cell in the tensor with that axis
/// removed.
struct SliceLayout {
    std::size_t count = 1;   // number of slices
    std::size_t length = 1;  // cells per slice
    std::size_t stride = 1;  // distance between consecutive cells of a slice
    std::size_t inner = 1;   // product of the extents after the axis

    std::size_t base(std::size_t slice) const noexcept {
        return (slice / inner) * length * inner + slice % inner;
    }
};

inline SliceLayout slice_layout(std::span<const std::size_t> shape, std::size_t axis) {
    if (axis >= shape.size()) throw DomainError("slice axis out of range");
    SliceLayout layout;
    layout.length = shape[axis];
    for (std::size_t k = axis + 1; k < shape.size(); ++k) layout.inner *= shape[k];
    layout.stride = layout.inner;
    std::size_t total = 1;
    for (std::size_t extent : shape) total *= extent;
    layout.count = layout.length == 0 ? 0 : total / layout.length;
    return layout;
}

/// Row-major multi-index increment; returns false after the last index.
inline bool next_index(std::span<std::size_t> index, std::span<const std::size_t> shape) {
    for (std::size_t k = index.size(); k-- > 0;) {
        if (++index[k] < shape[k]) return true;
        index[k] = 0;
    }
    return false;
}

/// One additive component f_u: a tensor of effect sizes over the grid of `vars`.
struct EffectTensor {
    Vars vars;
    Tensor values;

    std::size_t order() const noexcept { return vars.size(); }

    friend bool operator==(const EffectTensor&, const EffectTensor&) = default;
};

}  // namespace fanova
