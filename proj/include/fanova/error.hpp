// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fanova {

/// Raised when an input violates a documented precondition or invariant
/// (bad bins, unknown label, shape mismatch, missing density subset, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Tree shapes the ingester cannot represent (depth > 2).
class UnsupportedStructure : public DomainError {
public:
    UnsupportedStructure(std::size_t tree_index, const std::string& what)
        : DomainError("tree " + std::to_string(tree_index) + ": " + what),
          tree_index_(tree_index) {}

    std::size_t tree_index() const noexcept { return tree_index_; }

private:
    std::size_t tree_index_;
};

/// A 1-D slice whose total weight is zero; its weighted mean is undefined.
class DegenerateSlice : public std::runtime_error {
public:
    DegenerateSlice(std::vector<std::string> vars, std::size_t axis, std::size_t slice)
        : std::runtime_error(describe(vars, axis, slice)),
          vars_(std::move(vars)),
          axis_(axis),
          slice_(slice) {}

    const std::vector<std::string>& vars() const noexcept { return vars_; }
    std::size_t axis() const noexcept { return axis_; }
    std::size_t slice() const noexcept { return slice_; }

private:
    static std::string describe(const std::vector<std::string>& vars, std::size_t axis,
                                std::size_t slice) {
        std::string msg = "zero-weight slice in tensor (";
        for (std::size_t k = 0; k < vars.size(); ++k) {
            if (k) msg += ", ";
            msg += vars[k];
        }
        msg += ") along axis " + std::to_string(axis) + ", slice " + std::to_string(slice);
        return msg;
    }

    std::vector<std::string> vars_;
    std::size_t axis_;
    std::size_t slice_;
};

}  // namespace fanova
