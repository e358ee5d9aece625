// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/bins.hpp"
#include "fanova/error.hpp"
#include "fanova/model.hpp"
#include "fanova/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace fanova {

/// Split rule: a real threshold (x < t goes left) or a label set (member goes left).
using Threshold = std::variant<double, std::vector<std::string>>;

/// A regression tree stored as a flat node array; node 0 is the root.
class Tree {
public:
    struct Node {
        bool is_leaf = true;
        double value = 0.0;  // leaves only
        std::string feature;
        Threshold threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;

        friend bool operator==(const Node&, const Node&) = default;
    };

    static Tree leaf(double value) {
        Tree t;
        t.nodes_.push_back(Node{true, value, {}, 0.0, 0, 0});
        return t;
    }

    static Tree split(std::string feature, Threshold threshold, const Tree& left, const Tree& right) {
        Tree t;
        t.nodes_.push_back(Node{false, 0.0, std::move(feature), std::move(threshold), 0, 0});
        t.nodes_[0].left = t.append(left);
        t.nodes_[0].right = t.append(right);
        return t;
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& root() const { return nodes_.at(0); }
    const Node& node(std::size_t k) const { return nodes_.at(k); }

    /// Number of split levels on the longest root-to-leaf path.
    std::size_t depth() const { return depth_from(0); }

    friend bool operator==(const Tree&, const Tree&) = default;

private:
    std::size_t append(const Tree& sub) {
        const std::size_t shift = nodes_.size();
        for (Node n : sub.nodes_) {
            if (!n.is_leaf) {
                n.left += shift;
                n.right += shift;
            }
            nodes_.push_back(std::move(n));
        }
        return shift;
    }

    std::size_t depth_from(std::size_t k) const {
        const Node& n = nodes_.at(k);
        if (n.is_leaf) return 0;
        return 1 + std::max(depth_from(n.left), depth_from(n.right));
    }

    std::vector<Node> nodes_;
};

struct TreeEnsemble {
    double base_score = 0.0;
    std::vector<Tree> trees;
};

inline bool goes_left(const Tree::Node& node, const FeatureValue& value) {
    if (const double* t = std::get_if<double>(&node.threshold)) {
        const double* x = std::get_if<double>(&value);
        if (x == nullptr) throw DomainError("feature '" + node.feature + "' split on a threshold but got a label");
        return *x < *t;
    }
    const std::string* label = std::get_if<std::string>(&value);
    if (label == nullptr) throw DomainError("feature '" + node.feature + "' split on labels but got a number");
    const auto& set = std::get<std::vector<std::string>>(node.threshold);
    return std::find(set.begin(), set.end(), *label) != set.end();
}

/// Per-feature bins from the split rules: sorted distinct thresholds for
/// continuous features, the sorted union of labels for categorical ones.
inline BinRegistry collect_bins(const TreeEnsemble& ensemble) {
    std::map<std::string, std::set<double>> thresholds;
    std::map<std::string, std::set<std::string>> labels;
    for (std::size_t t = 0; t < ensemble.trees.size(); ++t) {
        for (const auto& node : ensemble.trees[t].nodes()) {
            if (node.is_leaf) continue;
            if (const double* x = std::get_if<double>(&node.threshold)) {
                if (!std::isfinite(*x)) {
                    throw DomainError("tree " + std::to_string(t) + ": non-finite threshold on '" +
                                      node.feature + "'");
                }
                thresholds[node.feature].insert(*x);
            } else {
                const auto& set = std::get<std::vector<std::string>>(node.threshold);
                labels[node.feature].insert(set.begin(), set.end());
            }
        }
    }
    BinRegistry bins;
    for (auto& [name, edges] : thresholds) {
        if (labels.count(name)) {
            throw DomainError("feature '" + name + "' is split both by threshold and by label set");
        }
        bins.emplace(name, FeatureBins::continuous(name, std::vector<double>(edges.begin(), edges.end())));
    }
    for (auto& [name, set] : labels) {
        bins.emplace(name, FeatureBins::categorical(name, std::vector<std::string>(set.begin(), set.end())));
    }
    return bins;
}

/// Repeats `source` along the axes of `target_vars` it lacks.
inline EffectTensor broadcast(const EffectTensor& source, const Vars& target_vars,
                              const std::vector<std::size_t>& target_shape) {
    std::vector<std::size_t> pick;
    for (const auto& name : source.vars) {
        auto it = std::find(target_vars.begin(), target_vars.end(), name);
        if (it == target_vars.end()) throw DomainError("broadcast target lacks feature '" + name + "'");
        pick.push_back(static_cast<std::size_t>(it - target_vars.begin()));
    }
    EffectTensor out{target_vars, Tensor(target_shape)};
    if (out.values.size() == 0) return out;
    std::vector<std::size_t> index(target_shape.size(), 0);
    std::vector<std::size_t> sub(pick.size());
    std::size_t flat = 0;
    do {
        for (std::size_t k = 0; k < pick.size(); ++k) sub[k] = index[pick[k]];
        out.values[flat++] = source.values.at(sub);
    } while (next_index(index, target_shape));
    return out;
}

/// Splits one tree into effect tensors over the global bins.
///
/// Every leaf contributes its value on the cells its path admits, to the
/// tensor over the features its path tests. When the tree splits on at most
/// two features the pieces are merged into one tensor over those features;
/// a leaf-only tree yields an intercept. A tree testing three features (two
/// different second-level splits) keeps one tensor per path feature set.
inline std::vector<EffectTensor> tree_to_tensors(const Tree& tree, const BinRegistry& bins,
                                                 std::size_t tree_index = 0) {
    if (tree.nodes().empty()) throw UnsupportedStructure(tree_index, "empty tree");
    if (tree.depth() > 2) throw UnsupportedStructure(tree_index, "depth exceeds 2");

    auto bins_of = [&](const std::string& name) -> const FeatureBins& {
        auto it = bins.find(name);
        if (it == bins.end()) throw DomainError("tree " + std::to_string(tree_index) + ": no bins for '" + name + "'");
        return it->second;
    };
    std::set<std::string> used;
    for (const auto& node : tree.nodes()) {
        if (node.is_leaf) continue;
        const FeatureBins& fb = bins_of(node.feature);
        if (const double* t = std::get_if<double>(&node.threshold)) {
            if (!fb.is_continuous() || !std::binary_search(fb.edges().begin(), fb.edges().end(), *t)) {
                throw DomainError("tree " + std::to_string(tree_index) + ": threshold on '" + node.feature +
                                  "' is not a bin edge");
            }
        } else {
            if (fb.is_continuous()) {
                throw DomainError("tree " + std::to_string(tree_index) + ": label split on continuous '" +
                                  node.feature + "'");
            }
            for (const auto& label : std::get<std::vector<std::string>>(node.threshold)) fb.index_of(label);
        }
        used.insert(node.feature);
    }

    struct Leaf {
        std::size_t node;
        std::vector<std::size_t> path;  // split nodes from the root
    };
    std::vector<Leaf> leaves;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack{{0, {}}};
    while (!stack.empty()) {
        auto [k, path] = std::move(stack.back());
        stack.pop_back();
        const auto& n = tree.node(k);
        if (n.is_leaf) {
            leaves.push_back({k, path});
            continue;
        }
        path.push_back(k);
        stack.push_back({n.right, path});
        stack.push_back({n.left, path});
    }

    std::map<Vars, EffectTensor> pieces;
    for (const auto& leaf : leaves) {
        std::set<std::string> names;
        for (std::size_t k : leaf.path) names.insert(tree.node(k).feature);
        Vars vars(names.begin(), names.end());
        std::vector<std::size_t> shape;
        for (const auto& name : vars) shape.push_back(bins_of(name).cell_count());
        auto it = pieces.find(vars);
        if (it == pieces.end()) it = pieces.emplace(vars, EffectTensor{vars, Tensor(shape)}).first;
        Tensor& values = it->second.values;

        std::vector<std::size_t> index(vars.size(), 0);
        std::size_t flat = 0;
        do {
            bool inside = true;
            for (std::size_t k : leaf.path) {
                const auto& n = tree.node(k);
                const std::size_t axis = static_cast<std::size_t>(
                    std::find(vars.begin(), vars.end(), n.feature) - vars.begin());
                const FeatureValue rep = bins_of(n.feature).representative(index[axis]);
                const bool left = goes_left(n, rep);
                const std::size_t child = left ? n.left : n.right;
                // The path's next node (or the leaf) must be the child taken.
                const auto pos = std::find(leaf.path.begin(), leaf.path.end(), k);
                const std::size_t expected = (pos + 1 == leaf.path.end()) ? leaf.node : *(pos + 1);
                if (child != expected) {
                    inside = false;
                    break;
                }
            }
            if (inside) values[flat] += tree.node(leaf.node).value;
            ++flat;
        } while (!vars.empty() && next_index(index, shape));
    }

    std::vector<EffectTensor> out;
    if (used.size() <= 2) {
        Vars vars(used.begin(), used.end());
        std::vector<std::size_t> shape;
        for (const auto& name : vars) shape.push_back(bins_of(name).cell_count());
        EffectTensor merged{vars, Tensor(shape)};
        for (const auto& [key, piece] : pieces) {
            const EffectTensor b = broadcast(piece, vars, shape);
            for (std::size_t k = 0; k < merged.values.size(); ++k) merged.values[k] += b.values[k];
        }
        out.push_back(std::move(merged));
    } else {
        for (auto& [key, piece] : pieces) out.push_back(std::move(piece));
    }
    return out;
}

/// Sums the trees' tensors per feature subset; base_score becomes the intercept.
inline AdditiveModel ingest_ensemble(const TreeEnsemble& ensemble) {
    AdditiveModel model(collect_bins(ensemble));
    model.effect({}).values[0] += ensemble.base_score;
    for (std::size_t t = 0; t < ensemble.trees.size(); ++t) {
        for (const auto& piece : tree_to_tensors(ensemble.trees[t], model.bins(), t)) model.add_to_effect(piece);
    }
    return model;
}

}  // namespace fanova
