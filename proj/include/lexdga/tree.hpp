#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lexdga/error.hpp"
#include "lexdga/features.hpp"

namespace lexdga {

struct TreeParams {
    int min_leaf = 5;    ///< minimum rows on each side of a split
    int max_depth = -1;  ///< negative: unlimited

    friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// Internal nodes send x[feature] <= threshold left, everything else right.
struct TreeNode {
    bool leaf = true;
    Feature feature = Feature::len;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    Label label = Label::legit;  ///< majority class of the rows that reached the node
    double purity = 1.0;         ///< fraction of those rows carrying `label`
    std::size_t samples = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

namespace detail {

inline double entropy2(std::size_t a, std::size_t b) {
    const double n = static_cast<double>(a + b);
    if (n == 0) return 0.0;
    double h = 0.0;
    for (auto c : {a, b}) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace detail

/// Score of splitting `parent` counts into `left` / rest; 0 gain means no split.
struct SplitScore {
    double gain = 0.0;
    double gain_ratio = 0.0;
};

inline SplitScore score_split(std::array<std::size_t, 2> parent, std::array<std::size_t, 2> left) {
    const std::array<std::size_t, 2> right{parent[0] - left[0], parent[1] - left[1]};
    const std::size_t n = parent[0] + parent[1];
    const std::size_t nl = left[0] + left[1];
    const std::size_t nr = n - nl;
    const double wl = static_cast<double>(nl) / static_cast<double>(n);
    const double wr = static_cast<double>(nr) / static_cast<double>(n);
    SplitScore s;
    s.gain = detail::entropy2(parent[0], parent[1]) - wl * detail::entropy2(left[0], left[1]) -
             wr * detail::entropy2(right[0], right[1]);
    const double split_info = detail::entropy2(nl, nr);
    s.gain_ratio = split_info > 0.0 ? s.gain / split_info : 0.0;
    return s;
}

/// Midpoint between two consecutive distinct sorted values, guaranteed to
/// satisfy lo <= t < hi.
inline double split_threshold(double lo, double hi) {
    const double t = lo + (hi - lo) / 2.0;
    return t < hi ? t : lo;
}

inline constexpr double kMinGain = 1e-12;

/// Binary C4.5-style tree on numeric features: every split is the (feature,
/// threshold) pair with maximum gain ratio among candidates with positive
/// gain and at least min_leaf rows per side. No pruning.
class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(FeatureSubset features, std::vector<TreeNode> nodes)
        : features_(std::move(features)), nodes_(std::move(nodes)) {
        validate();
    }

    static DecisionTree train(const FeatureMatrix& m, FeatureSubset features, const TreeParams& params = {}) {
        if (m.empty()) throw DataError("train_tree: empty matrix");
        features = canonical(std::move(features));
        if (features.empty()) throw ArgumentError("train_tree: no features");
        if (params.min_leaf < 1) throw ArgumentError("train_tree: min_leaf must be >= 1");
        Builder b(m, features, params);
        std::vector<std::uint32_t> idx(m.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
        b.build(idx, 0);
        return DecisionTree(std::move(features), std::move(b.nodes));
    }

    Label predict(const FeatureVector& fv) const {
        std::size_t at = 0;
        while (!nodes_[at].leaf)
            at = static_cast<std::size_t>(fv[nodes_[at].feature] <= nodes_[at].threshold ? nodes_[at].left
                                                                                           : nodes_[at].right);
        return nodes_[at].label;
    }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const FeatureSubset& features() const noexcept { return features_; }

    std::size_t depth() const { return nodes_.empty() ? 0 : depth_from(0); }
    std::size_t leaf_count() const {
        return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](auto& n) { return n.leaf; }));
    }

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    struct Builder {
        const FeatureMatrix& m;
        const FeatureSubset& features;
        TreeParams params;
        std::vector<TreeNode> nodes;
        std::vector<std::pair<double, std::uint8_t>> scratch;

        Builder(const FeatureMatrix& m_, const FeatureSubset& f, TreeParams p) : m(m_), features(f), params(p) {}

        std::int32_t build(std::vector<std::uint32_t>& idx, int depth) {
            std::array<std::size_t, 2> counts{};
            for (auto i : idx) ++counts[to_int(m.rows[i].label)];
            TreeNode node;
            node.samples = idx.size();
            node.label = counts[1] > counts[0] ? Label::dga : Label::legit;
            node.purity = static_cast<double>(std::max(counts[0], counts[1])) / static_cast<double>(idx.size());
            const auto self = static_cast<std::int32_t>(nodes.size());
            nodes.push_back(node);

            const bool pure = counts[0] == 0 || counts[1] == 0;
            const bool depth_capped = params.max_depth >= 0 && depth >= params.max_depth;
            const auto min_leaf = static_cast<std::size_t>(params.min_leaf);
            if (pure || depth_capped || idx.size() < 2 * min_leaf) return self;

            bool found = false;
            Feature best_feature{};
            double best_threshold = 0.0;
            double best_ratio = 0.0;
            for (auto f : features) {
                scratch.clear();
                for (auto i : idx) scratch.emplace_back(m.rows[i].features[f], to_int(m.rows[i].label));
                std::sort(scratch.begin(), scratch.end());
                std::array<std::size_t, 2> left{};
                for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
                    ++left[scratch[i].second];
                    if (scratch[i].first == scratch[i + 1].first) continue;
                    const std::size_t nl = i + 1;
                    if (nl < min_leaf || scratch.size() - nl < min_leaf) continue;
                    const auto s = score_split(counts, left);
                    if (s.gain <= kMinGain) continue;
                    if (!found || s.gain_ratio > best_ratio) {
                        found = true;
                        best_ratio = s.gain_ratio;
                        best_feature = f;
                        best_threshold = split_threshold(scratch[i].first, scratch[i + 1].first);
                    }
                }
            }
            if (!found) return self;

            std::vector<std::uint32_t> left_idx, right_idx;
            for (auto i : idx) (m.rows[i].features[best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
            idx.clear();
            idx.shrink_to_fit();
            nodes[self].leaf = false;
            nodes[self].feature = best_feature;
            nodes[self].threshold = best_threshold;
            const auto l = build(left_idx, depth + 1);
            const auto r = build(right_idx, depth + 1);
            nodes[self].left = l;
            nodes[self].right = r;
            return self;
        }
    };

    std::size_t depth_from(std::size_t at) const {
        if (nodes_[at].leaf) return 0;
        return 1 + std::max(depth_from(static_cast<std::size_t>(nodes_[at].left)),
                            depth_from(static_cast<std::size_t>(nodes_[at].right)));
    }

    void validate() const {
        if (nodes_.empty()) throw ModelFormatError("tree has no nodes");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const auto& n = nodes_[i];
            if (n.leaf) continue;
            if (!std::isfinite(n.threshold)) throw ModelFormatError("tree threshold is not finite");
            const auto in_range = [&](std::int32_t c) {
                return c > static_cast<std::int32_t>(i) && c < static_cast<std::int32_t>(nodes_.size());
            };
            if (!in_range(n.left) || !in_range(n.right)) throw ModelFormatError("tree child index out of range");
            if (std::find(features_.begin(), features_.end(), n.feature) == features_.end())
                throw ModelFormatError("tree tests a feature outside its feature list");
        }
    }

    FeatureSubset features_;
    std::vector<TreeNode> nodes_{TreeNode{}};
};

inline DecisionTree train_tree(const FeatureMatrix& m, FeatureSubset features, const TreeParams& params = {}) {
    return DecisionTree::train(m, std::move(features), params);
}

inline Label predict_tree(const DecisionTree& tree, const FeatureVector& fv) { return tree.predict(fv); }

}  // namespace lexdga
