#include <gtest/gtest.h>

#include <random>

#include "lexdga/tree.hpp"
#include "oracles.hpp"

using namespace lexdga;

namespace {

// rows carry (len, uniq_numbers) through a hand-built feature vector
FeatureMatrix xy_matrix(const std::vector<std::array<int, 3>>& rows) {
    FeatureMatrix m;
    for (auto [x, y, c] : rows) {
        FeatureVector fv;
        fv.len = x;
        fv.uniq_numbers = y;
        m.rows.push_back({fv, label_from_int(c)});
    }
    return m;
}

FeatureVector at(int x, int y) {
    FeatureVector fv;
    fv.len = x;
    fv.uniq_numbers = y;
    return fv;
}

const FeatureSubset kXY = {Feature::len, Feature::uniq_numbers};

double train_accuracy(const DecisionTree& t, const FeatureMatrix& m) {
    std::size_t ok = 0;
    for (const auto& r : m.rows) ok += t.predict(r.features) == r.label;
    return 100.0 * static_cast<double>(ok) / static_cast<double>(m.size());
}

FeatureMatrix random_matrix(std::mt19937& gen, std::size_t n) {
    std::uniform_int_distribution<int> v(0, 9), bit(0, 1);
    FeatureMatrix m;
    for (std::size_t i = 0; i < n; ++i) {
        const int x = v(gen), y = v(gen);
        // noisy threshold concept
        const int c = (x + y > 9) ^ (bit(gen) & bit(gen) & bit(gen));
        m.rows.push_back({at(x, y), label_from_int(c)});
    }
    return m;
}

/// Rows of `m` reaching each node.
std::vector<std::vector<std::size_t>> rows_per_node(const DecisionTree& t, const FeatureMatrix& m) {
    std::vector<std::vector<std::size_t>> out(t.nodes().size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::size_t n = 0;
        out[n].push_back(i);
        while (!t.nodes()[n].leaf) {
            const auto& node = t.nodes()[n];
            n = static_cast<std::size_t>(m.rows[i].features[node.feature] <= node.threshold ? node.left : node.right);
            out[n].push_back(i);
        }
    }
    return out;
}

}  // namespace

TEST(Tree, SeparableThreshold) {
    const auto m = xy_matrix({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {10, 0, 1}, {11, 0, 1}, {12, 0, 1}});
    const auto t = train_tree(m, {Feature::len}, {1, -1});
    EXPECT_EQ(t.depth(), 1u);
    EXPECT_EQ(t.leaf_count(), 2u);
    EXPECT_EQ(t.nodes()[0].threshold, 6.5);
    EXPECT_DOUBLE_EQ(train_accuracy(t, m), 100.0);
    EXPECT_EQ(predict_tree(t, at(4, 0)), Label::legit);
    EXPECT_EQ(predict_tree(t, at(9, 0)), Label::dga);
}

TEST(Tree, SingleClassIsOneLeaf) {
    const auto m = xy_matrix({{1, 3, 1}, {5, 2, 1}, {9, 1, 1}});
    const auto t = train_tree(m, kXY, {1, -1});
    ASSERT_EQ(t.nodes().size(), 1u);
    EXPECT_TRUE(t.nodes()[0].leaf);
    EXPECT_EQ(t.nodes()[0].label, Label::dga);
    EXPECT_EQ(t.predict(at(100, 100)), Label::dga);
}

TEST(Tree, MinLeafBlocksSmallSplits) {
    const auto m = xy_matrix({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {10, 0, 1}, {11, 0, 1}, {12, 0, 1}});
    EXPECT_EQ(train_tree(m, {Feature::len}, {4, -1}).nodes().size(), 1u);
    // tie at the root leaf goes to class 0
    EXPECT_EQ(train_tree(m, {Feature::len}, {4, -1}).predict(at(12, 0)), Label::legit);
}

TEST(Tree, XorLikeNeedsTwoLevels) {
    const auto m = xy_matrix({{1, 1, 0}, {1, 5, 0}, {2, 1, 0}, {2, 5, 0}, {3, 1, 1}, {3, 5, 0}, {4, 1, 1}, {4, 5, 0}});
    const auto t = train_tree(m, kXY, {1, -1});
    EXPECT_EQ(t.depth(), 2u);
    EXPECT_DOUBLE_EQ(train_accuracy(t, m), 100.0);
    const auto reach = rows_per_node(t, m);
    for (std::size_t n = 0; n < t.nodes().size(); ++n) {
        const auto& node = t.nodes()[n];
        const double best = oracle::best_gain_ratio(m, reach[n], kXY, 1);
        if (node.leaf) {
            EXPECT_LT(best, 0.0) << "leaf " << n << " could still split";
            continue;
        }
        std::array<std::size_t, 2> parent{}, left{};
        for (auto i : reach[n]) {
            ++parent[static_cast<std::size_t>(to_int(m.rows[i].label))];
            if (m.rows[i].features[node.feature] <= node.threshold) ++left[static_cast<std::size_t>(to_int(m.rows[i].label))];
        }
        EXPECT_NEAR(score_split(parent, left).gain_ratio, best, 1e-12);
    }
}

TEST(Tree, EverySplitIsMaximal) {
    std::mt19937 gen(31);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = random_matrix(gen, 40 + static_cast<std::size_t>(trial) * 5);
        const int min_leaf = 1 + trial % 5;
        const auto t = train_tree(m, kXY, {min_leaf, -1});
        const auto reach = rows_per_node(t, m);
        for (std::size_t n = 0; n < t.nodes().size(); ++n) {
            const auto& node = t.nodes()[n];
            EXPECT_EQ(node.samples, reach[n].size());
            const double best = oracle::best_gain_ratio(m, reach[n], kXY, static_cast<std::size_t>(min_leaf));
            if (node.leaf) {
                EXPECT_LT(best, 0.0);
                continue;
            }
            std::array<std::size_t, 2> parent{}, left{};
            for (auto i : reach[n]) {
                const auto c = static_cast<std::size_t>(to_int(m.rows[i].label));
                ++parent[c];
                if (m.rows[i].features[node.feature] <= node.threshold) ++left[c];
            }
            EXPECT_GE(left[0] + left[1], static_cast<std::size_t>(min_leaf));
            EXPECT_GE(parent[0] + parent[1] - left[0] - left[1], static_cast<std::size_t>(min_leaf));
            EXPECT_NEAR(score_split(parent, left).gain_ratio, best, 1e-12);
        }
    }
}

TEST(Tree, TrainingAccuracyNonDecreasingInDepth) {
    std::mt19937 gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = random_matrix(gen, 120);
        double prev = 0.0;
        for (int d = 0; d <= 8; ++d) {
            const auto t = train_tree(m, kXY, {1, d});
            EXPECT_LE(t.depth(), static_cast<std::size_t>(d));
            const double acc = train_accuracy(t, m);
            EXPECT_GE(acc, prev - 1e-12);
            prev = acc;
        }
    }
}

TEST(Tree, Deterministic) {
    std::mt19937 gen(9);
    const auto m = random_matrix(gen, 200);
    EXPECT_EQ(train_tree(m, kXY), train_tree(m, kXY));
}

TEST(Tree, Errors) {
    EXPECT_THROW(train_tree(FeatureMatrix{}, kXY), DataError);
    const auto m = xy_matrix({{1, 1, 0}, {2, 2, 1}});
    EXPECT_THROW(train_tree(m, {}), ArgumentError);
    EXPECT_THROW(train_tree(m, kXY, {0, -1}), ArgumentError);
    // a node pointing outside the array is rejected on construction
    TreeNode bad;
    bad.leaf = false;
    bad.left = 5;
    bad.right = 6;
    EXPECT_THROW(DecisionTree(kXY, {bad}), ModelFormatError);
}

TEST(Tree, SplitThresholdStaysBelowUpperValue) {
    EXPECT_EQ(split_threshold(1.0, 2.0), 1.5);
    const double lo = 1.0, hi = std::nextafter(1.0, 2.0);
    const double t = split_threshold(lo, hi);
    EXPECT_LE(lo, t);
    EXPECT_LT(t, hi);
}
