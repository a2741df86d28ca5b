#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "lexdga/bagging.hpp"
#include "lexdga/corpus.hpp"
#include "lexdga/features.hpp"
#include "lexdga/knn.hpp"
#include "lexdga/selection.hpp"
#include "lexdga/tree.hpp"

namespace lexdga {

/// Baseline: plain vote of a tree, a KNN and the best single-feature OneR rule.
struct MajorityVoteModel {
    DecisionTree tree;
    KnnModel knn;
    OneRule rule;

    EnsembleVote vote(const FeatureVector& fv) const {
        EnsembleVote v;
        v.votes_dga = (tree.predict(fv) == Label::dga) + (knn.predict(fv) == Label::dga) +
                      (rule.predict(fv) == Label::dga);
        v.label = v.votes_dga >= 2 ? Label::dga : Label::legit;
        v.vote_fraction = static_cast<double>(v.label == Label::dga ? v.votes_dga : 3 - v.votes_dga) / 3.0;
        return v;
    }

    Label predict(const FeatureVector& fv) const { return vote(fv).label; }
};

/// Highest-accuracy OneR rule among `features`; earlier canonical feature wins ties.
inline OneRule best_one_rule(const FeatureMatrix& m, const FeatureSubset& features, const RankOptions& opt = {}) {
    if (features.empty()) throw ArgumentError("best_one_rule: no features");
    std::optional<OneRule> best;
    for (auto f : canonical(features)) {
        auto rule = one_r(m, f, opt.min_bucket, opt.bin_count);
        if (!best || rule.accuracy > best->accuracy) best = std::move(rule);
    }
    return *best;
}

inline MajorityVoteModel train_majority_vote(const FeatureMatrix& m, const FeatureSubset& features,
                                             const BaseParams& params = {}, const RankOptions& rule_opt = {}) {
    if (m.empty()) throw DataError("train_majority_vote: empty matrix");
    return {DecisionTree::train(m, features, params.tree), KnnModel::train(m, features, params.k),
            best_one_rule(m, features, rule_opt)};
}

enum class ModelKind { tree, knn, bagging, majority_vote };

constexpr std::string_view model_kind_name(ModelKind k) noexcept {
    switch (k) {
        case ModelKind::tree: return "tree";
        case ModelKind::knn: return "knn";
        case ModelKind::bagging: return "bagging";
        case ModelKind::majority_vote: return "majority_vote";
    }
    return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
    for (auto k : {ModelKind::tree, ModelKind::knn, ModelKind::bagging, ModelKind::majority_vote})
        if (model_kind_name(k) == s) return k;
    throw ArgumentError("unknown model kind '" + std::string(s) + "'");
}

struct TrainedModel {
    std::variant<DecisionTree, KnnModel, BaggedEnsemble, MajorityVoteModel> body;
    FeatureSubset features;
    std::uint64_t seed = 0;
    CorpusSummary train_summary;

    ModelKind kind() const noexcept { return static_cast<ModelKind>(body.index()); }
};

struct Prediction {
    Label label = Label::legit;
    double vote_fraction = 1.0;
};

inline Prediction predict(const TrainedModel& model, const FeatureVector& fv) {
    return std::visit(
        [&](const auto& m) -> Prediction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DecisionTree>) {
                return {m.predict(fv), 1.0};
            } else {
                const auto v = m.vote(fv);
                return {v.label, v.vote_fraction};
            }
        },
        model.body);
}

/// What to train: kind, feature subset and hyper-parameters.
struct ModelSpec {
    std::string name;
    ModelKind kind = ModelKind::bagging;
    BaseKind base = BaseKind::tree;  ///< bagging only
    FeatureSubset features = all_features();
    BaseParams params;
    std::size_t n_bags = 25;
    RankOptions rule_options;  ///< majority vote's OneR member

    std::string describe() const {
        std::string s(model_kind_name(kind));
        if (kind == ModelKind::bagging) s += "(" + std::string(base_kind_name(base)) + "," + std::to_string(n_bags) + ")";
        return s;
    }
};

inline TrainedModel train_model(const ModelSpec& spec, const FeatureMatrix& train, std::uint64_t seed) {
    TrainedModel out;
    out.features = canonical(spec.features);
    out.seed = seed;
    out.train_summary = summarize(train);
    switch (spec.kind) {
        case ModelKind::tree: out.body = DecisionTree::train(train, out.features, spec.params.tree); break;
        case ModelKind::knn: out.body = KnnModel::train(train, out.features, spec.params.k); break;
        case ModelKind::bagging:
            out.body = train_bagging(train, out.features, spec.base, spec.n_bags, seed, spec.params);
            break;
        case ModelKind::majority_vote:
            out.body = train_majority_vote(train, out.features, spec.params, spec.rule_options);
            break;
    }
    return out;
}

}  // namespace lexdga
