#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "lexdga/error.hpp"
#include "lexdga/features.hpp"
#include "lexdga/knn.hpp"
#include "lexdga/parallel.hpp"
#include "lexdga/random.hpp"
#include "lexdga/tree.hpp"

namespace lexdga {

enum class BaseKind { tree, knn };

constexpr std::string_view base_kind_name(BaseKind b) noexcept { return b == BaseKind::tree ? "tree" : "knn"; }

inline BaseKind parse_base_kind(std::string_view s) {
    if (s == "tree") return BaseKind::tree;
    if (s == "knn") return BaseKind::knn;
    throw ArgumentError("unknown base learner '" + std::string(s) + "' (expected tree or knn)");
}

struct BaseParams {
    TreeParams tree;
    int k = 5;
};

using BaseModel = std::variant<DecisionTree, KnnModel>;

inline Label predict_base(const BaseModel& m, const FeatureVector& fv) {
    return std::visit([&](const auto& model) { return model.predict(fv); }, m);
}

struct EnsembleVote {
    Label label = Label::legit;
    double vote_fraction = 1.0;
    std::size_t votes_dga = 0;
};

struct BaggedEnsemble {
    BaseKind base = BaseKind::tree;
    std::vector<BaseModel> members;
    std::uint64_t seed = 0;
    FeatureSubset features;
    BaseParams params;

    std::size_t n_bags() const noexcept { return members.size(); }

    EnsembleVote vote(const FeatureVector& fv) const {
        EnsembleVote v;
        for (const auto& m : members) v.votes_dga += predict_base(m, fv) == Label::dga;
        const std::size_t legit = members.size() - v.votes_dga;
        v.label = v.votes_dga > legit ? Label::dga : Label::legit;
        v.vote_fraction = static_cast<double>(std::max(v.votes_dga, legit)) / static_cast<double>(members.size());
        return v;
    }

    Label predict(const FeatureVector& fv) const { return vote(fv).label; }
};

/// Rows of bag `bag`: n draws with replacement from a generator seeded by
/// derive_seed(seed, bag).
inline FeatureMatrix bootstrap_sample(const FeatureMatrix& m, std::uint64_t seed, std::size_t bag) {
    const auto idx = bootstrap_indices(m.size(), derive_seed(seed, bag));
    return m.subset_rows(idx);
}

inline BaseModel train_base(const FeatureMatrix& m, BaseKind base, const FeatureSubset& features,
                            const BaseParams& params) {
    if (base == BaseKind::tree) return DecisionTree::train(m, features, params.tree);
    return KnnModel::train(m, features, params.k);
}

/// Bags are trained independently (in parallel when cores allow); each bag's
/// sample depends only on (seed, bag index).
inline BaggedEnsemble train_bagging(const FeatureMatrix& m, FeatureSubset features, BaseKind base,
                                    std::size_t n_bags, std::uint64_t seed, const BaseParams& params = {}) {
    if (n_bags < 1) throw ArgumentError("train_bagging: n_bags must be >= 1");
    if (m.empty()) throw DataError("train_bagging: empty matrix");
    BaggedEnsemble ens;
    ens.base = base;
    ens.seed = seed;
    ens.features = canonical(std::move(features));
    ens.params = params;
    std::vector<std::optional<BaseModel>> slots(n_bags);
    parallel_for(n_bags, [&](std::size_t bag) {
        slots[bag] = train_base(bootstrap_sample(m, seed, bag), base, ens.features, params);
    });
    ens.members.reserve(n_bags);
    for (auto& s : slots) ens.members.push_back(std::move(*s));
    return ens;
}

inline EnsembleVote predict_bagging(const BaggedEnsemble& ens, const FeatureVector& fv) { return ens.vote(fv); }

}  // namespace lexdga
