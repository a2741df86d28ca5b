#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "lexdga/error.hpp"
#include "lexdga/features.hpp"

namespace lexdga {

struct KnnVote {
    Label label = Label::legit;
    double vote_fraction = 1.0;  ///< share of the k neighbours carrying `label`
};

/// K nearest neighbours on min-max scaled features, Euclidean distance.
/// Equal distances rank by stored row index; equal votes go to class 0.
class KnnModel {
public:
    KnnModel() = default;

    /// `points` is row-major, `features.size()` values per stored row, each in [0,1].
    KnnModel(int k, FeatureSubset features, NormalizationParams norm, std::vector<double> points,
             std::vector<Label> labels)
        : k_(k), features_(std::move(features)), norm_(norm), points_(std::move(points)), labels_(std::move(labels)) {
        const auto d = features_.size();
        if (d == 0) throw ArgumentError("knn: no features");
        if (points_.size() != labels_.size() * d) throw ModelFormatError("knn: point block size mismatch");
        if (k_ < 1 || static_cast<std::size_t>(k_) > labels_.size())
            throw ArgumentError("knn: k must be in [1, " + std::to_string(labels_.size()) + "], got " +
                                std::to_string(k_));
        for (double v : points_)
            if (!(v >= 0.0 && v <= 1.0)) throw ModelFormatError("knn: stored coordinate outside [0,1]");
        build_groups();
    }

    static KnnModel train(const FeatureMatrix& m, FeatureSubset features, int k) {
        if (m.empty()) throw DataError("train_knn: empty matrix");
        if (k < 1 || static_cast<std::size_t>(k) > m.size())
            throw ArgumentError("train_knn: k must be in [1, " + std::to_string(m.size()) + "], got " +
                                std::to_string(k));
        features = canonical(std::move(features));
        const auto norm = fit_normalization(m);
        std::vector<double> points;
        points.reserve(m.size() * features.size());
        for (const auto& row : m.rows)
            for (auto f : features) points.push_back(norm.scale(f, row.features[f]));
        return KnnModel(k, std::move(features), norm, std::move(points), m.labels());
    }

    std::vector<double> scale(const FeatureVector& fv) const {
        std::vector<double> q;
        q.reserve(features_.size());
        for (auto f : features_) q.push_back(norm_.scale(f, fv[f]));
        return q;
    }

    /// Stored row indices of the k nearest neighbours, nearest first.
    std::vector<std::size_t> neighbours(const FeatureVector& fv) const {
        const auto q = scale(fv);
        const std::size_t d = features_.size();
        const auto k = static_cast<std::size_t>(k_);
        // Max-heap on (distance, index): top is the current k-th neighbour.
        using Entry = std::pair<double, std::size_t>;
        std::priority_queue<Entry> heap;
        for (const auto& g : groups_) {
            const double* p = &points_[g.members.front() * d];
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = p[j] - q[j];
                dist += diff * diff;
            }
            if (heap.size() == k && dist > heap.top().first) continue;
            for (auto idx : g.members) {
                const Entry e{dist, idx};
                if (heap.size() < k) {
                    heap.push(e);
                } else if (e < heap.top()) {
                    heap.pop();
                    heap.push(e);
                } else {
                    break;  // members ascend, so the rest lose too
                }
            }
        }
        std::vector<std::size_t> out(heap.size());
        for (auto i = out.size(); i-- > 0;) {
            out[i] = heap.top().second;
            heap.pop();
        }
        return out;
    }

    KnnVote vote(const FeatureVector& fv) const {
        const auto nn = neighbours(fv);
        std::size_t dga = 0;
        for (auto i : nn) dga += labels_[i] == Label::dga;
        const std::size_t legit = nn.size() - dga;
        KnnVote v;
        v.label = dga > legit ? Label::dga : Label::legit;
        v.vote_fraction = static_cast<double>(std::max(dga, legit)) / static_cast<double>(nn.size());
        return v;
    }

    Label predict(const FeatureVector& fv) const { return vote(fv).label; }

    int k() const noexcept { return k_; }
    const FeatureSubset& features() const noexcept { return features_; }
    const NormalizationParams& normalization() const noexcept { return norm_; }
    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t distinct_points() const noexcept { return groups_.size(); }

    friend bool operator==(const KnnModel& a, const KnnModel& b) {
        return std::tie(a.k_, a.features_, a.norm_, a.points_, a.labels_) ==
               std::tie(b.k_, b.features_, b.norm_, b.points_, b.labels_);
    }

private:
    /// Identical stored points share one distance evaluation.
    struct Group {
        std::vector<std::size_t> members;  ///< ascending row indices
    };

    void build_groups() {
        const std::size_t d = features_.size();
        std::map<std::vector<double>, std::size_t> index;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            std::vector<double> key(points_.begin() + static_cast<std::ptrdiff_t>(i * d),
                                    points_.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
            auto [it, inserted] = index.try_emplace(std::move(key), groups_.size());
            if (inserted) groups_.emplace_back();
            groups_[it->second].members.push_back(i);
        }
    }

    int k_ = 1;
    FeatureSubset features_;
    NormalizationParams norm_;
    std::vector<double> points_;
    std::vector<Label> labels_;
    std::vector<Group> groups_;
};

inline KnnModel train_knn(const FeatureMatrix& m, FeatureSubset features, int k) {
    return KnnModel::train(m, std::move(features), k);
}

inline Label predict_knn(const KnnModel& model, const FeatureVector& fv) { return model.predict(fv); }

}  // namespace lexdga
