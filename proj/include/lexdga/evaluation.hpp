#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lexdga/csv.hpp"
#include "lexdga/error.hpp"
#include "lexdga/model.hpp"
#include "lexdga/parallel.hpp"

namespace lexdga {

/// Counts with dga (1) as the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truth) {
    if (predictions.size() != truth.size())
        throw ArgumentError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                            std::to_string(truth.size()) + " labels");
    if (truth.empty()) throw ArgumentError("confusion: no samples");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predictions[i] == Label::dga;
        const bool t = truth[i] == Label::dga;
        if (p && t) ++cm.tp;
        else if (p) ++cm.fp;
        else if (t) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

struct EvalMetrics {
    double accuracy = 0.0;   ///< percent
    double precision = 0.0;  ///< percent
    double recall = 0.0;     ///< percent
    double f_score = 0.0;    ///< [0,1]
    bool precision_undefined = false;  ///< no positive predictions; precision reported as 0
    bool recall_undefined = false;     ///< no positive samples; recall reported as 0
    ConfusionMatrix cm;
};

inline EvalMetrics metrics(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0) throw ArgumentError("metrics: empty confusion matrix");
    EvalMetrics m;
    m.cm = cm;
    m.accuracy = 100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
    double p = 0.0, r = 0.0;
    if (cm.tp + cm.fp == 0) m.precision_undefined = true;
    else p = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    if (cm.tp + cm.fn == 0) m.recall_undefined = true;
    else r = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    m.precision = 100.0 * p;
    m.recall = 100.0 * r;
    m.f_score = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    return m;
}

inline std::vector<Prediction> predict_all(const TrainedModel& model, const FeatureMatrix& m) {
    std::vector<Prediction> out(m.size());
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (m.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        const auto end = std::min(m.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) out[i] = predict(model, m.rows[i].features);
    });
    return out;
}

inline EvalMetrics evaluate(const TrainedModel& model, const FeatureMatrix& test) {
    if (test.empty()) throw DataError("evaluate: empty test matrix");
    for (auto f : model.features)
        if (std::find(kFeatureNames.begin(), kFeatureNames.end(), name_of(f)) == kFeatureNames.end())
            throw DataError("evaluate: model feature '" + std::string(name_of(f)) + "' missing from test matrix");
    const auto preds = predict_all(model, test);
    std::vector<Label> labels;
    labels.reserve(preds.size());
    for (const auto& p : preds) labels.push_back(p.label);
    return metrics(confusion(labels, test.labels()));
}

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation
};

inline MetricStats mean_stddev(std::span<const double> xs) {
    MetricStats s;
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

struct CrossValidation {
    std::vector<EvalMetrics> folds;
    std::vector<std::size_t> fold_of_row;
    MetricStats accuracy, precision, recall, f_score;
};

/// Stratified k-fold. Every learner fits its own normalization on the
/// training folds only.
inline CrossValidation cross_validate(const FeatureMatrix& m, std::size_t folds, const ModelSpec& spec,
                                      std::uint64_t seed) {
    CrossValidation cv;
    cv.fold_of_row = stratified_fold_ids(m.labels(), folds, seed);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < m.size(); ++i) (cv.fold_of_row[i] == f ? test_idx : train_idx).push_back(i);
        const auto model = train_model(spec, m.subset_rows(train_idx), seed);
        cv.folds.push_back(evaluate(model, m.subset_rows(test_idx)));
    }
    auto stat = [&](auto member) {
        std::vector<double> xs;
        for (const auto& e : cv.folds) xs.push_back(e.*member);
        return mean_stddev(xs);
    };
    cv.accuracy = stat(&EvalMetrics::accuracy);
    cv.precision = stat(&EvalMetrics::precision);
    cv.recall = stat(&EvalMetrics::recall);
    cv.f_score = stat(&EvalMetrics::f_score);
    return cv;
}

inline CrossValidation cross_validate(const DomainCorpus& corpus, std::size_t folds, const ModelSpec& spec,
                                      std::uint64_t seed) {
    return cross_validate(featurize_corpus(corpus), folds, spec, seed);
}

struct HoldoutProtocol {
    double test_fraction = 0.3;
    std::uint64_t seed = 42;
};

struct ReportRow {
    std::string model;
    std::string features;
    EvalMetrics metrics;
    std::uint64_t seed = 0;
};

struct EvalReport {
    std::vector<ReportRow> rows;
    HoldoutProtocol protocol;
    CorpusSummary corpus, train, test;
    std::string provenance;

    std::string to_csv() const {
        std::string out = "model,features,accuracy,precision,recall,fscore,tp,fp,tn,fn,seed\n";
        for (const auto& r : rows) {
            const auto& m = r.metrics;
            out += csv::escape(r.model) + ',' + csv::escape(r.features) + ',' + csv::format_fixed(m.accuracy, 4) +
                   ',' + csv::format_fixed(m.precision, 4) + ',' + csv::format_fixed(m.recall, 4) + ',' +
                   csv::format_fixed(m.f_score, 4) + ',' + std::to_string(m.cm.tp) + ',' + std::to_string(m.cm.fp) +
                   ',' + std::to_string(m.cm.tn) + ',' + std::to_string(m.cm.fn) + ',' + std::to_string(r.seed) + '\n';
        }
        return out;
    }

    std::string to_text() const {
        std::size_t name_w = 9, feat_w = 8;
        for (const auto& r : rows) {
            name_w = std::max(name_w, r.model.size());
            feat_w = std::max(feat_w, r.features.size());
        }
        std::ostringstream os;
        os << "corpus: " << provenance << "  total " << corpus.total << " (dga " << corpus.positives << ", legit "
           << corpus.negatives << ")\n";
        os << "holdout: test fraction " << protocol.test_fraction << ", seed " << protocol.seed << ", train "
           << train.total << ", test " << test.total << "\n\n";
        os << std::left << std::setw(static_cast<int>(name_w)) << "Algorithm" << "  " << std::setw(static_cast<int>(feat_w))
           << "Features" << std::right << "  Accuracy(%)  Precision(%)  Recall(%)  F-score\n";
        for (const auto& r : rows) {
            const auto& m = r.metrics;
            os << std::left << std::setw(static_cast<int>(name_w)) << r.model << "  " << std::setw(static_cast<int>(feat_w))
               << r.features << std::right << std::fixed << std::setprecision(1) << "  " << std::setw(11) << m.accuracy
               << "  " << std::setw(12) << m.precision << (m.precision_undefined ? "*" : " ") << std::setw(10)
               << m.recall << (m.recall_undefined ? "*" : " ") << std::setprecision(2) << std::setw(8) << m.f_score
               << "\n";
        }
        return os.str();
    }
};

/// Trains and scores every spec on one shared stratified holdout split.
inline EvalReport compare(std::span<const ModelSpec> specs, const FeatureMatrix& m, const HoldoutProtocol& protocol = {},
                          std::string provenance = "") {
    if (specs.empty()) throw ArgumentError("compare: no model specs");
    const auto [train, test] = stratified_split(m, protocol.test_fraction, protocol.seed);
    EvalReport report;
    report.protocol = protocol;
    report.corpus = summarize(m);
    report.train = summarize(train);
    report.test = summarize(test);
    report.provenance = std::move(provenance);
    for (const auto& spec : specs) {
        const auto model = train_model(spec, train, protocol.seed);
        report.rows.push_back({spec.name.empty() ? spec.describe() : spec.name, join_names(canonical(spec.features)),
                               evaluate(model, test), protocol.seed});
    }
    return report;
}

/// The five rows of the classic comparison: full-feature tree, KNN and
/// majority vote baselines plus tree and KNN bagging on `reduced`.
inline std::vector<ModelSpec> standard_specs(const FeatureSubset& reduced, std::size_t n_bags = 25,
                                             const BaseParams& params = {}) {
    std::vector<ModelSpec> specs(5);
    specs[0].name = "C4.5-style tree";
    specs[0].kind = ModelKind::tree;
    specs[1].name = "K-NN";
    specs[1].kind = ModelKind::knn;
    specs[2].name = "Majority vote";
    specs[2].kind = ModelKind::majority_vote;
    specs[3].name = "DT bagging";
    specs[3].kind = ModelKind::bagging;
    specs[3].base = BaseKind::tree;
    specs[3].features = reduced;
    specs[4].name = "K-NN bagging";
    specs[4].kind = ModelKind::bagging;
    specs[4].base = BaseKind::knn;
    specs[4].features = reduced;
    for (auto& s : specs) {
        s.params = params;
        s.n_bags = n_bags;
    }
    return specs;
}

}  // namespace lexdga
