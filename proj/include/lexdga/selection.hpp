#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexdga/error.hpp"
#include "lexdga/features.hpp"

namespace lexdga {

// ------------------------------------------------------------------ correlation

struct Correlation {
    double r = 0.0;
    bool degenerate = false;  ///< one side was constant; r reported as 0
};

/// Sample Pearson correlation, two-pass (mean-centred) for stability.
inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("pearson: length mismatch");
    if (x.size() < 2) throw DataError("pearson: need at least 2 rows");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return {0.0, true};
    return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

inline std::vector<double> label_column(std::span<const Label> labels) {
    std::vector<double> out;
    out.reserve(labels.size());
    for (auto l : labels) out.push_back(to_int(l));
    return out;
}

namespace detail {

inline void require_two_classes(std::span<const Label> labels, std::string_view op) {
    bool has[2] = {false, false};
    for (auto l : labels) has[to_int(l)] = true;
    if (!has[0] || !has[1]) throw DataError(std::string(op) + ": both classes must be present");
}

}  // namespace detail

/// Point-biserial correlation between one feature column and the 0/1 label.
inline Correlation pearson_class_correlation(const FeatureMatrix& m, Feature f) {
    if (m.size() < 2) throw DataError("pearson_class_correlation: need at least 2 rows");
    const auto labels = m.labels();
    detail::require_two_classes(labels, "pearson_class_correlation");
    return pearson(m.column(f), label_column(labels));
}

// ------------------------------------------------------------------ CFS

/// Subset merit k*rcf / sqrt(k + k(k-1)*rff).
inline double cfs_merit_value(std::size_t k, double avg_rcf, double avg_rff) {
    const double kd = static_cast<double>(k);
    return kd * avg_rcf / std::sqrt(kd + kd * (kd - 1.0) * avg_rff);
}

struct CfsMerit {
    FeatureSubset subset;
    double merit = 0.0;
    std::size_t k = 0;
    double avg_rcf = 0.0;  ///< mean |class-feature r|
    double avg_rff = 0.0;  ///< mean |feature-feature r| over pairs (0 when k = 1)
};

/// Absolute correlations computed once: class-feature and all feature pairs.
class CorrelationTable {
public:
    /// `columns[i]` is feature i; `target` is the 0/1 class column.
    CorrelationTable(std::span<const std::vector<double>> columns, std::span<const double> target)
        : n_(columns.size()), rcf_(n_), rff_(n_ * n_, 1.0) {
        for (std::size_t i = 0; i < n_; ++i) rcf_[i] = std::abs(pearson(columns[i], target).r);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double r = std::abs(pearson(columns[i], columns[j]).r);
                rff_[i * n_ + j] = rff_[j * n_ + i] = r;
            }
    }

    std::size_t size() const noexcept { return n_; }
    double class_feature(std::size_t i) const { return rcf_.at(i); }
    double feature_feature(std::size_t i, std::size_t j) const { return rff_.at(i * n_ + j); }

    /// Merit of the subset given as column indices; fills the averages too.
    void evaluate(std::span<const std::size_t> subset, double& merit, double& avg_rcf, double& avg_rff) const {
        if (subset.empty()) throw ArgumentError("cfs merit of an empty subset");
        const std::size_t k = subset.size();
        double sum_cf = 0;
        for (auto i : subset) sum_cf += class_feature(i);
        double sum_ff = 0;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) sum_ff += feature_feature(subset[a], subset[b]);
        avg_rcf = sum_cf / static_cast<double>(k);
        avg_rff = k > 1 ? sum_ff / (static_cast<double>(k * (k - 1)) / 2.0) : 0.0;
        merit = cfs_merit_value(k, avg_rcf, avg_rff);
    }

private:
    std::size_t n_;
    std::vector<double> rcf_;
    std::vector<double> rff_;
};

namespace detail {

inline CorrelationTable correlation_table(const FeatureMatrix& m) {
    if (m.size() < 2) throw DataError("correlation: need at least 2 rows");
    const auto labels = m.labels();
    require_two_classes(labels, "correlation");
    std::vector<std::vector<double>> cols;
    for (auto f : kAllFeatures) cols.push_back(m.column(f));
    return CorrelationTable(cols, label_column(labels));
}

}  // namespace detail

inline CfsMerit cfs_merit(const FeatureMatrix& m, FeatureSubset subset) {
    subset = canonical(std::move(subset));
    if (subset.empty()) throw ArgumentError("cfs_merit: empty subset");
    const auto table = detail::correlation_table(m);
    std::vector<std::size_t> idx;
    for (auto f : subset) idx.push_back(index_of(f));
    CfsMerit out;
    out.k = subset.size();
    table.evaluate(idx, out.merit, out.avg_rcf, out.avg_rff);
    out.subset = std::move(subset);
    return out;
}

struct ColumnSubsetMerit {
    std::vector<std::size_t> columns;
    double merit = 0.0;
    double avg_rcf = 0.0;
    double avg_rff = 0.0;
};

/// Exhaustive best subset over column indices. Merits within 1e-12
/// (relative) are ties, resolved toward the subset whose sorted name list is
/// lexicographically smallest.
inline ColumnSubsetMerit cfs_exhaustive(const CorrelationTable& table, std::span<const std::string> names) {
    const std::size_t n = table.size();
    if (n == 0 || n > 20) throw ArgumentError("cfs exhaustive search supports 1..20 features");
    if (names.size() != n) throw ArgumentError("cfs: name count mismatch");

    auto name_key = [&](const std::vector<std::size_t>& cols) {
        std::vector<std::string> key;
        for (auto c : cols) key.push_back(names[c]);
        std::sort(key.begin(), key.end());
        return key;
    };

    ColumnSubsetMerit best;
    bool have = false;
    std::vector<std::size_t> cols;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        cols.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) cols.push_back(i);
        ColumnSubsetMerit cand;
        table.evaluate(cols, cand.merit, cand.avg_rcf, cand.avg_rff);
        cand.columns = cols;
        const double tol = 1e-12 * std::max(1.0, std::abs(best.merit));
        if (!have || cand.merit > best.merit + tol ||
            (cand.merit >= best.merit - tol && name_key(cand.columns) < name_key(best.columns))) {
            best = std::move(cand);
            have = true;
        }
    }
    return best;
}

struct CfsSearchResult {
    CfsMerit best;
    /// |r| with the class for every feature, canonical order.
    std::array<double, kFeatureCount> class_correlation{};
};

inline CfsSearchResult cfs_search(const FeatureMatrix& m) {
    const auto table = detail::correlation_table(m);
    std::vector<std::string> names(kFeatureNames.begin(), kFeatureNames.end());
    const auto best = cfs_exhaustive(table, names);
    CfsSearchResult out;
    for (auto c : best.columns) out.best.subset.push_back(kAllFeatures[c]);
    out.best.k = best.columns.size();
    out.best.merit = best.merit;
    out.best.avg_rcf = best.avg_rcf;
    out.best.avg_rff = best.avg_rff;
    for (std::size_t i = 0; i < kFeatureCount; ++i) out.class_correlation[i] = table.class_feature(i);
    return out;
}

// ------------------------------------------------------------------ discretization

enum class DiscretizationStrategy { identity, equal_frequency };

/// Cut points c_0 < c_1 < ... ; a value x falls in bin #{c : c < x}.
inline std::vector<double> equal_frequency_cuts(std::span<const double> values, int bin_count) {
    if (bin_count < 2) throw ArgumentError("bin count must be at least 2");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    const std::size_t n = sorted.size();
    for (int b = 1; b < bin_count; ++b) {
        const auto target = static_cast<std::size_t>(static_cast<double>(n) * b / bin_count);
        if (target == 0 || target >= n) continue;
        // Never split a run of equal values: move to the nearer edge of the run.
        const auto lo = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), sorted[target]) - sorted.begin());
        const auto hi = static_cast<std::size_t>(
            std::upper_bound(sorted.begin(), sorted.end(), sorted[target]) - sorted.begin());
        std::size_t pos = 0;
        if (lo > 0 && (hi >= n || target - lo <= hi - target)) pos = lo;
        else if (hi < n) pos = hi;
        else continue;
        const double cut = sorted[pos - 1] + (sorted[pos] - sorted[pos - 1]) / 2.0;
        if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
    }
    return cuts;
}

inline int bin_of(std::span<const double> cuts, double x) {
    return static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

struct DiscretizationSpec {
    int bin_count = 10;
    std::array<DiscretizationStrategy, kFeatureCount> strategy{};
    std::array<std::vector<double>, kFeatureCount> cuts{};

    int code(Feature f, double x) const {
        const auto i = index_of(f);
        if (strategy[i] == DiscretizationStrategy::identity) return static_cast<int>(std::lround(x));
        return bin_of(cuts[i], x);
    }
};

/// Identity for the integer-valued counts, equal-frequency bins for ratios.
inline DiscretizationSpec fit_discretization(const FeatureMatrix& m, int bin_count = 10) {
    if (bin_count < 2) throw ArgumentError("bin count must be at least 2");
    DiscretizationSpec spec;
    spec.bin_count = bin_count;
    for (auto f : kAllFeatures) {
        const auto i = index_of(f);
        if (is_integer_feature(f)) {
            spec.strategy[i] = DiscretizationStrategy::identity;
        } else {
            spec.strategy[i] = DiscretizationStrategy::equal_frequency;
            spec.cuts[i] = equal_frequency_cuts(m.column(f), bin_count);
        }
    }
    return spec;
}

struct DiscreteMatrix {
    std::array<std::vector<int>, kFeatureCount> codes;
    std::vector<Label> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const int> column(Feature f) const { return codes[index_of(f)]; }
};

inline DiscreteMatrix discretize(const FeatureMatrix& m, const DiscretizationSpec& spec) {
    DiscreteMatrix out;
    out.labels = m.labels();
    for (auto f : kAllFeatures) {
        auto& col = out.codes[index_of(f)];
        col.reserve(m.size());
        for (const auto& row : m.rows) col.push_back(spec.code(f, row.features[f]));
    }
    return out;
}

// ------------------------------------------------------------------ information gain

/// I(F;C) in bits from empirical joint frequencies of a discrete column and the class.
inline double information_gain(std::span<const int> codes, std::span<const Label> labels) {
    if (codes.size() != labels.size()) throw ArgumentError("information_gain: length mismatch");
    detail::require_two_classes(labels, "information_gain");
    std::map<int, std::array<std::size_t, 2>> joint;
    std::array<std::size_t, 2> class_count{};
    for (std::size_t i = 0; i < codes.size(); ++i) {
        ++joint[codes[i]][to_int(labels[i])];
        ++class_count[to_int(labels[i])];
    }
    const double n = static_cast<double>(codes.size());
    double ig = 0.0;
    for (const auto& [value, counts] : joint) {
        const double pf = static_cast<double>(counts[0] + counts[1]) / n;
        for (int c = 0; c < 2; ++c) {
            if (counts[c] == 0) continue;
            const double pfc = static_cast<double>(counts[c]) / n;
            const double pc = static_cast<double>(class_count[c]) / n;
            ig += pfc * std::log2(pfc / (pf * pc));
        }
    }
    return std::max(ig, 0.0);
}

inline double information_gain(const DiscreteMatrix& m, Feature f) { return information_gain(m.column(f), m.labels); }

// ------------------------------------------------------------------ OneR

/// One-level rule over a (discretized) feature: bucket i covers codes
/// <= bucket_upper[i], the last bucket everything above.
struct OneRule {
    Feature feature = Feature::len;
    std::vector<double> cuts;          ///< discretization cut points; empty for integer features
    std::vector<double> bucket_upper;  ///< size = classes.size() - 1, strictly increasing
    std::vector<Label> classes;
    double accuracy = 0.0;             ///< resubstitution accuracy, percent

    int code(double x) const {
        return is_integer_feature(feature) ? static_cast<int>(std::lround(x)) : bin_of(cuts, x);
    }

    Label predict_code(int code) const {
        const auto it = std::lower_bound(bucket_upper.begin(), bucket_upper.end(), static_cast<double>(code));
        return classes[static_cast<std::size_t>(it - bucket_upper.begin())];
    }

    Label predict(const FeatureVector& fv) const { return predict_code(code(fv[feature])); }
};

struct OneRBuckets {
    std::vector<double> upper;
    std::vector<Label> classes;
};

/// Holte-style bucketing on discrete codes: walk distinct values in order,
/// close a bucket once its majority class has `min_bucket` members, fold the
/// remainder into the last bucket, then merge neighbours with equal class.
/// Majority ties resolve to class 0.
inline OneRBuckets one_r_buckets(std::span<const int> codes, std::span<const Label> labels, int min_bucket) {
    if (codes.empty()) throw DataError("one_r: empty matrix");
    if (codes.size() != labels.size()) throw ArgumentError("one_r: length mismatch");
    if (min_bucket < 1) throw ArgumentError("one_r: min_bucket must be >= 1");

    std::map<int, std::array<std::size_t, 2>> by_value;
    for (std::size_t i = 0; i < codes.size(); ++i) ++by_value[codes[i]][to_int(labels[i])];

    struct Bucket {
        int lo, hi;
        std::array<std::size_t, 2> counts;
    };
    std::vector<Bucket> buckets;
    std::optional<Bucket> open;
    for (const auto& [value, counts] : by_value) {
        if (!open) open = Bucket{value, value, {0, 0}};
        open->hi = value;
        open->counts[0] += counts[0];
        open->counts[1] += counts[1];
        if (std::max(open->counts[0], open->counts[1]) >= static_cast<std::size_t>(min_bucket)) {
            buckets.push_back(*open);
            open.reset();
        }
    }
    if (open) {
        if (buckets.empty()) {
            buckets.push_back(*open);
        } else {
            buckets.back().hi = open->hi;
            buckets.back().counts[0] += open->counts[0];
            buckets.back().counts[1] += open->counts[1];
        }
    }

    auto majority = [](const std::array<std::size_t, 2>& c) { return c[1] > c[0] ? Label::dga : Label::legit; };
    std::vector<Bucket> merged;
    for (const auto& b : buckets) {
        if (!merged.empty() && majority(merged.back().counts) == majority(b.counts)) {
            merged.back().hi = b.hi;
            merged.back().counts[0] += b.counts[0];
            merged.back().counts[1] += b.counts[1];
        } else {
            merged.push_back(b);
        }
    }

    OneRBuckets out;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        out.classes.push_back(majority(merged[i].counts));
        if (i + 1 < merged.size())
            out.upper.push_back((static_cast<double>(merged[i].hi) + static_cast<double>(merged[i + 1].lo)) / 2.0);
    }
    return out;
}

inline OneRule one_r(const FeatureMatrix& m, Feature f, int min_bucket = 6, int bin_count = 10) {
    if (m.empty()) throw DataError("one_r: empty matrix");
    OneRule rule;
    rule.feature = f;
    if (!is_integer_feature(f)) rule.cuts = equal_frequency_cuts(m.column(f), bin_count);
    std::vector<int> codes;
    codes.reserve(m.size());
    for (const auto& row : m.rows) codes.push_back(rule.code(row.features[f]));
    const auto labels = m.labels();
    auto buckets = one_r_buckets(codes, labels, min_bucket);
    rule.bucket_upper = std::move(buckets.upper);
    rule.classes = std::move(buckets.classes);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) correct += rule.predict_code(codes[i]) == labels[i];
    rule.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(codes.size());
    return rule;
}

// ------------------------------------------------------------------ ranking + fusion

enum class RankMethod { correlation, info_gain, one_r };

inline constexpr std::array<RankMethod, 3> kAllMethods = {RankMethod::correlation, RankMethod::info_gain,
                                                          RankMethod::one_r};

constexpr std::string_view method_name(RankMethod m) noexcept {
    switch (m) {
        case RankMethod::correlation: return "correlation";
        case RankMethod::info_gain: return "info_gain";
        case RankMethod::one_r: return "one_r";
    }
    return "?";
}

inline RankMethod parse_method(std::string_view s) {
    for (auto m : kAllMethods)
        if (method_name(m) == s) return m;
    throw ArgumentError("unknown ranking method '" + std::string(s) + "'");
}

struct FeatureRanking {
    RankMethod method = RankMethod::correlation;
    std::array<double, kFeatureCount> scores{};  ///< canonical order
    std::vector<Feature> order;                  ///< descending score
    std::vector<Feature> top_tier;               ///< prefix of `order`

    double score(Feature f) const { return scores[index_of(f)]; }
    bool in_top_tier(Feature f) const { return std::find(top_tier.begin(), top_tier.end(), f) != top_tier.end(); }
};

/// Length of the prefix ending just before the largest relative drop
/// (s[i] - s[i+1]) / s[i]. The earliest position wins equal drops.
inline std::size_t largest_gap_cut(std::span<const double> descending) {
    if (descending.size() < 2) return descending.size();
    std::size_t best = 0;
    double best_gap = -1.0;
    for (std::size_t i = 0; i + 1 < descending.size(); ++i) {
        const double gap = descending[i] > 0.0 ? (descending[i] - descending[i + 1]) / descending[i] : 0.0;
        if (gap > best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best + 1;
}

/// Orders features by descending score (ties by feature name) and cuts the top tier.
inline FeatureRanking rank_from_scores(RankMethod method, const std::array<double, kFeatureCount>& scores) {
    FeatureRanking r;
    r.method = method;
    r.scores = scores;
    r.order.assign(kAllFeatures.begin(), kAllFeatures.end());
    std::sort(r.order.begin(), r.order.end(), [&](Feature a, Feature b) {
        if (scores[index_of(a)] != scores[index_of(b)]) return scores[index_of(a)] > scores[index_of(b)];
        return name_of(a) < name_of(b);
    });
    std::vector<double> sorted;
    for (auto f : r.order) sorted.push_back(scores[index_of(f)]);
    const auto cut = largest_gap_cut(sorted);
    r.top_tier.assign(r.order.begin(), r.order.begin() + static_cast<std::ptrdiff_t>(cut));
    return r;
}

struct RankOptions {
    int bin_count = 10;
    int min_bucket = 6;
};

inline FeatureRanking rank_features(const FeatureMatrix& m, RankMethod method, const RankOptions& opt = {}) {
    std::array<double, kFeatureCount> scores{};
    switch (method) {
        case RankMethod::correlation: {
            const auto table = detail::correlation_table(m);
            for (std::size_t i = 0; i < kFeatureCount; ++i) scores[i] = table.class_feature(i);
            break;
        }
        case RankMethod::info_gain: {
            const auto d = discretize(m, fit_discretization(m, opt.bin_count));
            for (auto f : kAllFeatures) scores[index_of(f)] = information_gain(d, f);
            break;
        }
        case RankMethod::one_r:
            for (auto f : kAllFeatures) scores[index_of(f)] = one_r(m, f, opt.min_bucket, opt.bin_count).accuracy;
            break;
    }
    return rank_from_scores(method, scores);
}

struct SelectedFeatureSet {
    FeatureSubset features;  ///< canonical order
    std::array<int, kFeatureCount> votes{};
    int threshold = 2;
    std::string policy;

    int votes_for(Feature f) const { return votes[index_of(f)]; }
};

/// A feature is kept when it sits in the top tier of at least `threshold`
/// of the three rankings (one per method).
inline SelectedFeatureSet ensemble_select(std::span<const FeatureRanking> rankings, int threshold = 2) {
    if (rankings.size() != kAllMethods.size())
        throw ArgumentError("ensemble_select: expected one ranking per method (3), got " +
                            std::to_string(rankings.size()));
    for (std::size_t i = 0; i < rankings.size(); ++i)
        for (std::size_t j = i + 1; j < rankings.size(); ++j)
            if (rankings[i].method == rankings[j].method)
                throw ArgumentError("ensemble_select: duplicate method '" +
                                    std::string(method_name(rankings[i].method)) + "'");
    if (threshold < 1 || threshold > static_cast<int>(rankings.size()))
        throw ArgumentError("ensemble_select: threshold must be in 1..3");

    SelectedFeatureSet out;
    out.threshold = threshold;
    out.policy = "top-tier majority vote (largest relative gap cut), threshold " + std::to_string(threshold) + " of 3";
    for (const auto& r : rankings)
        for (auto f : r.top_tier) ++out.votes[index_of(f)];
    for (auto f : kAllFeatures)
        if (out.votes[index_of(f)] >= threshold) out.features.push_back(f);
    if (out.features.empty()) throw NoConsensusError(threshold);
    return out;
}

}  // namespace lexdga
