#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexdga/corpus.hpp"
#include "lexdga/csv.hpp"
#include "lexdga/error.hpp"

namespace lexdga {

/// The eight lexical features, in canonical (file and report) order.
enum class Feature : std::uint8_t {
    len = 0,
    uniq_chars,
    uniq_letters,
    uniq_numbers,
    ratio_letters,
    ratio_numbers,
    ratio_uniq_letters,
    ratio_uniq_numbers,
};

inline constexpr std::size_t kFeatureCount = 8;

inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::len,           Feature::uniq_chars,    Feature::uniq_letters,       Feature::uniq_numbers,
    Feature::ratio_letters, Feature::ratio_numbers, Feature::ratio_uniq_letters, Feature::ratio_uniq_numbers,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "len",           "uniq_chars",    "uniq_letters",       "uniq_numbers",
    "ratio_letters", "ratio_numbers", "ratio_uniq_letters", "ratio_uniq_numbers",
};

constexpr std::size_t index_of(Feature f) noexcept { return static_cast<std::size_t>(f); }
constexpr std::string_view name_of(Feature f) noexcept { return kFeatureNames[index_of(f)]; }

/// Counts are integer valued; ratios are continuous.
constexpr bool is_integer_feature(Feature f) noexcept { return index_of(f) < 4; }

inline std::optional<Feature> feature_from_name(std::string_view name) {
    for (auto f : kAllFeatures)
        if (name_of(f) == name) return f;
    return std::nullopt;
}

inline Feature parse_feature(std::string_view name) {
    if (auto f = feature_from_name(name)) return *f;
    throw DataError("unknown feature '" + std::string(name) + "'");
}

using FeatureSubset = std::vector<Feature>;

inline FeatureSubset all_features() { return {kAllFeatures.begin(), kAllFeatures.end()}; }

/// Sorted into canonical order, duplicates removed.
inline FeatureSubset canonical(FeatureSubset subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    return subset;
}

inline std::string join_names(std::span<const Feature> subset, std::string_view sep = "|") {
    std::string out;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) out += sep;
        out += name_of(subset[i]);
    }
    return out;
}

struct FeatureVector {
    int len = 0;
    int uniq_chars = 0;
    int uniq_letters = 0;
    int uniq_numbers = 0;
    double ratio_letters = 0.0;
    double ratio_numbers = 0.0;
    double ratio_uniq_letters = 0.0;
    double ratio_uniq_numbers = 0.0;

    double operator[](Feature f) const noexcept {
        switch (f) {
            case Feature::len: return len;
            case Feature::uniq_chars: return uniq_chars;
            case Feature::uniq_letters: return uniq_letters;
            case Feature::uniq_numbers: return uniq_numbers;
            case Feature::ratio_letters: return ratio_letters;
            case Feature::ratio_numbers: return ratio_numbers;
            case Feature::ratio_uniq_letters: return ratio_uniq_letters;
            case Feature::ratio_uniq_numbers: return ratio_uniq_numbers;
        }
        return 0.0;
    }

    std::array<double, kFeatureCount> to_array() const noexcept {
        std::array<double, kFeatureCount> out{};
        for (auto f : kAllFeatures) out[index_of(f)] = (*this)[f];
        return out;
    }

    static FeatureVector from_array(const std::array<double, kFeatureCount>& v) {
        FeatureVector fv;
        fv.len = static_cast<int>(v[0]);
        fv.uniq_chars = static_cast<int>(v[1]);
        fv.uniq_letters = static_cast<int>(v[2]);
        fv.uniq_numbers = static_cast<int>(v[3]);
        fv.ratio_letters = v[4];
        fv.ratio_numbers = v[5];
        fv.ratio_uniq_letters = v[6];
        fv.ratio_uniq_numbers = v[7];
        return fv;
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Lexical features of one domain label. Only [a-z0-9] count toward the
/// unique/ratio features; any other byte (hyphen, dot, ...) adds to length only.
/// Input is expected lowercased; uppercase letters are folded here anyway.
inline FeatureVector extract_features(std::string_view domain) {
    domain = detail::trim(domain);
    if (domain.empty()) throw DataError("cannot featurize an empty domain");

    std::bitset<26> letters_seen;
    std::bitset<10> digits_seen;
    std::size_t letters = 0;
    std::size_t digits = 0;
    for (unsigned char c : domain) {
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if (c >= 'a' && c <= 'z') {
            ++letters;
            letters_seen.set(c - 'a');
        } else if (c >= '0' && c <= '9') {
            ++digits;
            digits_seen.set(c - '0');
        }
    }

    FeatureVector fv;
    fv.len = static_cast<int>(domain.size());
    fv.uniq_letters = static_cast<int>(letters_seen.count());
    fv.uniq_numbers = static_cast<int>(digits_seen.count());
    fv.uniq_chars = fv.uniq_letters + fv.uniq_numbers;
    fv.ratio_letters = static_cast<double>(letters) / fv.len;
    fv.ratio_numbers = static_cast<double>(digits) / fv.len;
    if (fv.uniq_chars > 0) {
        fv.ratio_uniq_letters = static_cast<double>(fv.uniq_letters) / fv.uniq_chars;
        fv.ratio_uniq_numbers = static_cast<double>(fv.uniq_numbers) / fv.uniq_chars;
    }
    return fv;
}

struct LabeledRow {
    FeatureVector features;
    Label label = Label::legit;

    friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

/// Rows share the canonical feature ordering of `kFeatureNames`.
struct FeatureMatrix {
    std::vector<LabeledRow> rows;

    static constexpr std::span<const std::string_view> names() noexcept { return kFeatureNames; }

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }

    std::vector<double> column(Feature f) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.features[f]);
        return out;
    }

    std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.label);
        return out;
    }

    FeatureMatrix subset_rows(std::span<const std::size_t> indices) const { return {take_rows(rows, indices)}; }
};

inline CorpusSummary summarize(const FeatureMatrix& m) { return summarize_labels(m.labels()); }

inline FeatureMatrix featurize_corpus(const DomainCorpus& corpus) {
    if (corpus.empty()) throw DataError("cannot featurize an empty corpus");
    FeatureMatrix m;
    m.rows.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& rec = corpus.records[i];
        try {
            m.rows.push_back({extract_features(rec.domain), rec.label});
        } catch (const DataError& e) {
            throw DataError("record " + std::to_string(i) + ": " + e.what());
        }
    }
    return m;
}

inline std::pair<FeatureMatrix, FeatureMatrix> stratified_split(const FeatureMatrix& m, double test_fraction,
                                                                std::uint64_t seed) {
    const auto labels = m.labels();
    const auto split = stratified_split_indices(labels, test_fraction, seed);
    return {m.subset_rows(split.train), m.subset_rows(split.test)};
}

/// Per-feature observed range, used to scale features into [0,1].
struct NormalizationParams {
    std::array<double, kFeatureCount> min{};
    std::array<double, kFeatureCount> max{};

    friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;

    double scale(Feature f, double x) const noexcept {
        const auto i = index_of(f);
        const double range = max[i] - min[i];
        if (!(range > 0.0)) return 0.0;
        return std::clamp((x - min[i]) / range, 0.0, 1.0);
    }
};

inline NormalizationParams fit_normalization(const FeatureMatrix& m) {
    if (m.empty()) throw DataError("cannot fit normalization on an empty matrix");
    NormalizationParams p;
    p.min = m.rows.front().features.to_array();
    p.max = p.min;
    for (const auto& row : m.rows) {
        const auto v = row.features.to_array();
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            p.min[i] = std::min(p.min[i], v[i]);
            p.max[i] = std::max(p.max[i], v[i]);
        }
    }
    return p;
}

inline std::array<double, kFeatureCount> apply_normalization(const NormalizationParams& p,
                                                             const FeatureVector& fv) {
    std::array<double, kFeatureCount> out{};
    for (auto f : kAllFeatures) out[index_of(f)] = p.scale(f, fv[f]);
    return out;
}

// ---- features CSV (8 canonical columns + class) ----

inline std::string write_features_csv(const FeatureMatrix& m) {
    std::string out;
    for (auto n : kFeatureNames) {
        out += n;
        out += ',';
    }
    out += "class\n";
    for (const auto& row : m.rows) {
        const auto& fv = row.features;
        out += std::to_string(fv.len) + ',' + std::to_string(fv.uniq_chars) + ',' + std::to_string(fv.uniq_letters) +
               ',' + std::to_string(fv.uniq_numbers) + ',';
        for (auto f : {Feature::ratio_letters, Feature::ratio_numbers, Feature::ratio_uniq_letters,
                       Feature::ratio_uniq_numbers}) {
            out += csv::format_double(fv[f]);
            out += ',';
        }
        out += std::to_string(to_int(row.label));
        out += '\n';
    }
    return out;
}

inline FeatureMatrix read_features_csv(std::string_view text, const std::string& provenance = "<features>") {
    const auto records = csv::parse(text);
    if (records.empty()) throw DataError(provenance + ": empty features file");
    const auto& header = records.front().fields;
    std::array<std::size_t, kFeatureCount> cols{};
    for (auto f : kAllFeatures) {
        auto it = std::find(header.begin(), header.end(), name_of(f));
        if (it == header.end()) throw DataError(provenance + ": missing feature column '" + std::string(name_of(f)) + "'");
        cols[index_of(f)] = static_cast<std::size_t>(it - header.begin());
    }
    auto class_it = std::find(header.begin(), header.end(), "class");
    if (class_it == header.end()) throw DataError(provenance + ": missing column 'class'");
    const auto class_col = static_cast<std::size_t>(class_it - header.begin());

    FeatureMatrix m;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& fields = records[r].fields;
        try {
            if (fields.size() != header.size()) throw DataError("field count mismatch");
            std::array<double, kFeatureCount> v{};
            for (std::size_t i = 0; i < kFeatureCount; ++i) v[i] = csv::parse_double(fields[cols[i]]);
            const auto& cls = fields[class_col];
            if (cls != "0" && cls != "1") throw DataError("class must be 0 or 1, got '" + cls + "'");
            m.rows.push_back({FeatureVector::from_array(v), cls == "1" ? Label::dga : Label::legit});
        } catch (const DataError& e) {
            throw DataError(provenance + ": row " + std::to_string(r) + " (line " + std::to_string(records[r].line) +
                            "): " + e.what());
        }
    }
    if (m.empty()) throw DataError(provenance + ": features file has no data rows");
    return m;
}

// ---- feature manifest (one name per line) ----

inline std::string write_manifest(std::span<const Feature> subset) {
    std::string out;
    for (auto f : subset) {
        out += name_of(f);
        out += '\n';
    }
    return out;
}

inline FeatureSubset read_manifest(std::string_view text) {
    FeatureSubset out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = detail::trim(text.substr(pos, nl - pos));
        if (!line.empty() && line.front() != '#') out.push_back(parse_feature(line));
        pos = nl + 1;
    }
    if (out.empty()) throw DataError("feature manifest lists no features");
    return canonical(std::move(out));
}

}  // namespace lexdga
