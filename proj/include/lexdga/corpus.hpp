#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexdga/csv.hpp"
#include "lexdga/error.hpp"
#include "lexdga/random.hpp"

namespace lexdga {

/// Binary class. Positive (dga) is the class detectors try to find.
enum class Label : std::uint8_t { legit = 0, dga = 1 };

constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
constexpr Label label_from_int(int v) { return v == 0 ? Label::legit : Label::dga; }

struct DomainRecord {
    std::string host;    ///< optional full hostname / URL
    std::string domain;  ///< bare label that is classified; lowercase, trimmed
    Label label = Label::legit;

    friend bool operator==(const DomainRecord&, const DomainRecord&) = default;
};

struct DomainCorpus {
    std::vector<DomainRecord> records;
    std::string provenance;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
};

struct CorpusSummary {
    std::size_t total = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;

    friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

enum class ParseMode { strict, lenient };

namespace detail {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Column mapping and label dictionary for labeled domain CSVs.
struct CsvSchema {
    std::string domain_column = "domain";
    std::string label_column = "class";
    std::string host_column = "host";  ///< optional; ignored when absent
    /// Keys are matched case-insensitively.
    std::map<std::string, Label> label_map = {
        {"legit", Label::legit}, {"dga", Label::dga}, {"0", Label::legit}, {"1", Label::dga}};

    std::optional<Label> map_label(std::string_view raw) const {
        const auto key = detail::to_lower(detail::trim(raw));
        for (const auto& [k, v] : label_map)
            if (detail::to_lower(k) == key) return v;
        return std::nullopt;
    }
};

/// Rows skipped in lenient mode, with reasons.
struct LoadDiagnostics {
    std::size_t skipped_rows = 0;
    std::vector<std::string> issues;
};

inline DomainCorpus load_labeled_csv(std::string_view text, const CsvSchema& schema, ParseMode mode,
                                     std::string provenance = "<memory>",
                                     LoadDiagnostics* diagnostics = nullptr) {
    const auto rows = csv::parse(text);
    if (rows.empty()) throw DataError(provenance + ": empty input (no header)");

    const auto& header = rows.front().fields;
    auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (detail::to_lower(detail::trim(header[i])) == detail::to_lower(name)) return i;
        return std::nullopt;
    };
    const auto domain_col = find_column(schema.domain_column);
    if (!domain_col) throw DataError(provenance + ": missing column '" + schema.domain_column + "'");
    const auto label_col = find_column(schema.label_column);
    if (!label_col) throw DataError(provenance + ": missing column '" + schema.label_column + "'");
    const auto host_col = find_column(schema.host_column);

    DomainCorpus corpus;
    corpus.provenance = std::move(provenance);
    LoadDiagnostics local;
    auto& diag = diagnostics ? *diagnostics : local;

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& fields = rows[r].fields;
        auto reject = [&](const std::string& why) {
            const auto msg = corpus.provenance + ": row " + std::to_string(r) + " (line " +
                             std::to_string(rows[r].line) + "): " + why;
            if (mode == ParseMode::strict) throw DataError(msg);
            ++diag.skipped_rows;
            diag.issues.push_back(msg);
        };
        if (fields.size() <= std::max(*domain_col, *label_col)) {
            reject("too few fields");
            continue;
        }
        const auto domain = detail::to_lower(detail::trim(fields[*domain_col]));
        if (domain.empty()) {
            reject("empty domain");
            continue;
        }
        const auto label = schema.map_label(fields[*label_col]);
        if (!label) {
            reject("unmappable label '" + fields[*label_col] + "'");
            continue;
        }
        DomainRecord rec;
        if (host_col && *host_col < fields.size()) rec.host = std::string(detail::trim(fields[*host_col]));
        rec.domain = domain;
        rec.label = *label;
        corpus.records.push_back(std::move(rec));
    }
    if (corpus.empty()) throw DataError(corpus.provenance + ": empty corpus (no data rows)");
    return corpus;
}

inline DomainCorpus load_labeled_csv(std::istream& in, const CsvSchema& schema, ParseMode mode,
                                     std::string provenance = "<stream>",
                                     LoadDiagnostics* diagnostics = nullptr) {
    if (!in) throw DataError(provenance + ": unreadable source");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return load_labeled_csv(std::string_view(text), schema, mode, std::move(provenance), diagnostics);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline DomainCorpus load_labeled_csv_file(const std::string& path, const CsvSchema& schema, ParseMode mode,
                                          LoadDiagnostics* diagnostics = nullptr) {
    const auto text = read_file(path);
    return load_labeled_csv(std::string_view(text), schema, mode, path, diagnostics);
}

struct DedupResult {
    DomainCorpus corpus;
    std::size_t duplicates = 0;  ///< repeated domains removed
    std::size_t conflicts = 0;   ///< removed repeats whose label disagreed with the kept one
};

/// First occurrence wins; order otherwise preserved.
inline DedupResult deduplicate(const DomainCorpus& corpus) {
    DedupResult out;
    out.corpus.provenance = corpus.provenance;
    std::unordered_map<std::string, Label> seen;
    seen.reserve(corpus.size());
    for (const auto& rec : corpus.records) {
        auto [it, inserted] = seen.try_emplace(rec.domain, rec.label);
        if (inserted) {
            out.corpus.records.push_back(rec);
            continue;
        }
        ++out.duplicates;
        if (it->second != rec.label) ++out.conflicts;
    }
    return out;
}

template <typename LabelRange>
CorpusSummary summarize_labels(const LabelRange& labels) {
    CorpusSummary s;
    for (Label l : labels) {
        ++s.total;
        (l == Label::dga ? s.positives : s.negatives) += 1;
    }
    return s;
}

inline std::vector<Label> labels_of(const DomainCorpus& corpus) {
    std::vector<Label> out;
    out.reserve(corpus.size());
    for (const auto& r : corpus.records) out.push_back(r.label);
    return out;
}

inline CorpusSummary summarize(const DomainCorpus& corpus) { return summarize_labels(labels_of(corpus)); }

/// Row indices of a two-way partition, each ascending.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

namespace detail {

inline std::array<std::vector<std::size_t>, 2> indices_by_class(std::span<const Label> labels) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[to_int(labels[i])].push_back(i);
    return by_class;
}

}  // namespace detail

/// Per class: shuffle with a seeded generator, move round(fraction * n_class)
/// rows into the test side.
inline SplitIndices stratified_split_indices(std::span<const Label> labels, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ArgumentError("test fraction must lie in (0, 1)");
    auto by_class = detail::indices_by_class(labels);
    if (by_class[0].empty() || by_class[1].empty())
        throw DataError("stratified split needs both classes present");

    SplitIndices out;
    for (int c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        shuffle(std::span(idx), rng);
        const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
        if (n_test == 0 || n_test >= idx.size())
            throw DataError("test fraction leaves class " + std::to_string(c) + " without test or train rows");
        out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

/// Fold id (0..folds-1) per row; each class is dealt round-robin after a seeded shuffle.
inline std::vector<std::size_t> stratified_fold_ids(std::span<const Label> labels, std::size_t folds,
                                                    std::uint64_t seed) {
    if (folds < 2) throw ArgumentError("cross-validation needs at least 2 folds");
    auto by_class = detail::indices_by_class(labels);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < folds)
            throw DataError("class " + std::to_string(c) + " has fewer rows than folds");
    std::vector<std::size_t> fold_of(labels.size());
    for (int c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        shuffle(std::span(idx), rng);
        for (std::size_t i = 0; i < idx.size(); ++i) fold_of[idx[i]] = i % folds;
    }
    return fold_of;
}

template <typename T>
std::vector<T> take_rows(const std::vector<T>& rows, std::span<const std::size_t> indices) {
    std::vector<T> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(rows.at(i));
    return out;
}

inline std::pair<DomainCorpus, DomainCorpus> stratified_split(const DomainCorpus& corpus, double test_fraction,
                                                              std::uint64_t seed) {
    const auto labels = labels_of(corpus);
    const auto split = stratified_split_indices(labels, test_fraction, seed);
    DomainCorpus train{take_rows(corpus.records, split.train), corpus.provenance + " [train]"};
    DomainCorpus test{take_rows(corpus.records, split.test), corpus.provenance + " [test]"};
    return {std::move(train), std::move(test)};
}

}  // namespace lexdga
