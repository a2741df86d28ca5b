#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "lexdga/corpus.hpp"

using namespace lexdga;

namespace {

DomainCorpus corpus_of(std::initializer_list<std::pair<const char*, int>> rows) {
    DomainCorpus c;
    c.provenance = "test";
    for (auto [d, l] : rows) c.records.push_back({"", d, label_from_int(l)});
    return c;
}

DomainCorpus balanced(std::size_t pos, std::size_t neg) {
    DomainCorpus c;
    for (std::size_t i = 0; i < pos; ++i) c.records.push_back({"", "p" + std::to_string(i), Label::dga});
    for (std::size_t i = 0; i < neg; ++i) c.records.push_back({"", "n" + std::to_string(i), Label::legit});
    return c;
}

}  // namespace

TEST(LoadLabeledCsv, TableOneRow) {
    const auto c = load_labeled_csv("host,domain,class\nwww.mydaily.co.uk,mydaily,legit", CsvSchema{}, ParseMode::strict);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.records[0].host, "www.mydaily.co.uk");
    EXPECT_EQ(c.records[0].domain, "mydaily");
    EXPECT_EQ(c.records[0].label, Label::legit);
}

TEST(LoadLabeledCsv, HeaderOnlyIsEmptyCorpusError) {
    EXPECT_THROW(load_labeled_csv("host,domain,class\n", CsvSchema{}, ParseMode::lenient), DataError);
}

TEST(LoadLabeledCsv, LabelsAreCaseInsensitiveAndDomainsLowercased) {
    const auto c = load_labeled_csv("domain,class\n  XyZzY1 ,DGA\nfoo,Legit\n", CsvSchema{}, ParseMode::strict);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.records[0].domain, "xyzzy1");
    EXPECT_EQ(c.records[0].label, Label::dga);
    EXPECT_EQ(c.records[1].label, Label::legit);
}

TEST(LoadLabeledCsv, StrictAbortsWithRowNumber) {
    try {
        load_labeled_csv("domain,class\nok,legit\nbad,maybe\n", CsvSchema{}, ParseMode::strict);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    }
}

TEST(LoadLabeledCsv, LenientSkipsAndCounts) {
    LoadDiagnostics diag;
    const auto c = load_labeled_csv("domain,class\nok,legit\nbad,maybe\n,dga\nfine,dga\n", CsvSchema{},
                                    ParseMode::lenient, "mem", &diag);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(diag.skipped_rows, 2u);
    EXPECT_EQ(diag.issues.size(), 2u);
}

TEST(LoadLabeledCsv, MissingColumnAndCustomSchema) {
    EXPECT_THROW(load_labeled_csv("name,class\na,legit\n", CsvSchema{}, ParseMode::strict), DataError);
    CsvSchema schema;
    schema.domain_column = "name";
    schema.label_column = "kind";
    schema.label_map = {{"good", Label::legit}, {"bad", Label::dga}};
    const auto c = load_labeled_csv("name,kind\na,GOOD\nb,bad\n", schema, ParseMode::strict);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.records[1].label, Label::dga);
}

TEST(LoadLabeledCsv, UnreadableSource) {
    EXPECT_THROW(load_labeled_csv_file("/nonexistent/path.csv", CsvSchema{}, ParseMode::strict), DataError);
    std::istringstream bad;
    bad.setstate(std::ios::failbit);
    EXPECT_THROW(load_labeled_csv(bad, CsvSchema{}, ParseMode::strict), DataError);
}

TEST(Deduplicate, FirstOccurrenceWins) {
    const auto r = deduplicate(corpus_of({{"a", 0}, {"b", 1}, {"a", 0}}));
    ASSERT_EQ(r.corpus.size(), 2u);
    EXPECT_EQ(r.corpus.records[0].domain, "a");
    EXPECT_EQ(r.corpus.records[1].domain, "b");
    EXPECT_EQ(r.duplicates, 1u);
    EXPECT_EQ(r.conflicts, 0u);
}

TEST(Deduplicate, ConflictingLabelsCounted) {
    const auto r = deduplicate(corpus_of({{"a", 0}, {"a", 1}}));
    ASSERT_EQ(r.corpus.size(), 1u);
    EXPECT_EQ(r.corpus.records[0].label, Label::legit);
    EXPECT_EQ(r.conflicts, 1u);
}

TEST(Deduplicate, Idempotent) {
    const auto once = deduplicate(corpus_of({{"x", 1}, {"y", 0}, {"x", 1}, {"z", 0}, {"y", 1}})).corpus;
    const auto twice = deduplicate(once);
    EXPECT_EQ(twice.corpus.records, once.records);
    EXPECT_EQ(twice.duplicates, 0u);
}

TEST(Summarize, Counts) {
    EXPECT_EQ(summarize(DomainCorpus{}), (CorpusSummary{0, 0, 0}));
    EXPECT_EQ(summarize(corpus_of({{"a", 1}, {"b", 1}, {"c", 0}})), (CorpusSummary{3, 2, 1}));
}

TEST(StratifiedSplit, ExactPerClassCounts) {
    const auto [train, test] = stratified_split(balanced(5, 5), 0.2, 42);
    EXPECT_EQ(summarize(test), (CorpusSummary{2, 1, 1}));
    EXPECT_EQ(summarize(train), (CorpusSummary{8, 4, 4}));

    const auto [train2, test2] = stratified_split(balanced(2, 2), 0.5, 1);
    EXPECT_EQ(summarize(test2), (CorpusSummary{2, 1, 1}));
}

TEST(StratifiedSplit, Deterministic) {
    const auto c = balanced(37, 61);
    const auto a = stratified_split(c, 0.3, 42);
    const auto b = stratified_split(c, 0.3, 42);
    EXPECT_EQ(a.first.records, b.first.records);
    EXPECT_EQ(a.second.records, b.second.records);
    const auto other = stratified_split(c, 0.3, 43);
    EXPECT_NE(a.second.records, other.second.records);
}

TEST(StratifiedSplit, PartitionPropertyOverManySeeds) {
    const auto c = balanced(23, 41);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (double frac : {0.1, 0.3, 0.5, 0.7}) {
            const auto labels = labels_of(c);
            const auto s = stratified_split_indices(labels, frac, seed);
            std::set<std::size_t> all(s.train.begin(), s.train.end());
            for (auto i : s.test) EXPECT_TRUE(all.insert(i).second) << "overlap at " << i;
            EXPECT_EQ(all.size(), c.size());
            const auto test_summary = summarize_labels(take_rows(labels, s.test));
            EXPECT_LE(std::abs(static_cast<double>(test_summary.positives) - frac * 23), 1.0);
            EXPECT_LE(std::abs(static_cast<double>(test_summary.negatives) - frac * 41), 1.0);
            EXPECT_EQ(s.train.size() + s.test.size(), c.size());
        }
    }
}

TEST(StratifiedSplit, Errors) {
    EXPECT_THROW(stratified_split(balanced(5, 0), 0.2, 1), DataError);
    EXPECT_THROW(stratified_split(balanced(5, 5), 0.0, 1), ArgumentError);
    EXPECT_THROW(stratified_split(balanced(5, 5), 1.0, 1), ArgumentError);
    EXPECT_THROW(stratified_split(balanced(5, 5), 0.01, 1), DataError);  // no test rows
}

TEST(StratifiedFolds, DisjointCoverAndBalanced) {
    const auto labels = labels_of(balanced(2, 2));
    const auto folds = stratified_fold_ids(labels, 2, 9);
    for (std::size_t f = 0; f < 2; ++f) {
        int pos = 0, neg = 0;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (folds[i] == f) (labels[i] == Label::dga ? pos : neg)++;
        EXPECT_EQ(pos, 1);
        EXPECT_EQ(neg, 1);
    }
    EXPECT_THROW(stratified_fold_ids(labels, 3, 9), DataError);
    EXPECT_THROW(stratified_fold_ids(labels, 1, 9), ArgumentError);
}
