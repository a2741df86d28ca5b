#include <gtest/gtest.h>

#include <random>

#include "lexdga/features.hpp"

using namespace lexdga;

TEST(ExtractFeatures, TableOneDomain) {
    const auto fv = extract_features("mydaily");
    EXPECT_EQ(fv.len, 7);
    EXPECT_EQ(fv.uniq_chars, 6);
    EXPECT_EQ(fv.uniq_letters, 6);
    EXPECT_EQ(fv.uniq_numbers, 0);
    EXPECT_DOUBLE_EQ(fv.ratio_letters, 1.0);
    EXPECT_DOUBLE_EQ(fv.ratio_numbers, 0.0);
    EXPECT_DOUBLE_EQ(fv.ratio_uniq_letters, 1.0);
    EXPECT_DOUBLE_EQ(fv.ratio_uniq_numbers, 0.0);
}

TEST(ExtractFeatures, SingleCharacter) {
    EXPECT_EQ(extract_features("a"), (FeatureVector{1, 1, 1, 0, 1.0, 0.0, 1.0, 0.0}));
}

TEST(ExtractFeatures, TyposquatWithDigit) {
    const auto fv = extract_features("paypa1");
    EXPECT_EQ(fv.len, 6);
    EXPECT_EQ(fv.uniq_chars, 4);
    EXPECT_EQ(fv.uniq_letters, 3);
    EXPECT_EQ(fv.uniq_numbers, 1);
    EXPECT_DOUBLE_EQ(fv.ratio_letters, 5.0 / 6.0);
    EXPECT_DOUBLE_EQ(fv.ratio_numbers, 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(fv.ratio_uniq_letters, 0.75);
    EXPECT_DOUBLE_EQ(fv.ratio_uniq_numbers, 0.25);
}

TEST(ExtractFeatures, NonAlphanumericCountsTowardLengthOnly) {
    const auto fv = extract_features("my-site");
    EXPECT_EQ(fv.len, 7);
    EXPECT_EQ(fv.uniq_chars, 6);
    EXPECT_DOUBLE_EQ(fv.ratio_letters, 6.0 / 7.0);
    EXPECT_DOUBLE_EQ(fv.ratio_numbers, 0.0);

    const auto dashes = extract_features("--");
    EXPECT_EQ(dashes.len, 2);
    EXPECT_EQ(dashes.uniq_chars, 0);
    EXPECT_DOUBLE_EQ(dashes.ratio_uniq_letters, 0.0);
}

TEST(ExtractFeatures, EmptyIsError) {
    EXPECT_THROW(extract_features(""), DataError);
    EXPECT_THROW(extract_features("   "), DataError);
}

TEST(ExtractFeatures, InvariantsOnRandomDomains) {
    std::mt19937 gen(5);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789-";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(1, 68);
    for (int t = 0; t < 2000; ++t) {
        std::string d(len(gen), 'a');
        for (auto& c : d) c = alphabet[pick(gen)];
        const auto fv = extract_features(d);
        EXPECT_EQ(fv.len, static_cast<int>(d.size()));
        EXPECT_EQ(fv.uniq_letters + fv.uniq_numbers, fv.uniq_chars);
        EXPECT_LE(fv.uniq_letters, 26);
        EXPECT_LE(fv.uniq_numbers, 10);
        EXPECT_LE(fv.uniq_chars, std::min(fv.len, 36));
        EXPECT_LE(fv.ratio_letters + fv.ratio_numbers, 1.0 + 1e-12);
        if (fv.uniq_chars > 0) {
            EXPECT_NEAR(fv.ratio_uniq_letters + fv.ratio_uniq_numbers, 1.0, 1e-12);
        }
        if (d.find('-') == std::string::npos) {
            EXPECT_NEAR(fv.ratio_letters + fv.ratio_numbers, 1.0, 1e-12);
        }
        EXPECT_EQ(fv, extract_features(d));
    }
}

TEST(FeaturizeCorpus, PreservesOrderAndLabels) {
    DomainCorpus c;
    c.records = {{"", "mydaily", Label::legit}, {"", "x9k2", Label::dga}, {"", "abc", Label::legit}};
    const auto m = featurize_corpus(c);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m.rows[0].features, extract_features("mydaily"));
    EXPECT_EQ(m.rows[0].label, Label::legit);
    EXPECT_EQ(m.rows[1].features, extract_features("x9k2"));
    EXPECT_EQ(m.rows[1].label, Label::dga);
    EXPECT_EQ(m.rows[2].features.len, 3);
    EXPECT_THROW(featurize_corpus(DomainCorpus{}), DataError);
}

TEST(Normalization, FitAndApply) {
    FeatureMatrix m;
    m.rows = {{extract_features("abc"), Label::legit}, {extract_features("abcdefghij"), Label::dga}};
    const auto p = fit_normalization(m);
    EXPECT_EQ(p.min[index_of(Feature::len)], 3.0);
    EXPECT_EQ(p.max[index_of(Feature::len)], 10.0);
    EXPECT_EQ(p.scale(Feature::len, 10), 1.0);
    EXPECT_EQ(p.scale(Feature::len, 3), 0.0);
    EXPECT_EQ(p.scale(Feature::len, 40), 1.0);  // clamped
    EXPECT_EQ(p.scale(Feature::len, 1), 0.0);
    // ratio_letters is constant 1.0 here
    EXPECT_EQ(p.min[index_of(Feature::ratio_letters)], p.max[index_of(Feature::ratio_letters)]);
    EXPECT_EQ(p.scale(Feature::ratio_letters, 0.3), 0.0);

    FeatureMatrix single;
    single.rows = {{extract_features("paypa1"), Label::dga}};
    const auto ps = fit_normalization(single);
    EXPECT_EQ(ps.min, ps.max);
    EXPECT_EQ(ps.min, extract_features("paypa1").to_array());
    EXPECT_THROW(fit_normalization(FeatureMatrix{}), DataError);
}

TEST(Normalization, FittedRowsLandInUnitCube) {
    std::mt19937 gen(11);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(1, 30);
    FeatureMatrix m;
    for (int i = 0; i < 300; ++i) {
        std::string d(len(gen), 'a');
        for (auto& c : d) c = alphabet[pick(gen)];
        m.rows.push_back({extract_features(d), label_from_int(i % 2)});
    }
    const auto p = fit_normalization(m);
    for (const auto& r : m.rows)
        for (double v : apply_normalization(p, r.features)) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
}

TEST(FeaturesCsv, RoundTripAndHeader) {
    FeatureMatrix m;
    m.rows = {{extract_features("mydaily"), Label::legit}, {extract_features("paypa1"), Label::dga}};
    const auto text = write_features_csv(m);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "len,uniq_chars,uniq_letters,uniq_numbers,ratio_letters,ratio_numbers,ratio_uniq_letters,"
              "ratio_uniq_numbers,class");
    EXPECT_EQ(read_features_csv(text).rows, m.rows);
    EXPECT_THROW(read_features_csv("len,class\n1,0\n"), DataError);
}

TEST(Manifest, ParseAndCanonicalise) {
    const auto fs = read_manifest("uniq_letters\n# comment\nlen\n\nuniq_chars\n");
    EXPECT_EQ(fs, (FeatureSubset{Feature::len, Feature::uniq_chars, Feature::uniq_letters}));
    EXPECT_EQ(write_manifest(fs), "len\nuniq_chars\nuniq_letters\n");
    EXPECT_THROW(read_manifest("bogus\n"), DataError);
    EXPECT_THROW(read_manifest("\n"), DataError);
}
