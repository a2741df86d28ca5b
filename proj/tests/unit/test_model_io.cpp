#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "lexdga/model_io.hpp"
#include "lexdga/synthetic.hpp"

using namespace lexdga;

namespace {

const FeatureMatrix& training() {
    static const FeatureMatrix m = [] {
        SyntheticCorpusOptions opt;
        opt.legit = 300;
        opt.dga = 200;
        opt.seed = 3;
        return featurize_corpus(make_synthetic_corpus(opt));
    }();
    return m;
}

std::vector<ModelSpec> all_kinds() {
    std::vector<ModelSpec> s(5);
    s[0].kind = ModelKind::tree;
    s[1].kind = ModelKind::knn;
    s[2].kind = ModelKind::bagging;
    s[2].base = BaseKind::tree;
    s[2].n_bags = 5;
    s[2].features = {Feature::len, Feature::uniq_chars, Feature::uniq_letters};
    s[3].kind = ModelKind::bagging;
    s[3].base = BaseKind::knn;
    s[3].n_bags = 3;
    s[3].params.k = 3;
    s[4].kind = ModelKind::majority_vote;
    return s;
}

std::string random_domain(std::mt19937& gen) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789-";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(1, 40);
    std::string d(len(gen), 'a');
    for (auto& c : d) c = alphabet[pick(gen)];
    return d;
}

}  // namespace

TEST(ModelIo, RoundTripEveryKind) {
    std::mt19937 gen(10);
    for (const auto& spec : all_kinds()) {
        const auto model = train_model(spec, training(), 99);
        const auto text = serialize_model(model);
        const auto back = deserialize_model(text);
        EXPECT_EQ(back.kind(), model.kind());
        EXPECT_EQ(back.features, model.features);
        EXPECT_EQ(back.seed, 99u);
        EXPECT_EQ(back.train_summary.total, training().size());
        EXPECT_EQ(serialize_model(back), text) << spec.describe();
        for (int i = 0; i < 300; ++i) {
            const auto fv = extract_features(random_domain(gen));
            const auto a = predict(model, fv), b = predict(back, fv);
            EXPECT_EQ(a.label, b.label);
            EXPECT_EQ(a.vote_fraction, b.vote_fraction);
        }
    }
}

TEST(ModelIo, SaveAndLoadFile) {
    const auto path = (std::filesystem::temp_directory_path() / "lexdga_model_io_test.model").string();
    const auto model = train_model(all_kinds()[2], training(), 5);
    save_model(model, path);
    const auto back = load_model(path);
    EXPECT_EQ(serialize_model(back), serialize_model(model));
    std::filesystem::remove(path);
    EXPECT_THROW(load_model(path), DataError);
}

TEST(ModelIo, HeaderAndChecksumLayout) {
    const auto text = serialize_model(train_model(all_kinds()[0], training(), 1));
    EXPECT_EQ(text.rfind("LEXDGA-MODEL 1\n", 0), 0u);
    const auto tag = text.rfind("checksum fnv1a64 ");
    ASSERT_NE(tag, std::string::npos);
    EXPECT_EQ(text.substr(tag + 17, 16), hex64(fnv1a64(std::string_view(text).substr(0, tag))));
}

TEST(ModelIo, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}

TEST(ModelIo, TruncatedFileIsCorrupt) {
    const auto text = serialize_model(train_model(all_kinds()[1], training(), 1));
    for (std::size_t cut : {std::size_t{0}, std::size_t{10}, text.size() / 2, text.size() - 30})
        EXPECT_THROW(deserialize_model(std::string_view(text).substr(0, cut)), CorruptModelError) << cut;
}

TEST(ModelIo, FlippedByteIsCorrupt) {
    auto text = serialize_model(train_model(all_kinds()[0], training(), 1));
    const auto pos = text.find("threshold");
    ASSERT_NE(pos, std::string::npos);
    text[pos + 14] = text[pos + 14] == '1' ? '2' : '1';
    EXPECT_THROW(deserialize_model(text), CorruptModelError);
}

TEST(ModelIo, VersionMismatchNamesBothVersions) {
    auto text = serialize_model(train_model(all_kinds()[0], training(), 1));
    text.replace(0, 14, "LEXDGA-MODEL 7");
    try {
        deserialize_model(text);
        FAIL() << "expected a version error";
    } catch (const ModelVersionError& e) {
        EXPECT_EQ(e.expected(), "1");
        EXPECT_EQ(e.found(), "7");
        EXPECT_NE(std::string(e.what()).find("expected 1"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("found 7"), std::string::npos);
    }
}

TEST(ModelIo, NotAModelFile) {
    EXPECT_THROW(deserialize_model("hello\nworld\n"), CorruptModelError);
}

TEST(ModelIo, MissingFeatureListRejected) {
    std::string body = "LEXDGA-MODEL 1\n{\"format_version\": 1, \"kind\": \"tree\", \"seed\": 1}\n";
    const auto text = body + "checksum fnv1a64 " + hex64(fnv1a64(body)) + "\n";
    try {
        deserialize_model(text);
        FAIL() << "expected a format error";
    } catch (const ModelFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("features"), std::string::npos) << e.what();
    }
}
