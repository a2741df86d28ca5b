#pragma once

// Model file layout (text, '\n' line endings):
//
//   LEXDGA-MODEL <version>
//   <JSON document, keys in the order written by to_json below>
//   checksum fnv1a64 <16 lowercase hex digits>
//
// The checksum is FNV-1a 64 over every byte before the checksum line.
// Doubles are written in shortest round-trip form, so a reloaded model
// predicts exactly like the saved one.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lexdga/error.hpp"
#include "lexdga/model.hpp"

namespace lexdga {

inline constexpr std::string_view kModelMagic = "LEXDGA-MODEL";
inline constexpr int kModelFormatVersion = 1;

inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace io {

using json = nlohmann::ordered_json;

inline json features_json(const FeatureSubset& fs) {
    json a = json::array();
    for (auto f : fs) a.push_back(std::string(name_of(f)));
    return a;
}

inline FeatureSubset features_from(const json& j) {
    FeatureSubset fs;
    for (const auto& n : j) {
        const auto name = n.get<std::string>();
        auto f = feature_from_name(name);
        if (!f) throw ModelFormatError("model references unknown feature '" + name + "'");
        fs.push_back(*f);
    }
    if (fs.empty()) throw ModelFormatError("model lists no features");
    return fs;
}

inline json norm_json(const NormalizationParams& p) { return json{{"min", p.min}, {"max", p.max}}; }

inline NormalizationParams norm_from(const json& j) {
    NormalizationParams p;
    p.min = j.at("min").get<std::array<double, kFeatureCount>>();
    p.max = j.at("max").get<std::array<double, kFeatureCount>>();
    return p;
}

inline json node_json(const DecisionTree& t, std::size_t at) {
    const auto& n = t.nodes()[at];
    json j;
    j["leaf"] = n.leaf;
    if (!n.leaf) {
        j["feature"] = std::string(name_of(n.feature));
        j["threshold"] = n.threshold;
    }
    j["label"] = to_int(n.label);
    j["purity"] = n.purity;
    j["samples"] = n.samples;
    if (!n.leaf) {
        j["left"] = node_json(t, static_cast<std::size_t>(n.left));
        j["right"] = node_json(t, static_cast<std::size_t>(n.right));
    }
    return j;
}

inline std::int32_t node_from(const json& j, std::vector<TreeNode>& nodes) {
    TreeNode n;
    n.leaf = j.at("leaf").get<bool>();
    n.label = label_from_int(j.at("label").get<int>());
    n.purity = j.at("purity").get<double>();
    n.samples = j.at("samples").get<std::size_t>();
    const auto self = static_cast<std::int32_t>(nodes.size());
    if (!n.leaf) {
        n.feature = parse_feature(j.at("feature").get<std::string>());
        n.threshold = j.at("threshold").get<double>();
    }
    nodes.push_back(n);
    if (!n.leaf) {
        const auto l = node_from(j.at("left"), nodes);
        const auto r = node_from(j.at("right"), nodes);
        nodes[static_cast<std::size_t>(self)].left = l;
        nodes[static_cast<std::size_t>(self)].right = r;
    }
    return self;
}

inline json tree_json(const DecisionTree& t) {
    return json{{"type", "tree"}, {"features", features_json(t.features())}, {"root", node_json(t, 0)}};
}

inline DecisionTree tree_from(const json& j) {
    std::vector<TreeNode> nodes;
    node_from(j.at("root"), nodes);
    return DecisionTree(features_from(j.at("features")), std::move(nodes));
}

inline json knn_json(const KnnModel& m) {
    json rows = json::array();
    const auto d = m.features().size();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < d; ++j) row.push_back(m.points()[i * d + j]);
        row.push_back(to_int(m.labels()[i]));
        rows.push_back(std::move(row));
    }
    return json{{"type", "knn"},
                {"k", m.k()},
                {"features", features_json(m.features())},
                {"normalization", norm_json(m.normalization())},
                {"rows", std::move(rows)}};
}

inline KnnModel knn_from(const json& j) {
    auto features = features_from(j.at("features"));
    const auto d = features.size();
    std::vector<double> points;
    std::vector<Label> labels;
    for (const auto& row : j.at("rows")) {
        if (row.size() != d + 1) throw ModelFormatError("knn row has wrong width");
        for (std::size_t c = 0; c < d; ++c) points.push_back(row[c].get<double>());
        labels.push_back(label_from_int(row[d].get<int>()));
    }
    try {
        return KnnModel(j.at("k").get<int>(), std::move(features), norm_from(j.at("normalization")),
                        std::move(points), std::move(labels));
    } catch (const ArgumentError& e) {
        throw ModelFormatError(e.what());
    }
}

inline json rule_json(const OneRule& r) {
    json classes = json::array();
    for (auto c : r.classes) classes.push_back(to_int(c));
    return json{{"type", "one_r"},          {"feature", std::string(name_of(r.feature))},
                {"cuts", r.cuts},           {"bucket_upper", r.bucket_upper},
                {"classes", classes},       {"accuracy", r.accuracy}};
}

inline OneRule rule_from(const json& j) {
    OneRule r;
    r.feature = parse_feature(j.at("feature").get<std::string>());
    r.cuts = j.at("cuts").get<std::vector<double>>();
    r.bucket_upper = j.at("bucket_upper").get<std::vector<double>>();
    for (const auto& c : j.at("classes")) r.classes.push_back(label_from_int(c.get<int>()));
    r.accuracy = j.at("accuracy").get<double>();
    if (r.classes.empty() || r.bucket_upper.size() + 1 != r.classes.size())
        throw ModelFormatError("one_r rule has inconsistent buckets");
    return r;
}

inline json base_json(const BaseModel& m) {
    return std::visit(
        [](const auto& b) {
            if constexpr (std::is_same_v<std::decay_t<decltype(b)>, DecisionTree>)
                return tree_json(b);
            else
                return knn_json(b);
        },
        m);
}

inline json params_json(const BaseParams& p, std::size_t n_bags) {
    return json{{"min_leaf", p.tree.min_leaf}, {"max_depth", p.tree.max_depth}, {"k", p.k}, {"n_bags", n_bags}};
}

inline BaseParams params_from(const json& j) {
    BaseParams p;
    p.tree.min_leaf = j.at("min_leaf").get<int>();
    p.tree.max_depth = j.at("max_depth").get<int>();
    p.k = j.at("k").get<int>();
    return p;
}

}  // namespace io

inline std::string serialize_model(const TrainedModel& model) {
    using io::json;
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["kind"] = std::string(model_kind_name(model.kind()));
    json members = json::array();
    json normalization = nullptr;
    std::string base = std::string(model_kind_name(model.kind()));
    std::size_t n_bags = 1;
    BaseParams params;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DecisionTree>) {
                members.push_back(io::tree_json(m));
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                normalization = io::norm_json(m.normalization());
                params.k = m.k();
                members.push_back(io::knn_json(m));
            } else if constexpr (std::is_same_v<T, BaggedEnsemble>) {
                base = std::string(base_kind_name(m.base));
                n_bags = m.n_bags();
                params = m.params;
                for (const auto& b : m.members) members.push_back(io::base_json(b));
            } else {
                normalization = io::norm_json(m.knn.normalization());
                params.k = m.knn.k();
                n_bags = 3;
                members.push_back(io::tree_json(m.tree));
                members.push_back(io::knn_json(m.knn));
                members.push_back(io::rule_json(m.rule));
            }
        },
        model.body);
    doc["base"] = base;
    doc["features"] = io::features_json(model.features);
    doc["seed"] = model.seed;
    doc["n_bags"] = n_bags;
    doc["normalization"] = std::move(normalization);
    doc["params"] = io::params_json(params, n_bags);
    doc["train_summary"] = json{{"total", model.train_summary.total},
                                {"positives", model.train_summary.positives},
                                {"negatives", model.train_summary.negatives}};
    doc["members"] = std::move(members);

    std::string out = std::string(kModelMagic) + " " + std::to_string(kModelFormatVersion) + "\n";
    out += doc.dump(1);
    out += '\n';
    out += "checksum fnv1a64 " + hex64(fnv1a64(out)) + "\n";
    return out;
}

inline TrainedModel deserialize_model(std::string_view text) {
    using io::json;
    const auto first_nl = text.find('\n');
    if (first_nl == std::string_view::npos) throw CorruptModelError("model file truncated (no header line)");
    const auto header = text.substr(0, first_nl);
    if (header.substr(0, kModelMagic.size()) != kModelMagic || header.size() <= kModelMagic.size() + 1 ||
        header[kModelMagic.size()] != ' ')
        throw CorruptModelError("not a model file (bad magic line)");
    const auto version = header.substr(kModelMagic.size() + 1);
    if (version != std::to_string(kModelFormatVersion))
        throw ModelVersionError(std::to_string(kModelFormatVersion), std::string(version));

    constexpr std::string_view kChecksumTag = "checksum fnv1a64 ";
    const auto tag = text.rfind("\nchecksum ");
    if (tag == std::string_view::npos) throw CorruptModelError("model file truncated (missing checksum line)");
    const auto body = text.substr(0, tag + 1);
    auto trailer = text.substr(tag + 1);
    while (!trailer.empty() && (trailer.back() == '\n' || trailer.back() == '\r')) trailer.remove_suffix(1);
    if (trailer.substr(0, kChecksumTag.size()) != kChecksumTag)
        throw CorruptModelError("unsupported checksum line");
    const auto stored = trailer.substr(kChecksumTag.size());
    if (stored != hex64(fnv1a64(body)))
        throw CorruptModelError("model checksum mismatch (file corrupt or truncated)");

    try {
        const auto doc = json::parse(body.substr(first_nl + 1));
        if (doc.at("format_version").get<int>() != kModelFormatVersion)
            throw ModelVersionError(std::to_string(kModelFormatVersion),
                                    std::to_string(doc.at("format_version").get<int>()));
        TrainedModel model;
        model.features = io::features_from(doc.at("features"));
        model.seed = doc.at("seed").get<std::uint64_t>();
        const auto& s = doc.at("train_summary");
        model.train_summary = {s.at("total").get<std::size_t>(), s.at("positives").get<std::size_t>(),
                               s.at("negatives").get<std::size_t>()};
        const auto kind = parse_model_kind(doc.at("kind").get<std::string>());
        const auto& members = doc.at("members");
        auto base_from = [](const json& j) -> BaseModel {
            const auto type = j.at("type").get<std::string>();
            if (type == "tree") return io::tree_from(j);
            if (type == "knn") return io::knn_from(j);
            throw ModelFormatError("unknown member type '" + type + "'");
        };
        switch (kind) {
            case ModelKind::tree: model.body = io::tree_from(members.at(0)); break;
            case ModelKind::knn: model.body = io::knn_from(members.at(0)); break;
            case ModelKind::bagging: {
                BaggedEnsemble ens;
                ens.base = parse_base_kind(doc.at("base").get<std::string>());
                ens.seed = model.seed;
                ens.features = model.features;
                ens.params = io::params_from(doc.at("params"));
                for (const auto& m : members) ens.members.push_back(base_from(m));
                if (ens.members.empty() || ens.members.size() != doc.at("n_bags").get<std::size_t>())
                    throw ModelFormatError("bag count does not match member payloads");
                model.body = std::move(ens);
                break;
            }
            case ModelKind::majority_vote:
                if (members.size() != 3) throw ModelFormatError("majority vote model needs 3 members");
                model.body = MajorityVoteModel{io::tree_from(members.at(0)), io::knn_from(members.at(1)),
                                               io::rule_from(members.at(2))};
                break;
        }
        return model;
    } catch (const json::exception& e) {
        throw CorruptModelError(std::string("model document malformed: ") + e.what());
    } catch (const ArgumentError& e) {
        throw CorruptModelError(std::string("model document malformed: ") + e.what());
    }
}

inline void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << serialize_model(model);
    if (!out) throw DataError(path + ": write failed");
}

inline TrainedModel load_model(const std::string& path) {
    return deserialize_model(read_file(path));
}

}  // namespace lexdga
