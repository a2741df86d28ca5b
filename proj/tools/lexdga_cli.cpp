// lexdga command line: extract -> rank/select -> train -> eval/predict
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexdga/lexdga.hpp"

namespace {

using namespace lexdga;
using ojson = nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Config {
    std::string input;
    std::string output;
    std::string features;  // manifest path
    std::string model;
    std::uint64_t seed = 42;
    double test_fraction = 0.3;
    std::size_t bags = 25;
    int k = 5;
    int bins = 10;
    int min_bucket = 6;
    int min_leaf = 5;
    int max_depth = -1;
    int threshold = 2;
    std::string method;  // empty = all
    std::string base = "tree";
    std::string kind = "bagging";
    bool strict = false;
    std::size_t legit = 6000;
    std::size_t dga = 4000;
    std::uint64_t synth_seed = 7;
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path + ": cannot open for writing");
    out << text;
    if (!out) throw DataError(path + ": write failed");
}

/// The effective configuration lands next to the output (or on stderr).
void echo_config(const std::string& command, const ojson& cfg, const ojson& extra = {}) {
    ojson meta;
    meta["command"] = command;
    meta["config"] = cfg;
    if (!extra.is_null()) meta["result"] = extra;
    const std::string out = cfg.value("output", std::string());
    if (out.empty() || out == "-")
        std::cerr << meta.dump() << "\n";
    else
        write_text(out + ".meta.json", meta.dump(1) + "\n");
}

FeatureMatrix load_features(const std::string& path) { return read_features_csv(read_file(path), path); }

RankOptions rank_options(const Config& c) { return {c.bins, c.min_bucket}; }

BaseParams base_params(const Config& c) {
    BaseParams p;
    p.tree.min_leaf = c.min_leaf;
    p.tree.max_depth = c.max_depth;
    p.k = c.k;
    return p;
}

FeatureSubset manifest_or_all(const Config& c) {
    if (c.features.empty()) return all_features();
    return read_manifest(read_file(c.features));
}

ojson summary_json(const CorpusSummary& s) {
    return {{"total", s.total}, {"positives", s.positives}, {"negatives", s.negatives}};
}

// ---------------------------------------------------------------------

int cmd_extract(const Config& c) {
    LoadDiagnostics diag;
    const auto corpus = load_labeled_csv_file(c.input, CsvSchema{}, c.strict ? ParseMode::strict : ParseMode::lenient,
                                              &diag);
    const auto m = featurize_corpus(corpus);
    write_text(c.output, write_features_csv(m));
    if (diag.skipped_rows) std::cerr << "skipped " << diag.skipped_rows << " malformed row(s)\n";
    echo_config("extract", {{"input", c.input}, {"output", c.output}, {"strict", c.strict}},
                {{"rows", summary_json(summarize(m))}, {"skipped", diag.skipped_rows}});
    return kOk;
}

std::vector<RankMethod> methods_of(const Config& c) {
    if (c.method.empty() || c.method == "all") return {kAllMethods.begin(), kAllMethods.end()};
    return {parse_method(c.method)};
}

int cmd_rank(const Config& c) {
    const auto m = load_features(c.input);
    std::string csv_out = "method,feature,score,rank,in_top_tier\n";
    std::ostringstream text;
    for (auto method : methods_of(c)) {
        const auto r = rank_features(m, method, rank_options(c));
        text << method_name(method) << "\n";
        for (std::size_t i = 0; i < r.order.size(); ++i) {
            const auto f = r.order[i];
            const auto score = csv::format_double(r.score(f));
            csv_out += std::string(method_name(method)) + ',' + std::string(name_of(f)) + ',' + score + ',' +
                       std::to_string(i + 1) + ',' + (r.in_top_tier(f) ? "1" : "0") + '\n';
            text << "  " << (r.in_top_tier(f) ? '*' : ' ') << ' ' << name_of(f)
                 << std::string(20 - name_of(f).size(), ' ') << csv::format_fixed(r.score(f), 4) << "\n";
        }
    }
    if (c.output.empty() || c.output == "-") {
        std::cout << text.str();
    } else {
        write_text(c.output, csv_out);
        std::cerr << text.str();
    }
    echo_config("rank", {{"input", c.input},
                         {"output", c.output},
                         {"method", c.method.empty() ? "all" : c.method},
                         {"bins", c.bins},
                         {"min_bucket", c.min_bucket}});
    return kOk;
}

int cmd_select(const Config& c) {
    const auto m = load_features(c.input);
    std::vector<FeatureRanking> rs;
    for (auto method : kAllMethods) rs.push_back(rank_features(m, method, rank_options(c)));
    const auto sel = ensemble_select(rs, c.threshold);
    write_text(c.output, write_manifest(sel.features));
    ojson votes;
    for (auto f : kAllFeatures) votes[std::string(name_of(f))] = sel.votes_for(f);
    echo_config("select",
                {{"input", c.input},
                 {"output", c.output},
                 {"threshold", c.threshold},
                 {"bins", c.bins},
                 {"min_bucket", c.min_bucket}},
                {{"features", join_names(sel.features)}, {"votes", votes}});
    return kOk;
}

ModelSpec spec_of(const Config& c) {
    ModelSpec s;
    s.kind = parse_model_kind(c.kind);
    s.base = parse_base_kind(c.base);
    s.features = manifest_or_all(c);
    s.params = base_params(c);
    s.n_bags = c.bags;
    s.rule_options = rank_options(c);
    return s;
}

ojson learner_config(const Config& c) {
    return {{"kind", c.kind},      {"base", c.base},           {"bags", c.bags},
            {"k", c.k},            {"min_leaf", c.min_leaf},   {"max_depth", c.max_depth},
            {"bins", c.bins},      {"min_bucket", c.min_bucket}, {"seed", c.seed}};
}

int cmd_train(const Config& c) {
    if (c.output.empty() || c.output == "-") throw ArgumentError("train: --output model path is required");
    const auto spec = spec_of(c);
    const auto m = load_features(c.input);
    const auto model = train_model(spec, m, c.seed);
    save_model(model, c.output);
    auto cfg = learner_config(c);
    cfg["input"] = c.input;
    cfg["output"] = c.output;
    cfg["features"] = c.features.empty() ? "(all)" : c.features;
    echo_config("train", cfg, {{"features", join_names(model.features)}, {"train", summary_json(model.train_summary)}});
    return kOk;
}

int cmd_eval(const Config& c) {
    const auto m = load_features(c.input);
    ojson cfg = {{"input", c.input}, {"output", c.output}};
    if (!c.model.empty()) {
        // score a saved model on the whole input
        const auto model = load_model(c.model);
        const auto e = evaluate(model, m);
        EvalReport report;
        report.rows.push_back({c.model, join_names(model.features), e, model.seed});
        report.corpus = report.test = summarize(m);
        report.train = model.train_summary;
        report.provenance = c.input;
        write_text(c.output, report.to_csv());
        if (!c.output.empty() && c.output != "-") std::cerr << report.to_text();
        cfg["model"] = c.model;
        echo_config("eval", cfg);
        return kOk;
    }
    const auto reduced = manifest_or_all(c);
    HoldoutProtocol protocol{c.test_fraction, c.seed};
    const auto specs = standard_specs(reduced, c.bags, base_params(c));
    std::vector<ModelSpec> tuned = specs;
    for (auto& s : tuned) s.rule_options = rank_options(c);
    const auto report = compare(tuned, m, protocol, c.input);
    write_text(c.output, report.to_csv());
    if (!c.output.empty() && c.output != "-") std::cerr << report.to_text();
    cfg.update(learner_config(c));
    cfg.erase("kind");
    cfg.erase("base");
    cfg["features"] = c.features.empty() ? "(all)" : c.features;
    cfg["test_fraction"] = c.test_fraction;
    echo_config("eval", cfg,
                {{"train", summary_json(report.train)}, {"test", summary_json(report.test)}});
    return kOk;
}

int cmd_predict(const Config& c) {
    const auto model = load_model(c.model);
    const auto text = read_file(c.input);
    std::string out = "domain,label,vote_fraction\n";
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        const auto d = detail::to_lower(detail::trim(line));
        if (d.empty()) continue;
        const auto p = predict(model, extract_features(d));
        out += csv::escape(d) + ',' + (p.label == Label::dga ? "dga" : "legit") + ',' +
               csv::format_double(p.vote_fraction) + '\n';
        ++n;
    }
    if (n == 0) throw DataError(c.input + ": no domains to classify");
    write_text(c.output, out);
    echo_config("predict", {{"input", c.input}, {"output", c.output}, {"model", c.model}},
                {{"domains", n}, {"kind", model_kind_name(model.kind())}});
    return kOk;
}

int cmd_synth(const Config& c) {
    SyntheticCorpusOptions opt;
    opt.legit = c.legit;
    opt.dga = c.dga;
    opt.seed = c.synth_seed;
    const auto corpus = make_synthetic_corpus(opt);
    std::string out = "host,domain,class\n";
    for (const auto& r : corpus.records)
        out += csv::escape(r.host) + ',' + csv::escape(r.domain) + ',' + (r.label == Label::dga ? "dga" : "legit") + '\n';
    write_text(c.output, out);
    echo_config("synth", {{"output", c.output}, {"legit", c.legit}, {"dga", c.dga}, {"seed", c.synth_seed}});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexdga: lexical DGA / typo-squatting domain detection"};
    app.require_subcommand(1);
    Config c;

    auto input = [&](CLI::App* s, const std::string& what) {
        s->add_option("-i,--input", c.input, what)->required();
    };
    auto output = [&](CLI::App* s, const std::string& what) { s->add_option("-o,--output", c.output, what); };
    auto selection_opts = [&](CLI::App* s) {
        s->add_option("--bins", c.bins, "equal-frequency bins for ratio features")->capture_default_str()
            ->check(CLI::Range(2, 1000));
        s->add_option("--min-bucket", c.min_bucket, "OneR minimum majority per bucket")->capture_default_str()
            ->check(CLI::Range(1, 1000000));
    };
    auto learner_opts = [&](CLI::App* s) {
        s->add_option("--seed", c.seed, "seed for splits and bootstrap draws")->capture_default_str();
        s->add_option("--bags", c.bags, "bagging rounds")->capture_default_str()->check(CLI::Range(1, 100000));
        s->add_option("--k", c.k, "neighbours for K-NN")->capture_default_str()->check(CLI::Range(1, 1000000));
        s->add_option("--base", c.base, "bagging base learner")->capture_default_str()
            ->check(CLI::IsMember({"tree", "knn"}));
        s->add_option("--min-leaf", c.min_leaf, "tree: minimum rows on each side of a split")->capture_default_str()
            ->check(CLI::Range(1, 1000000));
        s->add_option("--max-depth", c.max_depth, "tree: depth cap, negative for none")->capture_default_str();
        s->add_option("--features", c.features, "feature manifest (one name per line)");
        selection_opts(s);
    };

    auto* extract = app.add_subcommand("extract", "labeled domain CSV -> features CSV");
    input(extract, "CSV with domain and class columns");
    output(extract, "features CSV (default stdout)");
    extract->add_flag("--strict", c.strict, "fail on the first malformed row instead of skipping it");

    auto* rank = app.add_subcommand("rank", "rank features by correlation, information gain and OneR");
    input(rank, "features CSV");
    output(rank, "ranking CSV (text table goes to stderr)");
    rank->add_option("--method", c.method, "one method only")->check(CLI::IsMember({"all", "correlation", "info_gain", "one_r"}));
    selection_opts(rank);

    auto* select = app.add_subcommand("select", "fuse the three rankings into a feature manifest");
    input(select, "features CSV");
    output(select, "manifest path (default stdout)");
    select->add_option("--threshold", c.threshold, "votes needed (1..3)")->capture_default_str()->check(CLI::Range(1, 3));
    selection_opts(select);

    auto* train = app.add_subcommand("train", "train one model and write a model file");
    input(train, "features CSV");
    output(train, "model file");
    train->add_option("--kind", c.kind, "model kind")->capture_default_str()
        ->check(CLI::IsMember({"tree", "knn", "bagging", "majority_vote"}));
    learner_opts(train);

    auto* eval = app.add_subcommand("eval", "holdout comparison of the five standard models, or score --model");
    input(eval, "features CSV");
    output(eval, "report CSV (default stdout)");
    eval->add_option("--model", c.model, "score this saved model on the whole input instead");
    eval->add_option("--test-fraction", c.test_fraction, "holdout share")->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    learner_opts(eval);

    auto* pred = app.add_subcommand("predict", "label domains (one per line) with a saved model");
    input(pred, "domain list");
    output(pred, "CSV domain,label,vote_fraction (default stdout)");
    pred->add_option("--model", c.model, "model file")->required();

    auto* synth = app.add_subcommand("synth", "write the synthetic labeled corpus");
    output(synth, "CSV path (default stdout)");
    synth->add_option("--seed", c.synth_seed, "generator seed")->capture_default_str();
    synth->add_option("--legit", c.legit, "legitimate names")->capture_default_str();
    synth->add_option("--dga", c.dga, "generated names")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*extract) return cmd_extract(c);
        if (*rank) return cmd_rank(c);
        if (*select) return cmd_select(c);
        if (*train) return cmd_train(c);
        if (*eval) return cmd_eval(c);
        if (*pred) return cmd_predict(c);
        if (*synth) return cmd_synth(c);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
