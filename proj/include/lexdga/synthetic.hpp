#pragma once

// Deterministic stand-in corpus for when the real labeled list is not at
// hand: legit names are concatenated dictionary words (usually with a numeric
// token), DGA names are uniform random strings over [a-z0-9].

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>

#include "lexdga/corpus.hpp"
#include "lexdga/random.hpp"

namespace lexdga {

inline constexpr std::array<std::string_view, 325> kDictionaryWords = {
    "about", "account", "action", "active", "actor", "admin", "advice", "agent", "air", "alpha", "amazing",
    "angel", "animal", "answer", "apple", "arena", "art", "asia", "atlas", "audio", "auto", "baby", "back",
    "bad", "bank", "bar", "base", "bay", "beach", "bear", "beauty", "bell", "best", "big", "bike", "bird",
    "black", "blog", "blue", "board", "boat", "body", "book", "box", "brain", "brand", "bridge", "bright",
    "buy", "cafe", "call", "camp", "car", "card", "care", "cash", "cast", "cat", "center", "chat", "cheap",
    "city", "class", "clean", "click", "cloud", "club", "coast", "code", "coffee", "color", "cook", "cool",
    "core", "craft", "credit", "crown", "cup", "daily", "dance", "data", "date", "day", "deal", "deep",
    "design", "dev", "digital", "direct", "doctor", "dog", "door", "dream", "drive", "earth", "easy", "eco",
    "edge", "energy", "event", "expert", "express", "eye", "face", "fair", "family", "fan", "farm", "fashion",
    "fast", "file", "film", "find", "fire", "first", "fish", "fit", "flash", "flower", "fly", "food", "forum",
    "free", "fresh", "friend", "fun", "future", "game", "garden", "gear", "gift", "girl", "global", "go",
    "gold", "good", "green", "group", "guide", "hair", "hand", "happy", "health", "heart", "help", "hero",
    "high", "hill", "home", "hope", "host", "hot", "house", "hub", "idea", "image", "info", "inside", "island",
    "job", "joy", "just", "key", "kid", "king", "kitchen", "lab", "lady", "land", "law", "learn", "life",
    "light", "line", "link", "list", "live", "local", "love", "lucky", "mail", "main", "make", "mall", "man",
    "map", "market", "master", "media", "meet", "metro", "mind", "mobile", "money", "moon", "more", "motor",
    "mountain", "movie", "music", "my", "nation", "native", "net", "new", "news", "next", "nice", "night",
    "north", "ocean", "office", "one", "online", "open", "order", "page", "paint", "paper", "park", "party",
    "pay", "people", "pet", "phone", "photo", "pixel", "planet", "play", "plus", "point", "power", "press",
    "prime", "pro", "quick", "radio", "rain", "real", "red", "rent", "review", "rich", "river", "road", "rock",
    "room", "royal", "run", "safe", "sale", "school", "sea", "secure", "sell", "shop", "show", "silver",
    "simple", "site", "sky", "smart", "social", "soft", "solar", "sound", "space", "sport", "star", "start",
    "station", "store", "story", "street", "studio", "style", "sun", "super", "team", "tech", "test", "the",
    "time", "today", "top", "tour", "town", "toy", "trade", "travel", "tree", "trip", "true", "truck",
    "trust", "tube", "union", "united", "urban", "user", "valley", "video", "view", "village", "vision",
    "voice", "wall", "watch", "water", "wave", "way", "web", "well", "west", "white", "wild", "win", "wind",
    "wise", "world", "yes", "you", "young", "zone", "zoo",
};

struct SyntheticCorpusOptions {
    std::size_t legit = 6000;
    std::size_t dga = 4000;
    std::uint64_t seed = 7;
    int max_words = 2;  ///< legit names join 1..max_words words
    /// Chance that a legit name carries a numeric token (1..legit_max_digits
    /// digits). Without it digit density alone would separate the classes.
    double legit_digit_probability = 0.9;
    int legit_max_digits = 6;
    int dga_min_length = 12;
    int dga_max_length = 24;
};

/// Unique domains, legit first then DGA, each list in generation order.
inline DomainCorpus make_synthetic_corpus(const SyntheticCorpusOptions& opt = {}) {
    constexpr std::string_view alnum = "abcdefghijklmnopqrstuvwxyz0123456789";
    SplitMix64 rng(opt.seed);
    DomainCorpus corpus;
    corpus.provenance = "synthetic(seed=" + std::to_string(opt.seed) + ")";
    std::unordered_set<std::string> seen;

    while (corpus.records.size() < opt.legit) {
        std::string name;
        const auto words = 1 + rng.below(static_cast<std::uint64_t>(opt.max_words));
        for (std::uint64_t w = 0; w < words; ++w) name += kDictionaryWords[rng.below(kDictionaryWords.size())];
        if (rng.uniform() < opt.legit_digit_probability) {
            const auto digits = 1 + rng.below(static_cast<std::uint64_t>(opt.legit_max_digits));
            for (std::uint64_t d = 0; d < digits; ++d) name += static_cast<char>('0' + rng.below(10));
        }
        if (seen.insert(name).second) corpus.records.push_back({"www." + name + ".com", name, Label::legit});
    }
    while (corpus.records.size() < opt.legit + opt.dga) {
        const auto span = static_cast<std::uint64_t>(opt.dga_max_length - opt.dga_min_length + 1);
        const auto len = static_cast<std::size_t>(opt.dga_min_length) + rng.below(span);
        std::string name(len, 'a');
        for (auto& c : name) c = alnum[rng.below(alnum.size())];
        if (seen.insert(name).second) corpus.records.push_back({name + ".net", name, Label::dga});
    }
    return corpus;
}

}  // namespace lexdga
