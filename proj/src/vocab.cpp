#include "stylelab/vocab.hpp"

#include <algorithm>
#include <cctype>

#include "stylelab/errors.hpp"

namespace stylelab {

namespace {

// ~64 words: null + identifiers + template + prompt-grammar content.
const char* kDefaultWords[] = {
    "<null>", "[V]", "[W]",
    "a", "photo", "of", "style", "the", "and", "with",
    "near", "by", "under", "on", "in", "at",
    // persons
    "woman", "man", "girl", "boy", "child", "farmer", "dancer", "knight",
    "wizard", "sailor",
    // backgrounds
    "mountain", "tree", "house", "river", "sun", "moon", "lake", "hill",
    "forest", "field", "sky", "cloud", "town", "bridge", "castle", "garden",
    "road", "star", "flower", "boat", "valley", "island",
    // modifiers
    "red", "blue", "green", "yellow", "purple", "white", "dark", "bright",
    "old", "young", "small", "big", "tall", "little", "quiet", "distant",
};

}  // namespace

Vocabulary::Vocabulary() {
    for (const char* w : kDefaultWords) words_.emplace_back(w);
}

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {}

int Vocabulary::lookup(const std::string& w) const {
    for (size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] == w) return static_cast<int>(i);
    }
    return -1;
}

int Vocabulary::require(const std::string& w) const {
    int id = lookup(w);
    if (id < 0) throw VocabError(w);
    return id;
}

PromptSpec tokenize(const Vocabulary& vocab, const std::string& text) {
    PromptSpec spec;
    std::vector<std::string> parts;
    std::string cur;
    for (char raw : text) {
        const char ch = (raw == ',') ? ' ' : raw;
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                parts.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) parts.push_back(cur);

    for (std::string& w : parts) {
        // identifiers keep canonical spelling; everything else lowercases
        std::string canon = w;
        std::transform(canon.begin(), canon.end(), canon.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (canon == "[v]") canon = "[V]";
        if (canon == "[w]") canon = "[W]";
        const int id = vocab.require(canon);
        if (canon == "[V]" || canon == "[W]") {
            if (spec.identifier_tokens.count(canon)) {
                throw ConfigError("identifier token " + canon + " appears more than once");
            }
            spec.identifier_tokens.insert(canon);
        }
        spec.tokens.push_back(id);
        if (!spec.text.empty()) spec.text += ' ';
        spec.text += canon;
    }
    return spec;
}

std::string detokenize(const Vocabulary& vocab, const std::vector<int>& tokens) {
    std::string out;
    for (int id : tokens) {
        if (!out.empty()) out += ' ';
        out += vocab.word(id);
    }
    return out;
}

}  // namespace stylelab
