#include "stylelab/prompts.hpp"

#include <array>
#include <stdexcept>

namespace stylelab {

namespace {

const std::array<const char*, 10> kPersonWords = {"woman",  "man",    "girl",   "boy",
                                                  "child",  "farmer", "dancer", "knight",
                                                  "wizard", "sailor"};
const std::array<const char*, 12> kBackgroundWords = {"mountain", "tree",   "house", "river",
                                                      "lake",     "hill",   "forest", "field",
                                                      "town",     "castle", "garden", "valley"};
const std::array<const char*, 8> kModifiers = {"red",  "blue", "green", "yellow",
                                               "old",  "small", "big",   "dark"};
const std::array<const char*, 3> kPreps = {"near", "by", "at"};

std::string style_prefix(PromptMode mode, PromptCategory cat) {
    if (mode == PromptMode::kSingle) return "a photo of [V] style";
    switch (cat) {
        case PromptCategory::kPerson: return "a photo of [V] style";
        case PromptCategory::kBackground: return "a photo of [W] style";
        default: return "a photo of [V] style [W] style";
    }
}

std::string content_clause(PromptCategory cat, Rng& rng) {
    switch (cat) {
        case PromptCategory::kPerson: {
            std::string p = kPersonWords[rng.uniform_int(kPersonWords.size())];
            if (rng.uniform() < 0.5) {
                return "a " + std::string(kModifiers[rng.uniform_int(kModifiers.size())]) + " " + p;
            }
            return "a " + p;
        }
        case PromptCategory::kBackground: {
            std::string b = kBackgroundWords[rng.uniform_int(kBackgroundWords.size())];
            if (rng.uniform() < 0.4) {
                std::string b2 = kBackgroundWords[rng.uniform_int(kBackgroundWords.size())];
                std::string prep = kPreps[rng.uniform_int(kPreps.size())];
                return "a " + b + " " + prep + " a " + b2;
            }
            if (rng.uniform() < 0.5) {
                return "a " + std::string(kModifiers[rng.uniform_int(kModifiers.size())]) + " " + b;
            }
            return "a " + b;
        }
        default: {
            std::string p = kPersonWords[rng.uniform_int(kPersonWords.size())];
            std::string b = kBackgroundWords[rng.uniform_int(kBackgroundWords.size())];
            std::string prep = kPreps[rng.uniform_int(kPreps.size())];
            return "a " + p + " " + prep + " a " + b;
        }
    }
}

}  // namespace

void eval_prompt_counts(int n, int* persons, int* backgrounds, int* combined) {
    // 40/40/20 by largest remainder, leftovers to person then background
    int np = (n * 2) / 5, nb = (n * 2) / 5, nc = n / 5;
    int rem = n - np - nb - nc;
    if (rem > 0) {
        ++np;
        --rem;
    }
    if (rem > 0) {
        ++nb;
        --rem;
    }
    if (rem > 0) nc += rem;
    *persons = np;
    *backgrounds = nb;
    *combined = nc;
}

std::vector<EvalPrompt> eval_prompt_set(int n, uint64_t seed, const Vocabulary& vocab,
                                        PromptMode mode) {
    if (n < 1) throw std::invalid_argument("eval_prompt_set: n must be >= 1");
    int np = 0, nb = 0, nc = 0;
    eval_prompt_counts(n, &np, &nb, &nc);
    Rng rng(seed);
    std::vector<EvalPrompt> out;
    out.reserve(static_cast<size_t>(n));
    auto emit = [&](PromptCategory cat, int count) {
        for (int i = 0; i < count; ++i) {
            EvalPrompt ep;
            ep.category = cat;
            ep.content_text = content_clause(cat, rng);
            ep.prompt = tokenize(vocab, style_prefix(mode, cat) + " " + ep.content_text);
            out.push_back(std::move(ep));
        }
    };
    emit(PromptCategory::kPerson, np);
    emit(PromptCategory::kBackground, nb);
    emit(PromptCategory::kCombined, nc);
    return out;
}

}  // namespace stylelab
