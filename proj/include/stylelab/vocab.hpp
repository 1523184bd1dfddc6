#pragma once

#include <set>
#include <string>
#include <vector>

namespace stylelab {

// Closed vocabulary: the identifier tokens, the template words, and the
// content words the procedural prompt grammar draws from. Token 0 is the
// reserved null token used as the empty-prompt encoding for guidance.
class Vocabulary {
 public:
    Vocabulary();                                      // built-in word list
    explicit Vocabulary(std::vector<std::string> words);

    int size() const { return static_cast<int>(words_.size()); }
    const std::string& word(int id) const { return words_[static_cast<size_t>(id)]; }
    const std::vector<std::string>& words() const { return words_; }
    // -1 when absent
    int lookup(const std::string& w) const;
    int require(const std::string& w) const;  // throws VocabError

    int null_id() const { return 0; }

    bool operator==(const Vocabulary& o) const { return words_ == o.words_; }

 private:
    std::vector<std::string> words_;
};

// Tokenized prompt. text is the normalized form (lowercased, comma treated
// as whitespace, single-spaced); identifiers keep their canonical [V] / [W]
// spelling.
struct PromptSpec {
    std::string text;
    std::vector<int> tokens;
    std::set<std::string> identifier_tokens;  // subset of {"[V]", "[W]"}

    bool empty() const { return tokens.empty(); }
};

// Lowercases, splits on whitespace/commas, maps words to ids. Throws
// VocabError naming the first unknown word. "" yields the empty prompt.
PromptSpec tokenize(const Vocabulary& vocab, const std::string& text);
std::string detokenize(const Vocabulary& vocab, const std::vector<int>& tokens);

inline constexpr const char* kStylerefTemplateV = "a photo of [V] style";
inline constexpr const char* kStylerefTemplateW = "a photo of [W] style";
inline constexpr const char* kAuxTemplate = "a photo of style";

}  // namespace stylelab
