#pragma once

#include <string>
#include <vector>

#include "stylelab/rng.hpp"
#include "stylelab/vocab.hpp"

namespace stylelab {

enum class PromptCategory { kPerson, kBackground, kCombined };

// Identifier policy when materializing evaluation prompts: single-token runs
// always use [V]; multi-token runs use [V] for persons, [W] for backgrounds,
// and both for combined prompts.
enum class PromptMode { kSingle, kMulti };

struct EvalPrompt {
    PromptSpec prompt;
    PromptCategory category = PromptCategory::kPerson;
    std::string content_text;  // the clause after the style prefix
};

// Grammar-generated prompts over the closed vocabulary, stratified
// person/background/combined at 40/40/20 (largest-remainder rounding).
std::vector<EvalPrompt> eval_prompt_set(int n, uint64_t seed, const Vocabulary& vocab,
                                        PromptMode mode = PromptMode::kSingle);

// Exact category counts used for a set of size n.
void eval_prompt_counts(int n, int* persons, int* backgrounds, int* combined);

}  // namespace stylelab
