#pragma once

#include <string>
#include <vector>

#include "stylelab/render.hpp"
#include "stylelab/styles.hpp"
#include "stylelab/tensor.hpp"
#include "stylelab/vocab.hpp"

namespace stylelab {

enum class Role { kStyleRef, kAux };
enum class ContentKind { kPerson, kBackground, kMixed };
enum class Provenance { kProcedural, kGenerated, kIngested };

std::string to_string(Role r);
std::string to_string(ContentKind k);
std::string to_string(Provenance p);
Role role_from_string(const std::string& s);
ContentKind content_from_string(const std::string& s);

struct StyleRecord {
    Tensor image;  // 3 x 32 x 32
    PromptSpec prompt;
    Role role = Role::kStyleRef;
    ContentKind content = ContentKind::kMixed;
};

// Paired (image, prompt) records for one style and role mix. Prompt/role
// consistency: styleref prompts carry an identifier token, aux prompts the
// bare "style" template.
struct StyleDataset {
    std::vector<StyleRecord> records;
    std::string style_id;
    Provenance provenance = Provenance::kProcedural;

    size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

// Throws ConfigError when a record's role and prompt template disagree.
void validate_dataset(const StyleDataset& ds);

// n_persons person scenes then n_backgrounds background scenes, styled with
// the transform, each paired with "a photo of <identifier> style".
StyleDataset build_style_corpus(const StyleTransformSpec& style, int n_persons,
                                int n_backgrounds, uint64_t seed, const Vocabulary& vocab,
                                const std::string& identifier = "[V]");

// Person-only scenes in the auxiliary style, paired with "a photo of style".
StyleDataset build_aux_corpus(const StyleTransformSpec& aux_style, int n, uint64_t seed,
                              const Vocabulary& vocab);

// Directory layout: <root>/<style_id>/<role>/<index>.ppm + manifest.tsv with
// columns (index, role, content_kind, prompt text). Returns the dataset dir.
std::string save_dataset(const StyleDataset& ds, const std::string& root);
StyleDataset load_dataset(const std::string& dataset_dir, const Vocabulary& vocab);

// Base (unstyled) corpus for pretraining: scenes paired with content
// prompts like "a photo of a woman" / "a photo of a mountain".
struct BaseExample {
    Tensor image;
    PromptSpec prompt;
    Tensor person_mask;  // 32 x 32, zero when no person
};
std::vector<BaseExample> build_base_corpus(int n_persons, int n_backgrounds, uint64_t seed,
                                           const Vocabulary& vocab);

}  // namespace stylelab
