#include "stylelab/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stylelab/errors.hpp"
#include "stylelab/ppm.hpp"

namespace fs = std::filesystem;

namespace stylelab {

std::string to_string(Role r) { return r == Role::kStyleRef ? "styleref" : "aux"; }

std::string to_string(ContentKind k) {
    switch (k) {
        case ContentKind::kPerson: return "person";
        case ContentKind::kBackground: return "background";
        default: return "mixed";
    }
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::kProcedural: return "procedural";
        case Provenance::kGenerated: return "generated";
        default: return "ingested";
    }
}

Role role_from_string(const std::string& s) {
    if (s == "styleref") return Role::kStyleRef;
    if (s == "aux") return Role::kAux;
    throw FormatError("unknown role '" + s + "'");
}

ContentKind content_from_string(const std::string& s) {
    if (s == "person") return ContentKind::kPerson;
    if (s == "background") return ContentKind::kBackground;
    if (s == "mixed") return ContentKind::kMixed;
    throw FormatError("unknown content kind '" + s + "'");
}

void validate_dataset(const StyleDataset& ds) {
    for (size_t i = 0; i < ds.records.size(); ++i) {
        const StyleRecord& r = ds.records[i];
        const bool has_ident = !r.prompt.identifier_tokens.empty();
        if (r.role == Role::kStyleRef && !has_ident) {
            throw ConfigError("record " + std::to_string(i) +
                              ": styleref prompt lacks an identifier token: '" + r.prompt.text +
                              "'");
        }
        if (r.role == Role::kAux && has_ident) {
            throw ConfigError("record " + std::to_string(i) +
                              ": aux prompt must use the bare style template: '" + r.prompt.text +
                              "'");
        }
        if (r.image.rank() != 3 || r.image.dim(0) != 3) {
            throw ConfigError("record " + std::to_string(i) + ": bad image shape " +
                              r.image.shape_str());
        }
    }
}

StyleDataset build_style_corpus(const StyleTransformSpec& style, int n_persons,
                                int n_backgrounds, uint64_t seed, const Vocabulary& vocab,
                                const std::string& identifier) {
    if (n_persons < 0 || n_backgrounds < 0 || n_persons + n_backgrounds < 1) {
        throw std::invalid_argument("build_style_corpus: need at least one scene");
    }
    if (identifier != "[V]" && identifier != "[W]") {
        throw std::invalid_argument("build_style_corpus: identifier must be [V] or [W]");
    }
    StyleDataset ds;
    ds.style_id = style.name;
    ds.provenance = Provenance::kProcedural;
    const PromptSpec prompt = tokenize(vocab, "a photo of " + identifier + " style");
    Rng rng(seed);
    for (int i = 0; i < n_persons; ++i) {
        Scene sc = render_person_scene(rng);
        StyleRecord r;
        r.image = apply_style(style, sc.image);
        r.prompt = prompt;
        r.role = Role::kStyleRef;
        r.content = ContentKind::kPerson;
        ds.records.push_back(std::move(r));
    }
    for (int i = 0; i < n_backgrounds; ++i) {
        Scene sc = render_background_scene(rng);
        StyleRecord r;
        r.image = apply_style(style, sc.image);
        r.prompt = prompt;
        r.role = Role::kStyleRef;
        r.content = ContentKind::kBackground;
        ds.records.push_back(std::move(r));
    }
    return ds;
}

StyleDataset build_aux_corpus(const StyleTransformSpec& aux_style, int n, uint64_t seed,
                              const Vocabulary& vocab) {
    if (n < 1) throw std::invalid_argument("build_aux_corpus: n must be >= 1");
    StyleDataset ds;
    ds.style_id = aux_style.name;
    ds.provenance = Provenance::kProcedural;
    const PromptSpec prompt = tokenize(vocab, kAuxTemplate);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        Scene sc = render_person_scene(rng);
        StyleRecord r;
        r.image = apply_style(aux_style, sc.image);
        r.prompt = prompt;
        r.role = Role::kAux;
        r.content = ContentKind::kPerson;
        ds.records.push_back(std::move(r));
    }
    return ds;
}

std::string save_dataset(const StyleDataset& ds, const std::string& root) {
    validate_dataset(ds);
    const fs::path dir = fs::path(root) / ds.style_id;
    fs::create_directories(dir);
    std::ofstream manifest(dir / "manifest.tsv", std::ios::trunc);
    if (!manifest) throw FormatError("cannot write manifest under '" + dir.string() + "'");
    for (size_t i = 0; i < ds.records.size(); ++i) {
        const StyleRecord& r = ds.records[i];
        const fs::path role_dir = dir / to_string(r.role);
        fs::create_directories(role_dir);
        const fs::path file = role_dir / (std::to_string(i) + ".ppm");
        write_ppm(r.image, file.string());
        manifest << i << '\t' << to_string(r.role) << '\t' << to_string(r.content) << '\t'
                 << r.prompt.text << '\n';
    }
    return dir.string();
}

StyleDataset load_dataset(const std::string& dataset_dir, const Vocabulary& vocab) {
    const fs::path dir(dataset_dir);
    const fs::path manifest_path = dir / "manifest.tsv";
    std::ifstream manifest(manifest_path);
    if (!manifest) throw FormatError("missing manifest: '" + manifest_path.string() + "'");
    StyleDataset ds;
    ds.style_id = dir.filename().string();
    ds.provenance = Provenance::kIngested;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string index, role_s, content_s, prompt_text;
        if (!std::getline(ss, index, '\t') || !std::getline(ss, role_s, '\t') ||
            !std::getline(ss, content_s, '\t') || !std::getline(ss, prompt_text)) {
            throw FormatError("malformed manifest line: '" + line + "'");
        }
        StyleRecord r;
        r.role = role_from_string(role_s);
        r.content = content_from_string(content_s);
        r.prompt = tokenize(vocab, prompt_text);
        const fs::path file = dir / role_s / (index + ".ppm");
        r.image = read_ppm(file.string());
        ds.records.push_back(std::move(r));
    }
    validate_dataset(ds);
    return ds;
}

std::vector<BaseExample> build_base_corpus(int n_persons, int n_backgrounds, uint64_t seed,
                                           const Vocabulary& vocab) {
    std::vector<BaseExample> out;
    Rng rng(seed);
    for (int i = 0; i < n_persons; ++i) {
        Scene sc = render_person_scene(rng);
        BaseExample ex;
        // alternate between plain and color-qualified person prompts
        if (i % 2 == 0) {
            ex.prompt = tokenize(vocab, "a photo of a " + sc.person_word);
        } else {
            ex.prompt = tokenize(vocab, "a photo of a " + sc.person_word + " in " + sc.color_word);
        }
        ex.image = std::move(sc.image);
        ex.person_mask = std::move(sc.person_mask);
        out.push_back(std::move(ex));
    }
    for (int i = 0; i < n_backgrounds; ++i) {
        Scene sc = render_background_scene(rng);
        BaseExample ex;
        ex.prompt = tokenize(vocab, "a photo of a " + sc.background_word);
        ex.image = std::move(sc.image);
        ex.person_mask = std::move(sc.person_mask);
        out.push_back(std::move(ex));
    }
    return out;
}

}  // namespace stylelab
