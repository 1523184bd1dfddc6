#include "stylelab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "stylelab/checkpoint.hpp"
#include "stylelab/config.hpp"
#include "stylelab/dataset.hpp"
#include "stylelab/errors.hpp"
#include "stylelab/eval.hpp"
#include "stylelab/metrics.hpp"
#include "stylelab/ppm.hpp"
#include "stylelab/train.hpp"

namespace fs = std::filesystem;

namespace stylelab {

namespace {

// Completed run directories carry a DONE sentinel and refuse rewrites.
void prepare_run_dir(const fs::path& dir, bool force) {
    if (fs::exists(dir / "DONE") && !force) {
        throw ConfigError("run directory '" + dir.string() +
                          "' is complete (DONE present); pass --force to overwrite");
    }
    fs::create_directories(dir);
    fs::remove(dir / "DONE");
}

void finish_run_dir(const fs::path& dir) {
    std::ofstream os(dir / "DONE", std::ios::trunc);
    os << "done\n";
}

void check_file_out(const fs::path& path, bool force) {
    if (fs::exists(path) && !force) {
        throw ConfigError("output '" + path.string() + "' exists; pass --force to overwrite");
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::string zero_pad(int v, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*d", width, v);
    return buf;
}

StyleDataset load_dataset_checked(const std::string& dir, const Vocabulary& vocab,
                                  const std::string& what) {
    if (!fs::exists(fs::path(dir) / "manifest.tsv")) {
        throw ConfigError(what + ": '" + dir + "' is not a dataset directory (no manifest.tsv)");
    }
    return load_dataset(dir, vocab);
}

struct LoadedImages {
    std::vector<Tensor> images;
    std::vector<std::string> prompt_texts;  // empty when unknown
    std::string id;
};

// Accepts a dataset directory (manifest.tsv), a sample directory
// (prompts.tsv), or a bare directory of .ppm files.
LoadedImages load_images_any(const std::string& dir, const Vocabulary& vocab) {
    LoadedImages out;
    out.id = fs::path(dir).filename().string();
    if (fs::exists(fs::path(dir) / "manifest.tsv")) {
        StyleDataset ds = load_dataset(dir, vocab);
        for (StyleRecord& r : ds.records) {
            out.images.push_back(std::move(r.image));
            out.prompt_texts.push_back(r.prompt.text);
        }
        return out;
    }
    if (fs::exists(fs::path(dir) / "prompts.tsv")) {
        std::ifstream in(fs::path(dir) / "prompts.tsv");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const size_t tab = line.find('\t');
            if (tab == std::string::npos) throw FormatError("malformed prompts.tsv line: " + line);
            const std::string index = line.substr(0, tab);
            out.images.push_back(read_ppm((fs::path(dir) / (index + ".ppm")).string()));
            out.prompt_texts.push_back(line.substr(tab + 1));
        }
        return out;
    }
    std::vector<fs::path> files;
    if (fs::exists(dir)) {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.path().extension() == ".ppm") files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no images found under '" + dir + "'");
    for (const fs::path& f : files) out.images.push_back(read_ppm(f.string()));
    return out;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

}  // namespace

int cmd_gen_corpus(const GenCorpusArgs& a) {
    if (a.out.empty()) throw ConfigError("gen-corpus: --out is required");
    const Vocabulary vocab;
    StyleTransformSpec style = make_style(a.style);
    StyleDataset ds;
    if (a.role == "styleref") {
        ds = build_style_corpus(style, a.persons, a.backgrounds, a.seed, vocab, a.identifier);
    } else if (a.role == "aux") {
        if (a.backgrounds != 0) {
            throw ConfigError("gen-corpus: aux corpora are person-only (--backgrounds 0)");
        }
        ds = build_aux_corpus(style, a.persons, a.seed, vocab);
    } else {
        throw ConfigError("gen-corpus: --role must be styleref or aux");
    }
    const fs::path dataset_dir = fs::path(a.out) / ds.style_id;
    prepare_run_dir(dataset_dir, a.force);
    save_dataset(ds, a.out);
    finish_run_dir(dataset_dir);
    std::cout << "wrote " << ds.size() << " records to " << dataset_dir.string() << "\n";
    return kExitOk;
}

int cmd_pretrain(const PretrainArgs& a) {
    if (a.out.empty()) throw ConfigError("pretrain: --out is required");
    check_file_out(a.out, a.force);
    PretrainConfig cfg;
    cfg.n_person_scenes = a.persons;
    cfg.n_background_scenes = a.backgrounds;
    cfg.ae_steps = a.ae_steps;
    cfg.ldm_steps = a.ldm_steps;
    cfg.seed = a.seed;
    TrainableWeights w = pretrain_base_model(cfg);
    save_checkpoint(w, a.out);
    std::cout << "wrote base checkpoint " << a.out << "\n";
    if (!a.tower_out.empty()) {
        check_file_out(a.tower_out, a.force);
        std::vector<BaseExample> corpus = build_base_corpus(
            cfg.n_person_scenes, cfg.n_background_scenes, cfg.seed ^ 0xba5eULL, w.vocab);
        AlignmentTower tower = AlignmentTower::train(corpus, cfg.seed ^ 0x70e3ULL, a.tower_steps);
        tower.save(a.tower_out);
        std::cout << "wrote alignment tower " << a.tower_out << "\n";
    }
    return kExitOk;
}

int cmd_train(const TrainArgs& a) {
    if (a.init.empty()) throw ConfigError("train: --init checkpoint is required");
    if (a.out.empty()) throw ConfigError("train: --out is required");
    const TrainMode mode = train_mode_from_string(a.mode);
    TrainableWeights init = load_checkpoint(a.init);

    TrainConfig cfg;
    cfg.mode = mode;
    cfg.lambda = a.lambda;
    cfg.steps = a.steps >= 0 ? a.steps : (mode == TrainMode::kMulti ? 1000 : 500);
    cfg.learning_rate = a.lr;
    cfg.seed = a.seed;
    cfg.batch_size = a.batch;
    cfg.checkpoint_every = a.ckpt_every;
    cfg.validate();

    const fs::path out(a.out);
    prepare_run_dir(out, a.force);
    CheckpointSink sink = [&out](int step, const TrainableWeights& w) {
        save_checkpoint(w, (out / ("ckpt_" + zero_pad(step, 6) + ".sfck")).string());
    };

    TrainResult res;
    if (mode == TrainMode::kSingle) {
        if (a.styleref.empty() || a.aux.empty()) {
            throw ConfigError("train --mode single needs --styleref and --aux");
        }
        StyleDataset sr = load_dataset_checked(a.styleref, init.vocab, "styleref");
        StyleDataset aux = load_dataset_checked(a.aux, init.vocab, "aux");
        res = train_single(cfg, sr, aux, init, sink);
    } else if (mode == TrainMode::kDreamBooth) {
        if (a.styleref.empty()) throw ConfigError("train --mode dreambooth needs --styleref");
        StyleDataset sr = load_dataset_checked(a.styleref, init.vocab, "styleref");
        res = train_dreambooth(cfg, sr, init, sink);
    } else {
        if (a.styleref.empty() || a.styleref2.empty() || a.aux.empty()) {
            throw ConfigError("train --mode multi needs --styleref, --styleref2 and --aux");
        }
        MultiTrainConfig mcfg;
        mcfg.base = cfg;
        mcfg.datasets.push_back(load_dataset_checked(a.styleref, init.vocab, "D1"));
        mcfg.datasets.push_back(load_dataset_checked(a.styleref2, init.vocab, "D2"));
        StyleDataset aux = load_dataset_checked(a.aux, init.vocab, "aux");
        char qbuf[64];
        std::snprintf(qbuf, sizeof(qbuf), "q = %.17g\n", mcfg.q());
        std::cout << qbuf;
        res = train_multi(mcfg, aux, init, sink);
    }
    write_trace_csv(res.trace, (out / "trace.csv").string());
    if (!res.selection_log.empty()) {
        std::ofstream sel(out / "selections.csv", std::ios::trunc);
        sel << "step,selected_dataset\n";
        for (size_t i = 0; i < res.selection_log.size(); ++i) {
            sel << (i + 1) << "," << res.selection_log[i] << "\n";
        }
    }
    finish_run_dir(out);
    std::cout << "trained " << cfg.steps << " steps -> " << out.string() << "\n";
    return kExitOk;
}

int cmd_sample(const SampleArgs& a) {
    if (a.ckpt.empty() || a.out.empty()) throw ConfigError("sample: --ckpt and --out required");
    if (a.n < 1) throw ConfigError("sample: --n must be >= 1");
    TrainableWeights w = load_checkpoint(a.ckpt);
    PromptSpec prompt = tokenize(w.vocab, a.prompt);
    const fs::path out(a.out);
    prepare_run_dir(out, a.force);
    std::ofstream prompts(out / "prompts.tsv", std::ios::trunc);
    for (int i = 0; i < a.n; ++i) {
        SampleOptions so;
        so.steps = a.steps;
        so.guidance_scale = a.cfg;
        so.seed = a.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(i + 1));
        Tensor img = sample_image(w, prompt, so);
        const std::string name = zero_pad(i, 4);
        write_ppm(img, (out / (name + ".ppm")).string());
        prompts << name << '\t' << prompt.text << '\n';
    }
    prompts.close();
    finish_run_dir(out);
    std::cout << "sampled " << a.n << " images -> " << out.string() << "\n";
    return kExitOk;
}

int cmd_stylize(const StylizeArgs& a) {
    if (a.ckpt.empty() || a.input.empty() || a.out.empty()) {
        throw ConfigError("stylize: --ckpt, --in and --out are required");
    }
    TrainableWeights w = load_checkpoint(a.ckpt);
    Tensor input = read_ppm(a.input);
    PromptSpec prompt = tokenize(w.vocab, a.prompt);
    Tensor out = stylize(w, input, prompt, a.t0, a.seed, a.steps, a.cfg);
    if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
    write_ppm(out, a.out);
    std::cout << "stylized -> " << a.out << "\n";
    return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a) {
    if (a.generated.empty() || a.reference.empty() || a.out.empty()) {
        throw ConfigError("evaluate: --generated, --reference and --out are required");
    }
    const Vocabulary vocab;
    LoadedImages gen = load_images_any(a.generated, vocab);
    LoadedImages ref = load_images_any(a.reference, vocab);
    if (gen.images.size() < 2 || ref.images.size() < 2) {
        throw ConfigError("evaluate: need at least 2 images per side");
    }
    FeatureExtractor extractor(a.feature_seed);
    const Tensor fg = extractor.features_matrix(gen.images);
    const Tensor fr = extractor.features_matrix(ref.images);
    MetricReport rep;
    rep.fid = fid(fg, fr);
    rep.kid = kid(fg, fr);
    rep.n_generated = static_cast<int>(gen.images.size());
    rep.n_reference = static_cast<int>(ref.images.size());
    rep.style_id = ref.id;
    rep.checkpoint_id = a.checkpoint_id;
    rep.prompt_set_id = "";
    if (!a.tower.empty() && !gen.prompt_texts.empty()) {
        AlignmentTower tower = AlignmentTower::load(a.tower);
        std::vector<PromptSpec> prompts;
        for (const std::string& p : gen.prompt_texts) prompts.push_back(tokenize(vocab, p));
        rep.clip_score = clip_score(gen.images, prompts, tower);
    }
    write_metrics_csv({rep}, a.out);
    std::cout << "wrote metrics -> " << a.out << "\n";
    return kExitOk;
}

int cmd_sweep(const SweepArgs& a) {
    if (a.run_dir.empty() || a.reference.empty() || a.out.empty() || a.tower.empty()) {
        throw ConfigError("sweep: --run, --reference, --tower and --out are required");
    }
    std::vector<SweepEntry> entries;
    for (const auto& e : fs::directory_iterator(a.run_dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("ckpt_", 0) == 0 && e.path().extension() == ".sfck") {
            SweepEntry se;
            se.checkpoint_path = e.path().string();
            se.step = std::stoi(name.substr(5, name.size() - 5 - 5));
            entries.push_back(std::move(se));
        }
    }
    if (entries.empty()) {
        throw FormatError("sweep: no ckpt_*.sfck checkpoints under '" + a.run_dir + "'");
    }
    std::sort(entries.begin(), entries.end(),
              [](const SweepEntry& x, const SweepEntry& y) { return x.step < y.step; });

    TrainableWeights first = load_checkpoint(entries.front().checkpoint_path);
    StyleDataset reference = load_dataset_checked(a.reference, first.vocab, "reference");
    const PromptMode mode =
        a.prompt_mode == "multi" ? PromptMode::kMulti : PromptMode::kSingle;
    std::vector<EvalPrompt> prompts =
        eval_prompt_set(a.prompts, a.prompt_seed, first.vocab, mode);
    AlignmentTower tower = AlignmentTower::load(a.tower);
    FeatureExtractor extractor(a.feature_seed);
    SweepOptions opt;
    opt.images_per_prompt = a.images_per_prompt;
    opt.sample_steps = a.steps;
    opt.guidance_scale = a.cfg;
    opt.seed = a.seed;
    std::vector<MetricReport> reports = sweep(entries, prompts, reference, tower, extractor, opt);
    for (size_t i = 0; i < reports.size(); ++i) {
        reports[i].checkpoint_id = fs::path(entries[i].checkpoint_path).filename().string();
        reports[i].prompt_set_id = "n" + std::to_string(a.prompts) + "_s" +
                                   std::to_string(a.prompt_seed) + "_" + a.prompt_mode;
    }
    write_metrics_csv(reports, a.out);
    std::cout << "wrote " << reports.size() << " metric rows -> " << a.out << "\n";
    return kExitOk;
}

int cmd_inspect_attn(const InspectAttnArgs& a) {
    if (a.ckpt.empty() || a.out.empty()) {
        throw ConfigError("inspect-attn: --ckpt and --out are required");
    }
    TrainableWeights w = load_checkpoint(a.ckpt);
    PromptSpec prompt = tokenize(w.vocab, a.prompt);
    Rng rng(a.scene_seed);
    Scene scene = render_person_scene(rng);
    Tensor image = scene.image;
    if (!a.style.empty()) image = apply_style(make_style(a.style), image);

    std::vector<int> timesteps;
    std::string cur;
    for (char c : a.timesteps + ",") {
        if (c == ',') {
            if (!cur.empty()) timesteps.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    AttentionReport rep = attention_report(w, prompt, image, scene.person_mask, timesteps,
                                           a.seed);
    const fs::path out(a.out);
    prepare_run_dir(out, a.force);
    write_ppm(image, (out / "scene.ppm").string());
    std::ofstream tsv(out / "fractions.tsv", std::ios::trunc);
    tsv << "timestep\ttoken\tperson_fraction\tuniform_baseline\n";
    char buf[160];
    for (size_t ti = 0; ti < rep.per_timestep.size(); ++ti) {
        const int t = rep.timesteps[ti];
        // shared normalization across tokens keeps heatmaps comparable
        double peak = 0.0;
        for (const TokenAttention& ta : rep.per_timestep[ti]) {
            for (double v : ta.map.per_token.data) peak = std::max(peak, v);
        }
        for (size_t k = 0; k < rep.per_timestep[ti].size(); ++k) {
            const TokenAttention& ta = rep.per_timestep[ti][k];
            Tensor hm({ModelDims::kLatentHW, ModelDims::kLatentHW});
            for (int y = 0; y < hm.dim(0); ++y)
                for (int x = 0; x < hm.dim(1); ++x)
                    hm.at(y, x) = peak > 0.0 ? ta.map.per_token.at(0, y, x) / peak : 0.0;
            write_pgm(hm, (out / ("t" + std::to_string(t) + "_tok" + std::to_string(k) + "_" +
                                  sanitize(ta.token) + ".pgm"))
                              .string());
            std::snprintf(buf, sizeof(buf), "%d\t%s\t%.9g\t%.9g\n", t, ta.token.c_str(),
                          ta.person_fraction, rep.uniform_baseline);
            tsv << buf;
        }
    }
    tsv.close();
    finish_run_dir(out);
    std::cout << "wrote attention report -> " << out.string() << "\n";
    return kExitOk;
}

namespace {

// Applies [section] config-file values to CLI11 options the user did not
// set explicitly; unknown keys in the section are a hard error.
void apply_config(CLI::App* sub, const std::string& section, const std::string& config_path) {
    if (config_path.empty()) return;
    RunConfig cfg = RunConfig::parse_file(config_path);
    std::vector<std::string> allowed;
    for (const CLI::Option* opt : sub->get_options()) {
        std::string name = opt->get_name(false, true);
        if (name.rfind("--", 0) == 0) allowed.push_back(name.substr(2));
    }
    cfg.validate_keys(section, allowed);
    auto sit = cfg.sections.find(section);
    if (sit == cfg.sections.end()) return;
    for (const auto& [key, value] : sit->second) {
        CLI::Option* opt = sub->get_option("--" + key);
        if (opt->count() == 0) {
            opt->add_result(value);
            opt->run_callback();
        }
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"desk-scale latent-diffusion style personalization lab"};
    app.require_subcommand(1);
    std::string config_path;

    GenCorpusArgs gen;
    CLI::App* s_gen = app.add_subcommand("gen-corpus", "generate a procedural style corpus");
    s_gen->add_option("--config", config_path, "config file");
    s_gen->add_option("--style", gen.style, "style transform name")->required();
    s_gen->add_option("--persons", gen.persons, "person scene count");
    s_gen->add_option("--backgrounds", gen.backgrounds, "background scene count");
    s_gen->add_option("--seed", gen.seed, "corpus seed");
    s_gen->add_option("--out", gen.out, "output root directory")->required();
    s_gen->add_option("--role", gen.role, "styleref|aux");
    s_gen->add_option("--identifier", gen.identifier, "[V] or [W]");
    s_gen->add_flag("--force", gen.force, "overwrite a completed run directory");

    PretrainArgs pre;
    CLI::App* s_pre = app.add_subcommand("pretrain", "train the frozen base model");
    s_pre->add_option("--config", config_path, "config file");
    s_pre->add_option("--out", pre.out, "output checkpoint path")->required();
    s_pre->add_option("--tower-out", pre.tower_out, "also train/write the alignment tower");
    s_pre->add_option("--persons", pre.persons, "person scenes in the base corpus");
    s_pre->add_option("--backgrounds", pre.backgrounds, "background scenes in the base corpus");
    s_pre->add_option("--ae-steps", pre.ae_steps, "autoencoder steps");
    s_pre->add_option("--ldm-steps", pre.ldm_steps, "denoiser/text steps");
    s_pre->add_option("--tower-steps", pre.tower_steps, "alignment tower steps");
    s_pre->add_option("--seed", pre.seed, "pretraining seed");
    s_pre->add_flag("--force", pre.force, "overwrite outputs");

    TrainArgs tr;
    CLI::App* s_tr = app.add_subcommand("train", "personalize a base checkpoint on a style");
    s_tr->add_option("--config", config_path, "config file");
    s_tr->add_option("--mode", tr.mode, "dreambooth|single|multi");
    s_tr->add_option("--styleref", tr.styleref, "styleref dataset dir (D1 in multi mode)");
    s_tr->add_option("--styleref2", tr.styleref2, "D2 dataset dir (multi mode)");
    s_tr->add_option("--aux", tr.aux, "aux dataset dir");
    s_tr->add_option("--init", tr.init, "base checkpoint")->required();
    s_tr->add_option("--out", tr.out, "run directory")->required();
    s_tr->add_option("--lambda", tr.lambda, "auxiliary term weight");
    s_tr->add_option("--steps", tr.steps, "training steps (default 500; multi 1000)");
    s_tr->add_option("--lr", tr.lr, "learning rate");
    s_tr->add_option("--seed", tr.seed, "training seed");
    s_tr->add_option("--batch", tr.batch, "pairs per step");
    s_tr->add_option("--ckpt-every", tr.ckpt_every, "checkpoint interval (0 = final only)");
    s_tr->add_flag("--force", tr.force, "overwrite a completed run directory");

    SampleArgs sa;
    CLI::App* s_sa = app.add_subcommand("sample", "sample images from a checkpoint");
    s_sa->add_option("--config", config_path, "config file");
    s_sa->add_option("--ckpt", sa.ckpt, "checkpoint path")->required();
    s_sa->add_option("--prompt", sa.prompt, "text prompt")->required();
    s_sa->add_option("--n", sa.n, "images to sample");
    s_sa->add_option("--steps", sa.steps, "inference steps");
    s_sa->add_option("--cfg", sa.cfg, "guidance scale");
    s_sa->add_option("--seed", sa.seed, "sampling seed");
    s_sa->add_option("--out", sa.out, "output directory")->required();
    s_sa->add_flag("--force", sa.force, "overwrite a completed run directory");

    StylizeArgs st;
    CLI::App* s_st = app.add_subcommand("stylize", "restyle an input image (partial noising)");
    s_st->add_option("--config", config_path, "config file");
    s_st->add_option("--ckpt", st.ckpt, "checkpoint path")->required();
    s_st->add_option("--in", st.input, "input PPM image")->required();
    s_st->add_option("--prompt", st.prompt, "text prompt")->required();
    s_st->add_option("--t0", st.t0, "noising fraction in [0,1]");
    s_st->add_option("--steps", st.steps, "inference steps");
    s_st->add_option("--cfg", st.cfg, "guidance scale");
    s_st->add_option("--seed", st.seed, "noise seed");
    s_st->add_option("--out", st.out, "output PPM path")->required();

    EvaluateArgs ev;
    CLI::App* s_ev = app.add_subcommand("evaluate", "score generated vs reference images");
    s_ev->add_option("--config", config_path, "config file");
    s_ev->add_option("--generated", ev.generated, "generated image directory")->required();
    s_ev->add_option("--reference", ev.reference, "reference image directory")->required();
    s_ev->add_option("--tower", ev.tower, "alignment tower checkpoint");
    s_ev->add_option("--out", ev.out, "metrics.csv path")->required();
    s_ev->add_option("--feature-seed", ev.feature_seed, "feature extractor seed");
    s_ev->add_option("--checkpoint-id", ev.checkpoint_id, "label for the csv row");

    SweepArgs sw;
    CLI::App* s_sw = app.add_subcommand("sweep", "evaluate every checkpoint in a run directory");
    s_sw->add_option("--config", config_path, "config file");
    s_sw->add_option("--run", sw.run_dir, "training run directory")->required();
    s_sw->add_option("--reference", sw.reference, "reference dataset dir")->required();
    s_sw->add_option("--tower", sw.tower, "alignment tower checkpoint")->required();
    s_sw->add_option("--out", sw.out, "metrics.csv path")->required();
    s_sw->add_option("--prompts", sw.prompts, "evaluation prompt count");
    s_sw->add_option("--prompt-seed", sw.prompt_seed, "prompt generator seed");
    s_sw->add_option("--prompt-mode", sw.prompt_mode, "single|multi identifier policy");
    s_sw->add_option("--images-per-prompt", sw.images_per_prompt, "samples per prompt");
    s_sw->add_option("--steps", sw.steps, "inference steps");
    s_sw->add_option("--cfg", sw.cfg, "guidance scale");
    s_sw->add_option("--seed", sw.seed, "sampling seed");
    s_sw->add_option("--feature-seed", sw.feature_seed, "feature extractor seed");

    InspectAttnArgs ia;
    CLI::App* s_ia = app.add_subcommand("inspect-attn", "dump cross-attention heatmaps");
    s_ia->add_option("--config", config_path, "config file");
    s_ia->add_option("--ckpt", ia.ckpt, "checkpoint path")->required();
    s_ia->add_option("--prompt", ia.prompt, "prompt (must contain an identifier)");
    s_ia->add_option("--scene-seed", ia.scene_seed, "person scene seed");
    s_ia->add_option("--style", ia.style, "style transform applied to the scene");
    s_ia->add_option("--timesteps", ia.timesteps, "comma-separated timesteps");
    s_ia->add_option("--seed", ia.seed, "noise seed");
    s_ia->add_option("--out", ia.out, "output directory")->required();
    s_ia->add_flag("--force", ia.force, "overwrite a completed run directory");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (s_gen->parsed()) {
            apply_config(s_gen, "gen-corpus", config_path);
            return cmd_gen_corpus(gen);
        }
        if (s_pre->parsed()) {
            apply_config(s_pre, "pretrain", config_path);
            return cmd_pretrain(pre);
        }
        if (s_tr->parsed()) {
            apply_config(s_tr, "train", config_path);
            return cmd_train(tr);
        }
        if (s_sa->parsed()) {
            apply_config(s_sa, "sample", config_path);
            return cmd_sample(sa);
        }
        if (s_st->parsed()) {
            apply_config(s_st, "stylize", config_path);
            return cmd_stylize(st);
        }
        if (s_ev->parsed()) {
            apply_config(s_ev, "evaluate", config_path);
            return cmd_evaluate(ev);
        }
        if (s_sw->parsed()) {
            apply_config(s_sw, "sweep", config_path);
            return cmd_sweep(sw);
        }
        if (s_ia->parsed()) {
            apply_config(s_ia, "inspect-attn", config_path);
            return cmd_inspect_attn(ia);
        }
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitData;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace stylelab
