#include "stylelab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stylelab/checkpoint.hpp"
#include "stylelab/errors.hpp"

namespace stylelab {

namespace {

// Average-pool a 32x32 mask down to the 8x8 attention grid.
Tensor pool_mask(const Tensor& mask) {
    constexpr int kHw = ModelDims::kLatentHW;
    constexpr int kF = 32 / kHw;
    Tensor out({kHw, kHw});
    for (int y = 0; y < kHw; ++y) {
        for (int x = 0; x < kHw; ++x) {
            double s = 0.0;
            for (int dy = 0; dy < kF; ++dy)
                for (int dx = 0; dx < kF; ++dx) s += mask.at(y * kF + dy, x * kF + dx);
            out.at(y, x) = s / (kF * kF);
        }
    }
    return out;
}

}  // namespace

AttentionReport attention_report(const TrainableWeights& w, const PromptSpec& prompt,
                                 const Tensor& image, const Tensor& person_mask,
                                 const std::vector<int>& timesteps, uint64_t seed) {
    if (prompt.identifier_tokens.empty()) {
        throw std::invalid_argument("attention_report: prompt has no identifier token");
    }
    if (person_mask.rank() != 2 || person_mask.dim(0) != 32 || person_mask.dim(1) != 32) {
        throw std::invalid_argument("attention_report: expected 32x32 person mask");
    }
    AttentionReport rep;
    rep.timesteps = timesteps;
    const Tensor pooled = pool_mask(person_mask);
    double mask_sum = 0.0;
    for (double v : pooled.data) mask_sum += v;
    rep.uniform_baseline = mask_sum / static_cast<double>(pooled.numel());

    const ConditioningVector cond = text_encode(w, prompt);
    const LatentCode z0 = encode_image(w, image);
    Rng rng(seed);
    const NoiseSample eps{Tensor::randn(z0.data.shape, rng)};
    for (int t : timesteps) {
        if (t < 1 || t > w.schedule.T) {
            throw std::invalid_argument("attention_report: timestep out of range");
        }
        const LatentCode z_t = forward_diffuse(z0, t, eps, w.schedule);
        auto [unused, attn] = denoise(w, z_t, t, cond, /*capture_attention=*/true);
        (void)unused;
        std::vector<TokenAttention> row;
        const Tensor& maps = attn->per_token;  // L x 8 x 8
        for (int tok = 0; tok < maps.dim(0); ++tok) {
            TokenAttention ta;
            ta.token = w.vocab.word(prompt.tokens[static_cast<size_t>(tok)]);
            ta.map.timestep = t;
            ta.map.per_token = Tensor({1, maps.dim(1), maps.dim(2)});
            double inside = 0.0, total = 0.0;
            for (int y = 0; y < maps.dim(1); ++y) {
                for (int x = 0; x < maps.dim(2); ++x) {
                    const double a = maps.at(tok, y, x);
                    ta.map.per_token.at(0, y, x) = a;
                    inside += a * pooled.at(y, x);
                    total += a;
                }
            }
            ta.person_fraction = total > 0.0 ? inside / total : 0.0;
            row.push_back(std::move(ta));
        }
        rep.per_timestep.push_back(std::move(row));
    }
    return rep;
}

Tensor stylize(const TrainableWeights& w, const Tensor& input_image, const PromptSpec& prompt,
               double t0_fraction, uint64_t seed, int steps, double guidance_scale) {
    if (t0_fraction < 0.0 || t0_fraction > 1.0) {
        throw std::invalid_argument("stylize: t0_fraction must be in [0,1]");
    }
    const LatentCode z0 = encode_image(w, input_image);
    const int t0 = static_cast<int>(std::lround(t0_fraction * w.schedule.T));
    if (t0 == 0) {
        Tensor img = decode_latent(w, z0);
        for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
        return img;
    }
    Rng rng(seed);
    const NoiseSample eps{Tensor::randn(z0.data.shape, rng)};
    const LatentCode z_t0 = forward_diffuse(z0, t0, eps, w.schedule);
    const ConditioningVector cond = text_encode(w, prompt);
    const ConditioningVector uncond = text_encode(w, PromptSpec{});
    const int eff_steps = std::max(1, std::min(steps, t0));
    LatentCode out = guided_reverse(w, z_t0, cond, uncond, eff_steps, guidance_scale);
    Tensor img = decode_latent(w, out);
    for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
    return img;
}

MetricReport evaluate_checkpoint(const TrainableWeights& w,
                                 const std::vector<EvalPrompt>& prompt_set,
                                 const StyleDataset& reference, const AlignmentTower& tower,
                                 const FeatureExtractor& extractor, const SweepOptions& opt) {
    if (prompt_set.empty()) throw std::invalid_argument("evaluate_checkpoint: empty prompt set");
    if (reference.size() < 2) {
        throw std::invalid_argument("evaluate_checkpoint: reference needs >= 2 images");
    }
    std::vector<Tensor> generated;
    std::vector<PromptSpec> content_prompts;  // alignment scores use the content clause
    generated.reserve(prompt_set.size() * static_cast<size_t>(opt.images_per_prompt));
    uint64_t k = 0;
    for (const EvalPrompt& ep : prompt_set) {
        for (int i = 0; i < opt.images_per_prompt; ++i, ++k) {
            SampleOptions so;
            so.steps = opt.sample_steps;
            so.guidance_scale = opt.guidance_scale;
            so.seed = opt.seed ^ (0x9e3779b97f4a7c15ULL * (k + 1));
            generated.push_back(sample_image(w, ep.prompt, so));
            content_prompts.push_back(tokenize(w.vocab, ep.content_text));
        }
    }
    std::vector<Tensor> ref_images;
    ref_images.reserve(reference.size());
    for (const StyleRecord& r : reference.records) ref_images.push_back(r.image);

    const Tensor fg = extractor.features_matrix(generated);
    const Tensor fr = extractor.features_matrix(ref_images);
    MetricReport rep;
    rep.fid = fid(fg, fr);
    rep.kid = kid(fg, fr);
    rep.clip_score = clip_score(generated, content_prompts, tower);
    rep.n_generated = static_cast<int>(generated.size());
    rep.n_reference = static_cast<int>(ref_images.size());
    rep.style_id = reference.style_id;
    return rep;
}

std::vector<MetricReport> sweep(const std::vector<SweepEntry>& checkpoints,
                                const std::vector<EvalPrompt>& prompt_set,
                                const StyleDataset& reference, const AlignmentTower& tower,
                                const FeatureExtractor& extractor, const SweepOptions& opt) {
    std::vector<MetricReport> out;
    for (const SweepEntry& entry : checkpoints) {
        TrainableWeights w = load_checkpoint(entry.checkpoint_path);
        MetricReport rep = evaluate_checkpoint(w, prompt_set, reference, tower, extractor, opt);
        rep.checkpoint_id = entry.checkpoint_path;
        rep.step = entry.step;
        out.push_back(std::move(rep));
    }
    return out;
}

}  // namespace stylelab
