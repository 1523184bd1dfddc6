#pragma once

#include <string>
#include <vector>

#include "stylelab/features.hpp"
#include "stylelab/metrics.hpp"
#include "stylelab/model.hpp"
#include "stylelab/prompts.hpp"
#include "stylelab/sampler.hpp"

namespace stylelab {

// Cross-attention inspection for one prompt/image at the requested
// timesteps. person_fraction is the share of a token's attention mass that
// falls inside the (8x8-pooled) person mask; a token with uniform attention
// scores exactly the mask's area fraction.
struct TokenAttention {
    std::string token;
    AttentionMap map;
    double person_fraction = 0.0;
};

struct AttentionReport {
    std::vector<std::vector<TokenAttention>> per_timestep;  // [timestep][token]
    std::vector<int> timesteps;
    double uniform_baseline = 0.0;  // pooled mask area fraction
};

AttentionReport attention_report(const TrainableWeights& w, const PromptSpec& prompt,
                                 const Tensor& image, const Tensor& person_mask,
                                 const std::vector<int>& timesteps, uint64_t seed = 0);

// SDEdit-style stylization: encode, forward-diffuse to
// t0 = round(t0_fraction * T), then run the guided reverse sampler.
// t0_fraction = 0 reduces to the autoencoder reconstruction.
Tensor stylize(const TrainableWeights& w, const Tensor& input_image, const PromptSpec& prompt,
               double t0_fraction, uint64_t seed, int steps = 30, double guidance_scale = 7.5);

// Metric sweep over a checkpoint schedule: for every checkpoint, generate
// images for the prompt set and score FID/KID against the reference plus
// alignment against the prompts' content clauses.
struct SweepEntry {
    std::string checkpoint_path;
    int step = 0;
};

struct SweepOptions {
    int images_per_prompt = 6;
    int sample_steps = 30;
    double guidance_scale = 7.5;
    uint64_t seed = 0;
};

std::vector<MetricReport> sweep(const std::vector<SweepEntry>& checkpoints,
                                const std::vector<EvalPrompt>& prompt_set,
                                const StyleDataset& reference, const AlignmentTower& tower,
                                const FeatureExtractor& extractor, const SweepOptions& opt);

// One checkpoint's worth of the sweep: generation + metrics.
MetricReport evaluate_checkpoint(const TrainableWeights& w,
                                 const std::vector<EvalPrompt>& prompt_set,
                                 const StyleDataset& reference, const AlignmentTower& tower,
                                 const FeatureExtractor& extractor, const SweepOptions& opt);

}  // namespace stylelab
