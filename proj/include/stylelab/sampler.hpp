#pragma once

#include "stylelab/model.hpp"

namespace stylelab {

// Inference defaults: 30 reverse steps with classifier-free guidance 7.5.
struct SampleOptions {
    int steps = 30;
    double guidance_scale = 7.5;
    uint64_t seed = 0;
};

// Deterministic ancestral stepping (eta = 0) over a stride of timesteps from
// t_start down to 0. At each step the noise estimate is
// eps_hat = eps_uncond + scale * (eps_cond - eps_uncond).
LatentCode guided_reverse(const TrainableWeights& w, const LatentCode& z_start,
                          const ConditioningVector& cond, const ConditioningVector& uncond,
                          int steps, double guidance_scale);

// Full text-to-image sampling: seeded Gaussian z_T, guided reverse
// diffusion, decode. Byte-identical for identical inputs.
Tensor sample_image(const TrainableWeights& w, const PromptSpec& prompt,
                    const SampleOptions& opt);

// The descending timestep stride [t_start .. 1] used by the reverse pass.
std::vector<int> reverse_timesteps(int t_start, int steps);

}  // namespace stylelab
