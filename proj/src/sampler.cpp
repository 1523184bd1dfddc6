#include "stylelab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stylelab {

std::vector<int> reverse_timesteps(int t_start, int steps) {
    if (steps < 1) throw std::invalid_argument("reverse_timesteps: steps must be >= 1");
    if (t_start < 1) return {};
    std::vector<int> ts;
    if (steps == 1) {
        ts.push_back(t_start);
        return ts;
    }
    int prev = -1;
    for (int i = 0; i < steps; ++i) {
        double f = static_cast<double>(i) / (steps - 1);
        int t = static_cast<int>(std::lround(t_start - f * (t_start - 1)));
        t = std::clamp(t, 1, t_start);
        if (t != prev) ts.push_back(t);
        prev = t;
    }
    return ts;  // strictly decreasing, ends at 1
}

LatentCode guided_reverse(const TrainableWeights& w, const LatentCode& z_start,
                          const ConditioningVector& cond, const ConditioningVector& uncond,
                          int steps, double guidance_scale) {
    const DiffusionSchedule& sched = w.schedule;
    std::vector<int> ts = reverse_timesteps(z_start.timestep, steps);
    Tensor z = z_start.data;
    for (size_t i = 0; i < ts.size(); ++i) {
        const int t = ts[i];
        const int t_next = (i + 1 < ts.size()) ? ts[i + 1] : 0;
        LatentCode zt{z, t};
        Tensor eps_c = denoise(w, zt, t, cond).first.data;
        Tensor eps_u = denoise(w, zt, t, uncond).first.data;
        // eps_hat = eps_u + s * (eps_c - eps_u)
        Tensor eps_hat = axpby(1.0, eps_u, guidance_scale, sub(eps_c, eps_u));
        // predicted clean latent, then step to t_next deterministically
        Tensor z0_hat = scale(axpby(1.0, z, -sched.sigma(t), eps_hat), 1.0 / sched.alpha(t));
        z = axpby(sched.alpha(t_next), z0_hat, sched.sigma(t_next), eps_hat);
    }
    return LatentCode{std::move(z), 0};
}

Tensor sample_image(const TrainableWeights& w, const PromptSpec& prompt,
                    const SampleOptions& opt) {
    if (opt.steps < 1) throw std::invalid_argument("sample: steps must be >= 1");
    ConditioningVector cond = text_encode(w, prompt);
    ConditioningVector uncond = text_encode(w, PromptSpec{});
    Rng rng(opt.seed);
    LatentCode z_T;
    z_T.data = Tensor::randn({ModelDims::kLatentC, ModelDims::kLatentHW, ModelDims::kLatentHW},
                             rng);
    z_T.timestep = w.schedule.T;
    LatentCode z0 = guided_reverse(w, z_T, cond, uncond, opt.steps, opt.guidance_scale);
    Tensor img = decode_latent(w, z0);
    for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
    return img;
}

}  // namespace stylelab
