#pragma once

#include <vector>

#include "stylelab/tensor.hpp"

namespace stylelab {

// Variance-preserving noise schedule: alpha_t^2 + sigma_t^2 = 1 for every t,
// alpha_0 = 1 and sigma_0 = 0 exactly. Index 0..T inclusive.
struct DiffusionSchedule {
    int T = 0;
    std::vector<double> alphas;  // size T+1, strictly decreasing for t >= 0
    std::vector<double> sigmas;  // size T+1, strictly increasing

    double alpha(int t) const { return alphas[static_cast<size_t>(t)]; }
    double sigma(int t) const { return sigmas[static_cast<size_t>(t)]; }
};

// A latent code z with the timestep it belongs to (0 = clean).
struct LatentCode {
    Tensor data;  // (channels, height, width)
    int timestep = 0;
};

struct NoiseSample {
    Tensor data;
};

// Default horizon and beta ramp. The classic (1e-4, 0.02) ramp is defined for
// a 1000-step horizon; for shorter horizons the betas are scaled by 1000/T so
// the terminal signal level stays comparable.
inline constexpr int kDefaultT = 200;
double default_beta_start(int T);
double default_beta_end(int T);

// Linear beta ramp; alpha_t = sqrt(prod_{s<=t}(1 - beta_s)), sigma_t =
// sqrt(1 - alpha_t^2). Throws std::invalid_argument on a bad ramp.
DiffusionSchedule make_schedule(int T, double beta_start, double beta_end);
DiffusionSchedule make_default_schedule(int T = kDefaultT);

// z_t = alpha_t * z0 + sigma_t * eps.
LatentCode forward_diffuse(const LatentCode& z0, int t, const NoiseSample& eps,
                           const DiffusionSchedule& sched);

// Mean over elements of squared differences (element-mean convention).
double denoising_loss(const NoiseSample& pred_eps, const NoiseSample& true_eps);

}  // namespace stylelab
