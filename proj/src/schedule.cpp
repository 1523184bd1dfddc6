#include "stylelab/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stylelab {

double default_beta_start(int T) { return 1e-4 * (1000.0 / T); }
double default_beta_end(int T) { return 0.02 * (1000.0 / T); }

DiffusionSchedule make_schedule(int T, double beta_start, double beta_end) {
    if (T < 1) throw std::invalid_argument("make_schedule: T must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw std::invalid_argument("make_schedule: need 0 < beta_start <= beta_end < 1");
    }
    DiffusionSchedule s;
    s.T = T;
    s.alphas.resize(static_cast<size_t>(T) + 1);
    s.sigmas.resize(static_cast<size_t>(T) + 1);
    s.alphas[0] = 1.0;
    s.sigmas[0] = 0.0;
    double prod = 1.0;
    for (int t = 1; t <= T; ++t) {
        double beta = (T == 1) ? beta_start
                               : beta_start + (beta_end - beta_start) * (t - 1) / (T - 1);
        prod *= 1.0 - beta;
        double alpha = std::sqrt(prod);
        s.alphas[static_cast<size_t>(t)] = alpha;
        s.sigmas[static_cast<size_t>(t)] = std::sqrt(1.0 - alpha * alpha);
    }
    return s;
}

DiffusionSchedule make_default_schedule(int T) {
    return make_schedule(T, default_beta_start(T), default_beta_end(T));
}

LatentCode forward_diffuse(const LatentCode& z0, int t, const NoiseSample& eps,
                           const DiffusionSchedule& sched) {
    if (t < 0 || t > sched.T) {
        throw std::invalid_argument("forward_diffuse: t out of range [0, " +
                                    std::to_string(sched.T) + "]");
    }
    if (!z0.data.same_shape(eps.data)) {
        throw std::invalid_argument("forward_diffuse: latent/noise shape mismatch");
    }
    LatentCode out;
    out.data = axpby(sched.alpha(t), z0.data, sched.sigma(t), eps.data);
    out.timestep = t;
    return out;
}

double denoising_loss(const NoiseSample& pred_eps, const NoiseSample& true_eps) {
    if (!pred_eps.data.same_shape(true_eps.data)) {
        throw std::invalid_argument("denoising_loss: shape mismatch");
    }
    return mean_sq(sub(pred_eps.data, true_eps.data));
}

}  // namespace stylelab
