#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "stylelab/autodiff.hpp"
#include "stylelab/params.hpp"
#include "stylelab/schedule.hpp"
#include "stylelab/vocab.hpp"

namespace stylelab {

// Fixed desk-scale geometry: 32x32 RGB images, 4x8x8 latents, a 32/64-wide
// U-Net with a single cross-attention layer at the 8x8 resolution.
struct ModelDims {
    static constexpr int kImageC = 3;
    static constexpr int kImageHW = 32;
    static constexpr int kLatentC = 4;
    static constexpr int kLatentHW = 8;
    static constexpr int kEmbedDim = 32;
    static constexpr int kMaxPromptLen = 16;
    static constexpr int kWidth0 = 32;
    static constexpr int kWidth1 = 64;
    static constexpr int kTimeDim = 32;
    static constexpr int kGnGroups = 8;
};

// The jointly optimized parameter set: denoiser (theta, "unet."), text
// encoder (phi, "text."), and the frozen autoencoder ("ae.", never updated
// by personalization).
struct TrainableWeights {
    ParamTable theta;
    ParamTable phi;
    ParamTable frozen;
    DiffusionSchedule schedule;
    Vocabulary vocab;
    uint32_t version = 1;

    const Tensor& find(const std::string& name) const;
};

// Fixed-seed Gaussian init (std 0.02), zero-init final denoiser layer.
TrainableWeights init_weights(uint64_t seed, int T = kDefaultT);

struct ConditioningVector {
    Tensor tokens_embedded;  // L x embed_dim
};

// Softmax-normalized cross-attention weights: per spatial location the
// weights across tokens sum to 1.
struct AttentionMap {
    Tensor per_token;  // L x latent_hw x latent_hw
    int timestep = 0;
};

// Binds named tensors from a TrainableWeights to tape leaves. train_mode
// marks theta/phi as differentiable; grad_frozen additionally marks the
// autoencoder (only autoencoder pretraining uses that).
class Binder {
 public:
    Binder(Tape& tape, const TrainableWeights& w, bool train_mode, bool grad_frozen = false);

    Tape::Id operator()(const std::string& name);

    // Gradients of every bound differentiable leaf, keyed by name.
    ParamTable collect_grads() const;

 private:
    Tape& tape_;
    const TrainableWeights& w_;
    bool train_;
    bool grad_frozen_;
    std::map<std::string, Tape::Id> bound_;
};

// Tape-level forwards (shared by training, sampling and metrics so the
// train/inference paths cannot diverge).
Tape::Id encode_image_node(Tape& tape, Binder& bind, const Tensor& image);
Tape::Id decode_latent_node(Tape& tape, Binder& bind, Tape::Id z);
Tape::Id text_encode_node(Tape& tape, Binder& bind, const std::vector<int>& tokens);

struct DenoiseNodes {
    Tape::Id eps;
    Tape::Id attention = -1;  // softmax rows (HW x L) when captured
};
DenoiseNodes denoise_node(Tape& tape, Binder& bind, Tape::Id z_t, int t, Tape::Id cond,
                          bool capture_attention);

// Plain wrappers over the tape forwards.
LatentCode encode_image(const TrainableWeights& w, const Tensor& image);
Tensor decode_latent(const TrainableWeights& w, const LatentCode& z);
ConditioningVector text_encode(const TrainableWeights& w, const PromptSpec& prompt);
std::pair<NoiseSample, std::optional<AttentionMap>> denoise(const TrainableWeights& w,
                                                            const LatentCode& z_t, int t,
                                                            const ConditioningVector& c,
                                                            bool capture_attention = false);

// Reverse-mode gradients of a scalar loss w.r.t. theta and phi. Throws
// NumericError when the loss is non-finite.
using LossClosure = std::function<Tape::Id(Tape&, Binder&)>;
ParamTable gradients(const TrainableWeights& w, const LossClosure& closure,
                     double* loss_out = nullptr);

// Sinusoidal embedding for an integer timestep, length ModelDims::kTimeDim.
Tensor time_embedding(int t);

}  // namespace stylelab
