#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stylelab/dataset.hpp"
#include "stylelab/model.hpp"

namespace stylelab {

enum class TrainMode { kDreamBooth, kSingle, kMulti };
std::string to_string(TrainMode m);
TrainMode train_mode_from_string(const std::string& s);

struct TrainConfig {
    double lambda = 1.0;        // auxiliary-term weight
    int steps = 500;
    double learning_rate = 1e-4;
    uint64_t seed = 0;
    int batch_size = 1;
    TrainMode mode = TrainMode::kSingle;
    int checkpoint_every = 0;   // 0 = only the final weights

    void validate() const;
};

struct MultiTrainConfig {
    std::vector<StyleDataset> datasets;  // D1 (persons, [V]), D2 (backgrounds, [W])
    TrainConfig base;

    // q = |D1| / (|D1| + |D2|)
    double q() const;
};

struct TraceRow {
    int step = 0;
    double total_loss = 0.0;
    double styleref_term = 0.0;
    double aux_term = 0.0;
    int selected_dataset = 1;  // 1-based; always 1 outside multi mode
};

struct TrainResult {
    TrainableWeights weights;
    std::vector<TraceRow> trace;
    std::vector<int> selection_log;  // multi mode only
};

// Invoked at every checkpoint_every-th step and after the final step.
using CheckpointSink = std::function<void(int step, const TrainableWeights&)>;

// One dual-binding loss evaluation: for each (styleref, aux) pair draw a
// shared t ~ Uniform{1..T} and independent noises, then
//   ||eps - eps_theta(z_t, t, c)||^2 + lambda * ||eps' - eps_theta(z_t_aux, t, c_aux)||^2
// (element-mean terms, averaged over the batch). Returns the loss and the
// gradient table for theta and phi.
std::pair<double, ParamTable> ssf_loss(const TrainableWeights& w,
                                       const std::vector<const StyleRecord*>& styleref_batch,
                                       const std::vector<const StyleRecord*>& aux_batch,
                                       double lambda, Rng& rng, double* styleref_term = nullptr,
                                       double* aux_term = nullptr);

// Single-token dual binding: every step samples one styleref and one aux
// record, evaluates ssf_loss and takes an Adam step on {theta, phi}.
TrainResult train_single(const TrainConfig& config, const StyleDataset& styleref,
                         const StyleDataset& aux, const TrainableWeights& init,
                         const CheckpointSink& sink = nullptr);

// Multi-token training: each iteration picks D1 when U < q (U from a
// selection stream independent of the training stream, so an empty D2
// reduces bit-for-bit to train_single), then runs the single-token step on
// the selected dataset.
TrainResult train_multi(const MultiTrainConfig& config, const StyleDataset& aux,
                        const TrainableWeights& init, const CheckpointSink& sink = nullptr);

// Samples n images from the frozen weights under the given prompt; the
// resulting dataset plays the auxiliary role (generated provenance).
StyleDataset generate_prior_images(const TrainableWeights& frozen_weights,
                                   const PromptSpec& prompt, int n, uint64_t seed);

// DreamBooth baseline: train_single with the aux set replaced by
// generate_prior_images output.
TrainResult train_dreambooth(const TrainConfig& config, const StyleDataset& styleref,
                             const TrainableWeights& init, const CheckpointSink& sink = nullptr);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

// ------------------------------------------------------------ pretraining

// Produces the frozen starting point for personalization: the autoencoder
// is trained on the base corpus and frozen (with latent statistics), then
// the denoiser and text encoder are trained with the denoising objective on
// content prompts (with a small null-prompt fraction for guidance).
struct PretrainConfig {
    int n_person_scenes = 160;
    int n_background_scenes = 160;
    int ae_steps = 1200;
    double ae_lr = 2e-3;
    int ae_batch = 8;
    int ldm_steps = 4000;
    double ldm_lr = 4e-4;
    int ldm_batch = 4;
    double null_prompt_prob = 0.1;
    uint64_t seed = 11;
};

TrainableWeights pretrain_base_model(const PretrainConfig& cfg,
                                     std::vector<double>* ae_loss_trace = nullptr,
                                     std::vector<double>* ldm_loss_trace = nullptr);

}  // namespace stylelab
