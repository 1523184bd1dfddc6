#include "stylelab/train.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "stylelab/adam.hpp"
#include "stylelab/errors.hpp"
#include "stylelab/sampler.hpp"

namespace stylelab {

std::string to_string(TrainMode m) {
    switch (m) {
        case TrainMode::kDreamBooth: return "dreambooth";
        case TrainMode::kSingle: return "single";
        default: return "multi";
    }
}

TrainMode train_mode_from_string(const std::string& s) {
    if (s == "dreambooth") return TrainMode::kDreamBooth;
    if (s == "single") return TrainMode::kSingle;
    if (s == "multi") return TrainMode::kMulti;
    throw ConfigError("unknown train mode '" + s + "' (dreambooth|single|multi)");
}

void TrainConfig::validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

double MultiTrainConfig::q() const {
    if (datasets.size() != 2) throw ConfigError("multi mode needs exactly two datasets");
    const double n1 = static_cast<double>(datasets[0].size());
    const double n2 = static_cast<double>(datasets[1].size());
    if (n1 + n2 == 0.0) throw ConfigError("multi mode: both datasets are empty");
    return n1 / (n1 + n2);
}

namespace {

void require_template(const StyleDataset& ds, Role role, const std::string& tmpl,
                      const std::string& what) {
    if (ds.empty()) throw ConfigError(what + " dataset is empty");
    for (size_t i = 0; i < ds.records.size(); ++i) {
        const StyleRecord& r = ds.records[i];
        if (r.role != role) {
            throw ConfigError(what + " record " + std::to_string(i) + " has role " +
                              to_string(r.role) + ", expected " + to_string(role));
        }
        if (r.prompt.text != tmpl) {
            throw ConfigError(what + " record " + std::to_string(i) + " prompt '" +
                              r.prompt.text + "' does not match template '" + tmpl + "'");
        }
    }
}

struct StepDraw {
    std::vector<const StyleRecord*> styleref;
    std::vector<const StyleRecord*> aux;
};

StepDraw draw_pairs(const StyleDataset& styleref, const StyleDataset& aux, int batch, Rng& rng) {
    StepDraw d;
    for (int b = 0; b < batch; ++b) {
        d.styleref.push_back(&styleref.records[rng.uniform_int(styleref.size())]);
        d.aux.push_back(&aux.records[rng.uniform_int(aux.size())]);
    }
    return d;
}

// Shared training loop; dataset selection (multi mode) happens in `pick`.
TrainResult run_loop(const TrainConfig& config,
                     const std::function<const StyleDataset&(int step, int* selected)>& pick,
                     const StyleDataset& aux, const TrainableWeights& init,
                     const CheckpointSink& sink) {
    TrainResult res;
    res.weights = init;
    res.weights.version = init.version + 1;
    Rng rng(config.seed);
    Adam adam(AdamConfig{config.learning_rate});
    if (sink) sink(0, res.weights);
    for (int step = 1; step <= config.steps; ++step) {
        int selected = 1;
        const StyleDataset& sr = pick(step, &selected);
        StepDraw d = draw_pairs(sr, aux, config.batch_size, rng);
        double sr_term = 0.0, aux_term = 0.0;
        auto [loss, grads] =
            ssf_loss(res.weights, d.styleref, d.aux, config.lambda, rng, &sr_term, &aux_term);
        adam.update({&res.weights.theta, &res.weights.phi}, grads);
        res.trace.push_back({step, loss, sr_term, aux_term, selected});
        if (sink && ((config.checkpoint_every > 0 && step % config.checkpoint_every == 0) ||
                     step == config.steps)) {
            sink(step, res.weights);
        }
    }
    return res;
}

}  // namespace

std::pair<double, ParamTable> ssf_loss(const TrainableWeights& w,
                                       const std::vector<const StyleRecord*>& styleref_batch,
                                       const std::vector<const StyleRecord*>& aux_batch,
                                       double lambda, Rng& rng, double* styleref_term,
                                       double* aux_term) {
    if (styleref_batch.empty() || aux_batch.empty()) {
        throw std::invalid_argument("ssf_loss: empty batch");
    }
    if (styleref_batch.size() != aux_batch.size()) {
        throw std::invalid_argument("ssf_loss: styleref/aux batch size mismatch");
    }
    if (lambda < 0.0) throw std::invalid_argument("ssf_loss: lambda must be >= 0");
    const int batch = static_cast<int>(styleref_batch.size());
    const DiffusionSchedule& sched = w.schedule;
    const std::vector<int> latent_shape{ModelDims::kLatentC, ModelDims::kLatentHW,
                                        ModelDims::kLatentHW};

    double sr_sum = 0.0, aux_sum = 0.0;
    double loss_value = 0.0;
    ParamTable grads = gradients(
        w,
        [&](Tape& tape, Binder& bind) {
            Tape::Id total = -1;
            for (int b = 0; b < batch; ++b) {
                const StyleRecord& sr = *styleref_batch[static_cast<size_t>(b)];
                const StyleRecord& ax = *aux_batch[static_cast<size_t>(b)];
                const int t = 1 + static_cast<int>(rng.uniform_int(sched.T));
                const NoiseSample eps_v{Tensor::randn(latent_shape, rng)};
                const NoiseSample eps_prime_v{Tensor::randn(latent_shape, rng)};
                Tape::Id eps = tape.leaf(eps_v.data);
                Tape::Id eps_prime = tape.leaf(eps_prime_v.data);

                Tape::Id c = text_encode_node(tape, bind, sr.prompt.tokens);
                Tape::Id c_aux = text_encode_node(tape, bind, ax.prompt.tokens);

                // z_t carries no gradient (encoder frozen, inputs constant),
                // so it goes through the plain forward-diffusion path
                Tape::Id z0 = encode_image_node(tape, bind, sr.image);
                Tape::Id z0_aux = encode_image_node(tape, bind, ax.image);
                const LatentCode zt_v =
                    forward_diffuse(LatentCode{tape.val(z0), 0}, t, eps_v, sched);
                const LatentCode zt_aux_v =
                    forward_diffuse(LatentCode{tape.val(z0_aux), 0}, t, eps_prime_v, sched);
                Tape::Id z_t = tape.leaf(zt_v.data);
                Tape::Id z_t_aux = tape.leaf(zt_aux_v.data);

                Tape::Id pred = denoise_node(tape, bind, z_t, t, c, false).eps;
                Tape::Id pred_aux = denoise_node(tape, bind, z_t_aux, t, c_aux, false).eps;
                Tape::Id term_sr = tape.mean_sq_diff(pred, eps);
                Tape::Id term_aux = tape.mean_sq_diff(pred_aux, eps_prime);
                sr_sum += tape.val(term_sr).at(0);
                aux_sum += tape.val(term_aux).at(0);
                Tape::Id pair_loss = tape.add_scaled(term_sr, term_aux, lambda);
                total = (total < 0) ? pair_loss : tape.add(total, pair_loss);
            }
            if (batch > 1) total = tape.scale(total, 1.0 / batch);
            return total;
        },
        &loss_value);

    if (styleref_term) *styleref_term = sr_sum / batch;
    if (aux_term) *aux_term = aux_sum / batch;
    return {loss_value, std::move(grads)};
}

TrainResult train_single(const TrainConfig& config, const StyleDataset& styleref,
                         const StyleDataset& aux, const TrainableWeights& init,
                         const CheckpointSink& sink) {
    config.validate();
    require_template(styleref, Role::kStyleRef, kStylerefTemplateV, "styleref");
    require_template(aux, Role::kAux, kAuxTemplate, "aux");
    auto pick = [&styleref](int, int* selected) -> const StyleDataset& {
        *selected = 1;
        return styleref;
    };
    return run_loop(config, pick, aux, init, sink);
}

TrainResult train_multi(const MultiTrainConfig& config, const StyleDataset& aux,
                        const TrainableWeights& init, const CheckpointSink& sink) {
    config.base.validate();
    const double q = config.q();  // validates dataset count and non-emptiness
    const StyleDataset& d1 = config.datasets[0];
    const StyleDataset& d2 = config.datasets[1];
    if (!d1.empty()) require_template(d1, Role::kStyleRef, kStylerefTemplateV, "D1");
    if (!d2.empty()) require_template(d2, Role::kStyleRef, kStylerefTemplateW, "D2");
    require_template(aux, Role::kAux, kAuxTemplate, "aux");

    // Selection draws from its own stream so the training stream matches
    // train_single draw-for-draw; the empty-D2 reduction is then bitwise.
    Rng select_rng = Rng(config.base.seed).fork(0);
    std::vector<int> selections;
    auto pick = [&](int, int* selected) -> const StyleDataset& {
        const double u = select_rng.uniform();
        const int idx = (u < q) ? 0 : 1;
        selections.push_back(idx + 1);
        *selected = idx + 1;
        const StyleDataset& chosen = config.datasets[static_cast<size_t>(idx)];
        if (chosen.empty()) {
            throw ConfigError("multi mode selected empty dataset D" + std::to_string(idx + 1));
        }
        return chosen;
    };
    TrainResult res = run_loop(config.base, pick, aux, init, sink);
    res.selection_log = std::move(selections);
    return res;
}

StyleDataset generate_prior_images(const TrainableWeights& frozen_weights,
                                   const PromptSpec& prompt, int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_prior_images: n must be >= 1");
    StyleDataset ds;
    ds.style_id = "generated";
    ds.provenance = Provenance::kGenerated;
    for (int i = 0; i < n; ++i) {
        SampleOptions opt;
        opt.seed = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(i + 1));
        StyleRecord r;
        r.image = sample_image(frozen_weights, prompt, opt);
        r.prompt = prompt;
        r.role = Role::kAux;
        r.content = ContentKind::kMixed;
        ds.records.push_back(std::move(r));
    }
    return ds;
}

TrainResult train_dreambooth(const TrainConfig& config, const StyleDataset& styleref,
                             const TrainableWeights& init, const CheckpointSink& sink) {
    config.validate();
    require_template(styleref, Role::kStyleRef, kStylerefTemplateV, "styleref");
    const PromptSpec aux_prompt = tokenize(init.vocab, kAuxTemplate);
    StyleDataset aux =
        generate_prior_images(init, aux_prompt, 20, config.seed ^ 0x70726930b0075ULL);
    auto pick = [&styleref](int, int* selected) -> const StyleDataset& {
        *selected = 1;
        return styleref;
    };
    return run_loop(config, pick, aux, init, sink);
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write trace '" + path + "'");
    os << "step,total_loss,styleref_term,aux_term,selected_dataset\n";
    char buf[160];
    for (const TraceRow& r : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d\n", r.step, r.total_loss,
                      r.styleref_term, r.aux_term, r.selected_dataset);
        os << buf;
    }
}

// ------------------------------------------------------------ pretraining

TrainableWeights pretrain_base_model(const PretrainConfig& cfg,
                                     std::vector<double>* ae_loss_trace,
                                     std::vector<double>* ldm_loss_trace) {
    TrainableWeights w = init_weights(cfg.seed);
    std::vector<BaseExample> corpus = build_base_corpus(
        cfg.n_person_scenes, cfg.n_background_scenes, cfg.seed ^ 0xba5eULL, w.vocab);
    if (corpus.empty()) throw ConfigError("pretrain: empty base corpus");
    Rng rng(cfg.seed ^ 0x7261696eULL);

    // Phase 1: autoencoder reconstruction, gradients on "ae." only.
    {
        Adam adam(AdamConfig{cfg.ae_lr});
        for (int step = 0; step < cfg.ae_steps; ++step) {
            Tape tape;
            Binder bind(tape, w, /*train_mode=*/false, /*grad_frozen=*/true);
            Tape::Id total = -1;
            for (int b = 0; b < cfg.ae_batch; ++b) {
                const BaseExample& ex = corpus[rng.uniform_int(corpus.size())];
                Tape::Id x = tape.leaf(ex.image);
                Tape::Id z = encode_image_node(tape, bind, ex.image);
                Tape::Id recon = decode_latent_node(tape, bind, z);
                Tape::Id term = tape.mean_sq_diff(recon, x);
                total = (total < 0) ? term : tape.add(total, term);
            }
            total = tape.scale(total, 1.0 / cfg.ae_batch);
            const double loss = tape.val(total).at(0);
            if (!std::isfinite(loss)) throw NumericError("pretrain: non-finite AE loss");
            tape.backward(total);
            adam.update(w.frozen, bind.collect_grads());
            if (ae_loss_trace) ae_loss_trace->push_back(loss);
        }
    }

    // Latent statistics over the corpus: unit-scale latents for diffusion.
    {
        Tensor mean({ModelDims::kLatentC});
        Tensor stdv({ModelDims::kLatentC});
        const int hw = ModelDims::kLatentHW * ModelDims::kLatentHW;
        const double n_vals = static_cast<double>(corpus.size() * static_cast<size_t>(hw));
        std::vector<Tensor> latents;
        latents.reserve(corpus.size());
        for (const BaseExample& ex : corpus) {
            latents.push_back(encode_image(w, ex.image).data);  // stats still identity here
        }
        for (const Tensor& z : latents) {
            for (int c = 0; c < ModelDims::kLatentC; ++c)
                for (int i = 0; i < hw; ++i) mean.at(c) += z.data[static_cast<size_t>(c * hw + i)];
        }
        for (int c = 0; c < ModelDims::kLatentC; ++c) mean.at(c) /= n_vals;
        for (const Tensor& z : latents) {
            for (int c = 0; c < ModelDims::kLatentC; ++c)
                for (int i = 0; i < hw; ++i) {
                    const double d = z.data[static_cast<size_t>(c * hw + i)] - mean.at(c);
                    stdv.at(c) += d * d;
                }
        }
        for (int c = 0; c < ModelDims::kLatentC; ++c) {
            stdv.at(c) = std::sqrt(stdv.at(c) / n_vals) + 1e-6;
        }
        w.frozen["ae.lat.mean"] = std::move(mean);
        w.frozen["ae.lat.std"] = std::move(stdv);
    }

    // Phase 2: denoiser + text encoder on content prompts.
    {
        Adam adam(AdamConfig{cfg.ldm_lr});
        const std::vector<int> latent_shape{ModelDims::kLatentC, ModelDims::kLatentHW,
                                            ModelDims::kLatentHW};
        const std::vector<int> null_tokens;
        for (int step = 0; step < cfg.ldm_steps; ++step) {
            struct Draw {
                const BaseExample* ex;
                int t;
                Tensor eps;
                bool null_prompt;
            };
            std::vector<Draw> draws;
            for (int b = 0; b < cfg.ldm_batch; ++b) {
                Draw d;
                d.ex = &corpus[rng.uniform_int(corpus.size())];
                d.t = 1 + static_cast<int>(rng.uniform_int(w.schedule.T));
                d.eps = Tensor::randn(latent_shape, rng);
                d.null_prompt = rng.uniform() < cfg.null_prompt_prob;
                draws.push_back(std::move(d));
            }
            double loss = 0.0;
            ParamTable grads = gradients(
                w,
                [&](Tape& tape, Binder& bind) {
                    Tape::Id total = -1;
                    for (const Draw& d : draws) {
                        Tape::Id z0 = encode_image_node(tape, bind, d.ex->image);
                        Tape::Id eps = tape.leaf(d.eps);
                        Tape::Id z_t = tape.add(tape.scale(z0, w.schedule.alpha(d.t)),
                                                tape.scale(eps, w.schedule.sigma(d.t)));
                        Tape::Id cond = text_encode_node(
                            tape, bind, d.null_prompt ? null_tokens : d.ex->prompt.tokens);
                        Tape::Id pred = denoise_node(tape, bind, z_t, d.t, cond, false).eps;
                        Tape::Id term = tape.mean_sq_diff(pred, eps);
                        total = (total < 0) ? term : tape.add(total, term);
                    }
                    return tape.scale(total, 1.0 / cfg.ldm_batch);
                },
                &loss);
            adam.update({&w.theta, &w.phi}, grads);
            if (ldm_loss_trace) ldm_loss_trace->push_back(loss);
        }
    }
    w.version = 1;
    return w;
}

}  // namespace stylelab
