#include "stylelab/model.hpp"

#include <cmath>
#include <stdexcept>

#include "stylelab/errors.hpp"

namespace stylelab {

using D = ModelDims;

const Tensor& TrainableWeights::find(const std::string& name) const {
    if (auto it = theta.find(name); it != theta.end()) return it->second;
    if (auto it = phi.find(name); it != phi.end()) return it->second;
    if (auto it = frozen.find(name); it != frozen.end()) return it->second;
    throw std::out_of_range("no tensor named '" + name + "'");
}

TrainableWeights init_weights(uint64_t seed, int T) {
    TrainableWeights w;
    w.schedule = make_default_schedule(T);
    w.vocab = Vocabulary();
    Rng rng(seed);
    constexpr double kStd = 0.02;

    auto g = [&rng](std::vector<int> shape) { return Tensor::randn(std::move(shape), rng, kStd); };
    auto z = [](std::vector<int> shape) { return Tensor::zeros(std::move(shape)); };
    auto ones = [](int n) { return Tensor::full({n}, 1.0); };

    // autoencoder ("ae."), trained once by pretraining then frozen
    auto& f = w.frozen;
    f["ae.enc.c1.w"] = g({16, 3, 3, 3});
    f["ae.enc.c1.b"] = z({16});
    f["ae.enc.c2.w"] = g({32, 16, 3, 3});
    f["ae.enc.c2.b"] = z({32});
    f["ae.enc.c3.w"] = g({32, 32, 3, 3});
    f["ae.enc.c3.b"] = z({32});
    f["ae.enc.c4.w"] = g({D::kLatentC, 32, 3, 3});
    f["ae.enc.c4.b"] = z({D::kLatentC});
    f["ae.dec.c1.w"] = g({32, D::kLatentC, 3, 3});
    f["ae.dec.c1.b"] = z({32});
    f["ae.dec.c2.w"] = g({32, 32, 3, 3});
    f["ae.dec.c2.b"] = z({32});
    f["ae.dec.c3.w"] = g({16, 32, 3, 3});
    f["ae.dec.c3.b"] = z({16});
    f["ae.dec.c4.w"] = g({3, 16, 3, 3});
    f["ae.dec.c4.b"] = z({3});
    f["ae.lat.mean"] = z({D::kLatentC});
    f["ae.lat.std"] = Tensor::full({D::kLatentC}, 1.0);

    // text encoder ("text.")
    auto& p = w.phi;
    p["text.tok.emb"] = g({w.vocab.size(), D::kEmbedDim});
    p["text.pos.emb"] = g({D::kMaxPromptLen, D::kEmbedDim});
    p["text.ln1.g"] = ones(D::kEmbedDim);
    p["text.ln1.b"] = z({D::kEmbedDim});
    p["text.attn.wq"] = g({D::kEmbedDim, D::kEmbedDim});
    p["text.attn.wk"] = g({D::kEmbedDim, D::kEmbedDim});
    p["text.attn.wv"] = g({D::kEmbedDim, D::kEmbedDim});
    p["text.attn.wo"] = g({D::kEmbedDim, D::kEmbedDim});
    p["text.attn.bo"] = z({D::kEmbedDim});
    p["text.ln2.g"] = ones(D::kEmbedDim);
    p["text.ln2.b"] = z({D::kEmbedDim});
    p["text.proj.w"] = g({D::kEmbedDim, D::kEmbedDim});
    p["text.proj.b"] = z({D::kEmbedDim});

    // denoiser ("unet.")
    auto& t = w.theta;
    t["unet.in.w"] = g({D::kWidth0, D::kLatentC, 3, 3});
    t["unet.in.b"] = z({D::kWidth0});
    t["unet.temb.w1"] = g({D::kTimeDim, D::kTimeDim});
    t["unet.temb.b1"] = z({D::kTimeDim});
    t["unet.temb.s8a.w"] = g({D::kTimeDim, D::kWidth0});
    t["unet.temb.s8a.b"] = z({D::kWidth0});
    t["unet.temb.s4.w"] = g({D::kTimeDim, D::kWidth1});
    t["unet.temb.s4.b"] = z({D::kWidth1});
    t["unet.temb.s8b.w"] = g({D::kTimeDim, D::kWidth0});
    t["unet.temb.s8b.b"] = z({D::kWidth0});
    auto resblock = [&](const std::string& prefix, int c) {
        t[prefix + ".gn1.g"] = ones(c);
        t[prefix + ".gn1.b"] = z({c});
        t[prefix + ".conv1.w"] = g({c, c, 3, 3});
        t[prefix + ".conv1.b"] = z({c});
        t[prefix + ".gn2.g"] = ones(c);
        t[prefix + ".gn2.b"] = z({c});
        t[prefix + ".conv2.w"] = g({c, c, 3, 3});
        t[prefix + ".conv2.b"] = z({c});
    };
    resblock("unet.rb1", D::kWidth0);
    t["unet.attn.wq"] = g({D::kWidth0, D::kEmbedDim});
    t["unet.attn.wk"] = g({D::kEmbedDim, D::kEmbedDim});
    t["unet.attn.wv"] = g({D::kEmbedDim, D::kEmbedDim});
    t["unet.attn.wo"] = g({D::kEmbedDim, D::kWidth0});
    t["unet.attn.bo"] = z({D::kWidth0});
    t["unet.down.w"] = g({D::kWidth1, D::kWidth0, 3, 3});
    t["unet.down.b"] = z({D::kWidth1});
    resblock("unet.rb2", D::kWidth1);
    t["unet.up.w"] = g({D::kWidth0, D::kWidth0 + D::kWidth1, 3, 3});
    t["unet.up.b"] = z({D::kWidth0});
    resblock("unet.rb3", D::kWidth0);
    t["unet.out.w"] = z({D::kLatentC, D::kWidth0, 3, 3});  // zero-init output
    t["unet.out.b"] = z({D::kLatentC});
    return w;
}

Tensor time_embedding(int t) {
    constexpr int dim = D::kTimeDim;
    constexpr int half = dim / 2;
    Tensor e({1, dim});
    for (int i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * i / (half - 1));
        e.at(0, i) = std::sin(t * freq);
        e.at(0, half + i) = std::cos(t * freq);
    }
    return e;
}

Binder::Binder(Tape& tape, const TrainableWeights& w, bool train_mode, bool grad_frozen)
    : tape_(tape), w_(w), train_(train_mode), grad_frozen_(grad_frozen) {}

Tape::Id Binder::operator()(const std::string& name) {
    if (auto it = bound_.find(name); it != bound_.end()) return it->second;
    bool needs_grad = false;
    const Tensor* src = nullptr;
    if (auto it = w_.theta.find(name); it != w_.theta.end()) {
        src = &it->second;
        needs_grad = train_;
    } else if (auto it2 = w_.phi.find(name); it2 != w_.phi.end()) {
        src = &it2->second;
        needs_grad = train_;
    } else if (auto it3 = w_.frozen.find(name); it3 != w_.frozen.end()) {
        src = &it3->second;
        needs_grad = grad_frozen_;
    } else {
        throw std::out_of_range("binder: no tensor named '" + name + "'");
    }
    Tape::Id id = tape_.leaf(*src, needs_grad);
    bound_[name] = id;
    return id;
}

ParamTable Binder::collect_grads() const {
    ParamTable out;
    for (const auto& [name, id] : bound_) {
        if (tape_.needs_grad(id)) out[name] = tape_.grad(id);
    }
    return out;
}

namespace {

// Broadcast per-channel stats to a C x H x W constant.
Tensor bcast_channels(const Tensor& per_chan, int h, int w,
                      const std::function<double(double)>& f) {
    const int c = per_chan.dim(0);
    Tensor out({c, h, w});
    for (int ci = 0; ci < c; ++ci) {
        const double v = f(per_chan.at(ci));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.at(ci, y, x) = v;
    }
    return out;
}

}  // namespace

Tape::Id encode_image_node(Tape& tape, Binder& bind, const Tensor& image) {
    if (image.rank() != 3 || image.dim(0) != D::kImageC || image.dim(1) != D::kImageHW ||
        image.dim(2) != D::kImageHW) {
        throw std::invalid_argument("encode_image: expected 3x32x32 image, got " +
                                    image.shape_str());
    }
    Tape::Id x = tape.leaf(image);
    x = tape.silu(tape.conv2d(x, bind("ae.enc.c1.w"), bind("ae.enc.c1.b"), 1, 1));
    x = tape.silu(tape.conv2d(x, bind("ae.enc.c2.w"), bind("ae.enc.c2.b"), 2, 1));
    x = tape.silu(tape.conv2d(x, bind("ae.enc.c3.w"), bind("ae.enc.c3.b"), 2, 1));
    x = tape.conv2d(x, bind("ae.enc.c4.w"), bind("ae.enc.c4.b"), 1, 1);
    // z = (raw - mean) / std with frozen corpus statistics (identity until
    // pretraining fills them in)
    const Tensor& mean = tape.val(bind("ae.lat.mean"));
    const Tensor& stdv = tape.val(bind("ae.lat.std"));
    Tape::Id neg_mean = tape.leaf(
        bcast_channels(mean, D::kLatentHW, D::kLatentHW, [](double v) { return -v; }));
    Tape::Id inv_std = tape.leaf(
        bcast_channels(stdv, D::kLatentHW, D::kLatentHW, [](double v) { return 1.0 / v; }));
    return tape.mul(tape.add(x, neg_mean), inv_std);
}

Tape::Id decode_latent_node(Tape& tape, Binder& bind, Tape::Id z) {
    const Tensor& mean = tape.val(bind("ae.lat.mean"));
    const Tensor& stdv = tape.val(bind("ae.lat.std"));
    Tape::Id mean_b = tape.leaf(
        bcast_channels(mean, D::kLatentHW, D::kLatentHW, [](double v) { return v; }));
    Tape::Id std_b = tape.leaf(
        bcast_channels(stdv, D::kLatentHW, D::kLatentHW, [](double v) { return v; }));
    Tape::Id x = tape.add(tape.mul(z, std_b), mean_b);
    x = tape.silu(tape.conv2d(x, bind("ae.dec.c1.w"), bind("ae.dec.c1.b"), 1, 1));
    x = tape.upsample2x(x);
    x = tape.silu(tape.conv2d(x, bind("ae.dec.c2.w"), bind("ae.dec.c2.b"), 1, 1));
    x = tape.upsample2x(x);
    x = tape.silu(tape.conv2d(x, bind("ae.dec.c3.w"), bind("ae.dec.c3.b"), 1, 1));
    x = tape.sigmoid(tape.conv2d(x, bind("ae.dec.c4.w"), bind("ae.dec.c4.b"), 1, 1));
    return x;
}

Tape::Id text_encode_node(Tape& tape, Binder& bind, const std::vector<int>& tokens) {
    // empty prompt encodes the reserved null-token sequence (the guidance
    // "unconditional" branch)
    std::vector<int> ids = tokens;
    if (ids.empty()) ids.push_back(0);
    if (static_cast<int>(ids.size()) > D::kMaxPromptLen) {
        throw std::invalid_argument("text_encode: prompt longer than " +
                                    std::to_string(D::kMaxPromptLen) + " tokens");
    }
    const int len = static_cast<int>(ids.size());
    std::vector<int> pos(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) pos[static_cast<size_t>(i)] = i;

    Tape::Id x = tape.add(tape.embed(bind("text.tok.emb"), ids),
                          tape.embed(bind("text.pos.emb"), pos));
    // single self-attention block with pre-norm and residual
    Tape::Id h = tape.layernorm_rows(x, bind("text.ln1.g"), bind("text.ln1.b"));
    Tape::Id q = tape.matmul(h, bind("text.attn.wq"));
    Tape::Id k = tape.matmul(h, bind("text.attn.wk"));
    Tape::Id v = tape.matmul(h, bind("text.attn.wv"));
    const double scale = 1.0 / std::sqrt(static_cast<double>(D::kEmbedDim));
    Tape::Id att = tape.softmax_rows(tape.scale(tape.matmul(q, tape.transpose(k)), scale));
    Tape::Id o = tape.add_row_bias(tape.matmul(tape.matmul(att, v), bind("text.attn.wo")),
                                   bind("text.attn.bo"));
    x = tape.add(x, o);
    // per-token projection
    Tape::Id h2 = tape.layernorm_rows(x, bind("text.ln2.g"), bind("text.ln2.b"));
    return tape.add_row_bias(tape.matmul(h2, bind("text.proj.w")), bind("text.proj.b"));
}

namespace {

Tape::Id resblock_node(Tape& tape, Binder& bind, Tape::Id x, const std::string& prefix) {
    Tape::Id h = tape.group_norm(x, D::kGnGroups, bind(prefix + ".gn1.g"), bind(prefix + ".gn1.b"));
    h = tape.conv2d(tape.silu(h), bind(prefix + ".conv1.w"), bind(prefix + ".conv1.b"), 1, 1);
    h = tape.group_norm(h, D::kGnGroups, bind(prefix + ".gn2.g"), bind(prefix + ".gn2.b"));
    h = tape.conv2d(tape.silu(h), bind(prefix + ".conv2.w"), bind(prefix + ".conv2.b"), 1, 1);
    return tape.add(x, h);
}

// Time-embedding channel bias for one stage: row(1 x C) -> vector(C).
Tape::Id stage_time_bias(Tape& tape, Binder& bind, Tape::Id th, const std::string& stage, int c) {
    Tape::Id row = tape.add_row_bias(tape.matmul(th, bind("unet.temb." + stage + ".w")),
                                     bind("unet.temb." + stage + ".b"));
    return tape.reshape(row, {c});
}

}  // namespace

DenoiseNodes denoise_node(Tape& tape, Binder& bind, Tape::Id z_t, int t, Tape::Id cond,
                          bool capture_attention) {
    const Tensor& zv = tape.val(z_t);
    if (zv.rank() != 3 || zv.dim(0) != D::kLatentC || zv.dim(1) != D::kLatentHW ||
        zv.dim(2) != D::kLatentHW) {
        throw std::invalid_argument("denoise: expected 4x8x8 latent, got " + zv.shape_str());
    }
    Tape::Id temb = tape.leaf(time_embedding(t));
    Tape::Id th = tape.silu(
        tape.add_row_bias(tape.matmul(temb, bind("unet.temb.w1")), bind("unet.temb.b1")));

    Tape::Id h = tape.conv2d(z_t, bind("unet.in.w"), bind("unet.in.b"), 1, 1);
    h = tape.add_chan_bias(h, stage_time_bias(tape, bind, th, "s8a", D::kWidth0));
    h = resblock_node(tape, bind, h, "unet.rb1");

    // cross-attention at the 8x8 resolution: spatial queries attend to c
    Tape::Id rows = tape.chw_to_rows(h);
    Tape::Id q = tape.matmul(rows, bind("unet.attn.wq"));
    Tape::Id k = tape.matmul(cond, bind("unet.attn.wk"));
    Tape::Id v = tape.matmul(cond, bind("unet.attn.wv"));
    const double scale = 1.0 / std::sqrt(static_cast<double>(D::kEmbedDim));
    Tape::Id att = tape.softmax_rows(tape.scale(tape.matmul(q, tape.transpose(k)), scale));
    Tape::Id o = tape.add_row_bias(tape.matmul(tape.matmul(att, v), bind("unet.attn.wo")),
                                   bind("unet.attn.bo"));
    Tape::Id skip = tape.add(h, tape.rows_to_chw(o, D::kWidth0, D::kLatentHW, D::kLatentHW));

    Tape::Id d = tape.conv2d(skip, bind("unet.down.w"), bind("unet.down.b"), 2, 1);
    d = tape.add_chan_bias(d, stage_time_bias(tape, bind, th, "s4", D::kWidth1));
    d = resblock_node(tape, bind, d, "unet.rb2");

    Tape::Id u = tape.concat_ch(tape.upsample2x(d), skip);
    u = tape.conv2d(u, bind("unet.up.w"), bind("unet.up.b"), 1, 1);
    u = tape.add_chan_bias(u, stage_time_bias(tape, bind, th, "s8b", D::kWidth0));
    u = resblock_node(tape, bind, u, "unet.rb3");

    DenoiseNodes out;
    out.eps = tape.conv2d(u, bind("unet.out.w"), bind("unet.out.b"), 1, 1);
    if (capture_attention) out.attention = att;
    return out;
}

LatentCode encode_image(const TrainableWeights& w, const Tensor& image) {
    Tape tape;
    Binder bind(tape, w, false);
    Tape::Id z = encode_image_node(tape, bind, image);
    LatentCode out;
    out.data = tape.val(z);
    out.timestep = 0;
    return out;
}

Tensor decode_latent(const TrainableWeights& w, const LatentCode& z) {
    Tape tape;
    Binder bind(tape, w, false);
    Tape::Id img = decode_latent_node(tape, bind, tape.leaf(z.data));
    return tape.val(img);
}

ConditioningVector text_encode(const TrainableWeights& w, const PromptSpec& prompt) {
    Tape tape;
    Binder bind(tape, w, false);
    Tape::Id c = text_encode_node(tape, bind, prompt.tokens);
    return ConditioningVector{tape.val(c)};
}

std::pair<NoiseSample, std::optional<AttentionMap>> denoise(const TrainableWeights& w,
                                                            const LatentCode& z_t, int t,
                                                            const ConditioningVector& c,
                                                            bool capture_attention) {
    if (t < 0 || t > w.schedule.T) {
        throw std::invalid_argument("denoise: t out of range");
    }
    Tape tape;
    Binder bind(tape, w, false);
    Tape::Id cond = tape.leaf(c.tokens_embedded);
    DenoiseNodes nodes = denoise_node(tape, bind, tape.leaf(z_t.data), t, cond,
                                      capture_attention);
    NoiseSample eps{tape.val(nodes.eps)};
    std::optional<AttentionMap> attn;
    if (capture_attention) {
        const Tensor& a = tape.val(nodes.attention);  // (HW) x L
        const int L = a.dim(1);
        AttentionMap m;
        m.timestep = t;
        m.per_token = Tensor({L, D::kLatentHW, D::kLatentHW});
        for (int tok = 0; tok < L; ++tok)
            for (int y = 0; y < D::kLatentHW; ++y)
                for (int x = 0; x < D::kLatentHW; ++x)
                    m.per_token.at(tok, y, x) = a.at(y * D::kLatentHW + x, tok);
        attn = std::move(m);
    }
    return {std::move(eps), std::move(attn)};
}

ParamTable gradients(const TrainableWeights& w, const LossClosure& closure, double* loss_out) {
    Tape tape;
    Binder bind(tape, w, true);
    Tape::Id loss = closure(tape, bind);
    const double value = tape.val(loss).at(0);
    if (!std::isfinite(value)) {
        throw NumericError("gradients: non-finite loss (" + std::to_string(value) + ")");
    }
    tape.backward(loss);
    if (loss_out) *loss_out = value;
    ParamTable grads = bind.collect_grads();
    // parameters the closure never touched still get (zero) gradients
    for (const auto& [name, tensor] : w.theta) {
        if (!grads.count(name)) grads[name] = Tensor(tensor.shape);
    }
    for (const auto& [name, tensor] : w.phi) {
        if (!grads.count(name)) grads[name] = Tensor(tensor.shape);
    }
    return grads;
}

}  // namespace stylelab
