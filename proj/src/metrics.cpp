#include "stylelab/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "stylelab/adam.hpp"
#include "stylelab/autodiff.hpp"
#include "stylelab/checkpoint.hpp"
#include "stylelab/errors.hpp"

namespace stylelab {

namespace {

Eigen::MatrixXd to_eigen(const Tensor& t) {
    Eigen::MatrixXd m(t.dim(0), t.dim(1));
    for (int i = 0; i < t.dim(0); ++i)
        for (int j = 0; j < t.dim(1); ++j) m(i, j) = t.at(i, j);
    return m;
}

void check_features(const Tensor& a, const Tensor& b, int min_rows, const char* op) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) {
        throw std::invalid_argument(std::string(op) + ": feature matrices must be n x d / m x d");
    }
    if (a.dim(0) < min_rows || b.dim(0) < min_rows) {
        throw std::invalid_argument(std::string(op) + ": need at least " +
                                    std::to_string(min_rows) + " samples per set");
    }
}

// PSD square root via eigendecomposition, negative eigenvalues clamped at 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) d(i) = d(i) > 0.0 ? std::sqrt(d(i)) : 0.0;
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double fid(const Tensor& features_a, const Tensor& features_b) {
    check_features(features_a, features_b, 2, "fid");
    const Eigen::MatrixXd a = to_eigen(features_a);
    const Eigen::MatrixXd b = to_eigen(features_b);
    const Eigen::VectorXd mu_a = a.colwise().mean();
    const Eigen::VectorXd mu_b = b.colwise().mean();
    const Eigen::MatrixXd ca =
        (a.rowwise() - mu_a.transpose()).transpose() * (a.rowwise() - mu_a.transpose()) /
        (a.rows() - 1.0);
    const Eigen::MatrixXd cb =
        (b.rowwise() - mu_b.transpose()).transpose() * (b.rowwise() - mu_b.transpose()) /
        (b.rows() - 1.0);
    const Eigen::MatrixXd sa = psd_sqrt(ca);
    // tr sqrt(Ca Cb) = tr sqrt(sa Cb sa), and sa Cb sa is symmetric PSD
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * ((sa * cb * sa) + (sa * cb * sa).transpose()));
    double tr_sqrt = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()(i);
        if (ev > 0.0) tr_sqrt += std::sqrt(ev);
    }
    const double d2 =
        (mu_a - mu_b).squaredNorm() + ca.trace() + cb.trace() - 2.0 * tr_sqrt;
    return d2 > 0.0 ? d2 : 0.0;
}

double kid(const Tensor& features_a, const Tensor& features_b) {
    check_features(features_a, features_b, 2, "kid");
    const int n = features_a.dim(0), m = features_b.dim(0), d = features_a.dim(1);
    auto kernel = [d](const Tensor& x, int i, const Tensor& y, int j) {
        double dot = 0.0;
        for (int k = 0; k < d; ++k) dot += x.at(i, k) * y.at(j, k);
        const double v = dot / d + 1.0;
        return v * v * v;
    };
    double within_a = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) within_a += kernel(features_a, i, features_a, j);
    double within_b = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) within_b += kernel(features_b, i, features_b, j);
    double cross = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) cross += kernel(features_a, i, features_b, j);
    return within_a / (static_cast<double>(n) * (n - 1)) +
           within_b / (static_cast<double>(m) * (m - 1)) -
           2.0 * cross / (static_cast<double>(n) * m);
}

// ------------------------------------------------------------ tower

namespace {

Tape::Id tower_image_node(Tape& tape, const ParamTable& p, const Tensor& image,
                          bool needs_grad, std::map<std::string, Tape::Id>* bound) {
    auto w = [&](const char* n) {
        if (bound) {
            auto it = bound->find(n);
            if (it != bound->end()) return it->second;
            Tape::Id id = tape.leaf(table_get(p, n), needs_grad);
            (*bound)[n] = id;
            return id;
        }
        return tape.leaf(table_get(p, n), needs_grad);
    };
    Tape::Id x = tape.leaf(image);
    x = tape.silu(tape.conv2d(x, w("tw.img.c1.w"), w("tw.img.c1.b"), 2, 1));
    x = tape.silu(tape.conv2d(x, w("tw.img.c2.w"), w("tw.img.c2.b"), 2, 1));
    x = tape.silu(tape.conv2d(x, w("tw.img.c3.w"), w("tw.img.c3.b"), 2, 1));
    Tape::Id pooled = tape.reshape(tape.gap(x), {1, 64});
    return tape.add_row_bias(tape.matmul(pooled, w("tw.img.proj.w")), w("tw.img.proj.b"));
}

Tape::Id tower_text_node(Tape& tape, const ParamTable& p, const std::vector<int>& tokens,
                         bool needs_grad, std::map<std::string, Tape::Id>* bound) {
    auto w = [&](const char* n) {
        if (bound) {
            auto it = bound->find(n);
            if (it != bound->end()) return it->second;
            Tape::Id id = tape.leaf(table_get(p, n), needs_grad);
            (*bound)[n] = id;
            return id;
        }
        return tape.leaf(table_get(p, n), needs_grad);
    };
    std::vector<int> ids = tokens;
    if (ids.empty()) ids.push_back(0);
    Tape::Id e = tape.embed(w("tw.txt.emb"), ids);  // L x 32
    // mean pool over tokens
    Tape::Id pooled = tape.gap(tape.reshape(tape.transpose(e), {AlignmentTower::kDim, 1,
                                                                static_cast<int>(ids.size())}));
    pooled = tape.reshape(pooled, {1, AlignmentTower::kDim});
    return tape.add_row_bias(tape.matmul(pooled, w("tw.txt.proj.w")), w("tw.txt.proj.b"));
}

}  // namespace

AlignmentTower AlignmentTower::train(const std::vector<BaseExample>& corpus, uint64_t seed,
                                     int steps, int batch, double lr,
                                     std::vector<double>* loss_trace) {
    if (corpus.size() < 2) throw std::invalid_argument("tower: corpus too small");
    AlignmentTower tower;
    Rng rng(seed);
    auto he = [&rng](std::vector<int> shape) {
        const double fan_in = static_cast<double>(shape[1] * shape[2] * shape[3]);
        return Tensor::randn(std::move(shape), rng, std::sqrt(2.0 / fan_in));
    };
    ParamTable& p = tower.params_;
    p["tw.img.c1.w"] = he({16, 3, 3, 3});
    p["tw.img.c1.b"] = Tensor::zeros({16});
    p["tw.img.c2.w"] = he({32, 16, 3, 3});
    p["tw.img.c2.b"] = Tensor::zeros({32});
    p["tw.img.c3.w"] = he({64, 32, 3, 3});
    p["tw.img.c3.b"] = Tensor::zeros({64});
    p["tw.img.proj.w"] = Tensor::randn({64, kDim}, rng, 0.05);
    p["tw.img.proj.b"] = Tensor::zeros({kDim});
    p["tw.txt.emb"] = Tensor::randn({Vocabulary().size(), kDim}, rng, 0.05);
    p["tw.txt.proj.w"] = Tensor::randn({kDim, kDim}, rng, 0.05);
    p["tw.txt.proj.b"] = Tensor::zeros({kDim});

    constexpr double kInvTemperature = 10.0;
    Adam adam(AdamConfig{lr});
    const int b_eff = std::min<int>(batch, static_cast<int>(corpus.size()));
    for (int step = 0; step < steps; ++step) {
        Tape tape;
        std::map<std::string, Tape::Id> bound;
        std::vector<Tape::Id> img_rows, txt_rows;
        for (int b = 0; b < b_eff; ++b) {
            const BaseExample& ex = corpus[rng.uniform_int(corpus.size())];
            img_rows.push_back(
                tape.reshape(tower_image_node(tape, p, ex.image, true, &bound), {kDim}));
            txt_rows.push_back(
                tape.reshape(tower_text_node(tape, p, ex.prompt.tokens, true, &bound), {kDim}));
        }
        Tape::Id vi = tape.l2norm_rows(tape.stack_rows(img_rows));
        Tape::Id vt = tape.l2norm_rows(tape.stack_rows(txt_rows));
        Tape::Id logits = tape.scale(tape.matmul(vi, tape.transpose(vt)), kInvTemperature);
        Tape::Id loss = tape.scale(tape.add(tape.softmax_xent_diag(logits),
                                            tape.softmax_xent_diag(tape.transpose(logits))),
                                   0.5);
        const double lv = tape.val(loss).at(0);
        if (!std::isfinite(lv)) throw NumericError("tower: non-finite loss");
        tape.backward(loss);
        ParamTable grads;
        for (const auto& [name, id] : bound) grads[name] = tape.grad(id);
        adam.update(p, grads);
        if (loss_trace) loss_trace->push_back(lv);
    }
    return tower;
}

Tensor AlignmentTower::embed_image(const Tensor& image) const {
    Tape tape;
    return Tensor({kDim},
                  tape.val(tower_image_node(tape, params_, image, false, nullptr)).data);
}

Tensor AlignmentTower::embed_text(const PromptSpec& prompt) const {
    Tape tape;
    return Tensor({kDim},
                  tape.val(tower_text_node(tape, params_, prompt.tokens, false, nullptr)).data);
}

void AlignmentTower::save(const std::string& path) const { save_table(params_, path); }

AlignmentTower AlignmentTower::load(const std::string& path) {
    AlignmentTower t;
    t.params_ = load_table(path);
    for (const char* required : {"tw.img.c1.w", "tw.img.proj.w", "tw.txt.emb", "tw.txt.proj.w"}) {
        if (!t.params_.count(required)) {
            throw FormatError(path + ": not an alignment tower (missing " +
                              std::string(required) + ")");
        }
    }
    return t;
}

double clip_score(const std::vector<Tensor>& images, const std::vector<PromptSpec>& prompts,
                  const AlignmentTower& tower) {
    if (images.size() != prompts.size()) {
        throw std::invalid_argument("clip_score: images/prompts length mismatch");
    }
    if (images.empty()) throw std::invalid_argument("clip_score: empty inputs");
    double total = 0.0;
    for (size_t i = 0; i < images.size(); ++i) {
        const Tensor vi = tower.embed_image(images[i]);
        const Tensor vt = tower.embed_text(prompts[i]);
        const double denom = std::sqrt(dot(vi, vi)) * std::sqrt(dot(vt, vt));
        const double cos = denom > 0.0 ? dot(vi, vt) / denom : 0.0;
        total += 100.0 * std::max(0.0, cos);
    }
    return total / static_cast<double>(images.size());
}

void write_metrics_csv(const std::vector<MetricReport>& reports, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write metrics '" + path + "'");
    os << "checkpoint_id,step,style_id,fid,kid_x1000,clip_score,n_generated,n_reference\n";
    char buf[256];
    for (const MetricReport& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%s,%.9g,%.9g,%.9g,%d,%d\n",
                      r.checkpoint_id.c_str(), r.step, r.style_id.c_str(), r.fid, r.kid * 1000.0,
                      r.clip_score, r.n_generated, r.n_reference);
        os << buf;
    }
}

}  // namespace stylelab
