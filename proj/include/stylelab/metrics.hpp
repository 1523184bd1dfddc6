#pragma once

#include <string>
#include <vector>

#include "stylelab/dataset.hpp"
#include "stylelab/params.hpp"
#include "stylelab/tensor.hpp"
#include "stylelab/vocab.hpp"

namespace stylelab {

// Frechet distance between Gaussian fits of two feature sets (rows are
// samples). Covariances use 1/(n-1); the matrix square root comes from the
// eigendecomposition of the symmetrized product with negative eigenvalues
// clamped at zero.
double fid(const Tensor& features_a, const Tensor& features_b);

// Unbiased squared MMD with the polynomial kernel k(x, y) = (x.y/d + 1)^3
// (within-set diagonals excluded). Reported x1000 in metric tables.
double kid(const Tensor& features_a, const Tensor& features_b);

// Two-tower image/text embedder trained contrastively on the base corpus;
// clip-style alignment = mean over pairs of 100 * max(0, cosine).
class AlignmentTower {
 public:
    static constexpr int kDim = 32;

    static AlignmentTower train(const std::vector<BaseExample>& corpus, uint64_t seed,
                                int steps = 1500, int batch = 16, double lr = 1e-3,
                                std::vector<double>* loss_trace = nullptr);

    Tensor embed_image(const Tensor& image) const;      // 32, not normalized
    Tensor embed_text(const PromptSpec& prompt) const;  // 32, not normalized

    void save(const std::string& path) const;
    static AlignmentTower load(const std::string& path);

 private:
    AlignmentTower() = default;
    ParamTable params_;
};

double clip_score(const std::vector<Tensor>& images, const std::vector<PromptSpec>& prompts,
                  const AlignmentTower& tower);

struct MetricReport {
    double fid = 0.0;
    double kid = 0.0;  // raw estimator; CSV column carries kid * 1000
    double clip_score = 0.0;
    int n_generated = 0;
    int n_reference = 0;
    std::string style_id;
    std::string checkpoint_id;
    std::string prompt_set_id;
    int step = 0;
};

// metrics.csv: checkpoint_id,step,style_id,fid,kid_x1000,clip_score,
// n_generated,n_reference
void write_metrics_csv(const std::vector<MetricReport>& reports, const std::string& path);

}  // namespace stylelab
