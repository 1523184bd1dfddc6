#include "stylelab/features.hpp"

#include <cmath>
#include <stdexcept>

#include "stylelab/autodiff.hpp"

namespace stylelab {

FeatureExtractor::FeatureExtractor(uint64_t seed) : seed_(seed) {
    Rng rng(seed);
    auto he = [&rng](std::vector<int> shape) {
        const double fan_in = static_cast<double>(shape[1] * shape[2] * shape[3]);
        return Tensor::randn(std::move(shape), rng, std::sqrt(2.0 / fan_in));
    };
    weights_["f.c1.w"] = he({16, 3, 3, 3});
    weights_["f.c1.b"] = Tensor::zeros({16});
    weights_["f.c2.w"] = he({32, 16, 3, 3});
    weights_["f.c2.b"] = Tensor::zeros({32});
    weights_["f.c3.w"] = he({kDim, 32, 3, 3});
    weights_["f.c3.b"] = Tensor::zeros({kDim});
}

Tensor FeatureExtractor::features(const Tensor& image) const {
    if (image.rank() != 3 || image.dim(0) != 3 || image.dim(1) != 32 || image.dim(2) != 32) {
        throw std::invalid_argument("features: expected 3x32x32 image, got " + image.shape_str());
    }
    Tape tape;
    Tape::Id x = tape.leaf(image);
    auto w = [&](const char* n) { return tape.leaf(table_get(weights_, n)); };
    x = tape.silu(tape.conv2d(x, w("f.c1.w"), w("f.c1.b"), 2, 1));
    x = tape.silu(tape.conv2d(x, w("f.c2.w"), w("f.c2.b"), 2, 1));
    x = tape.silu(tape.conv2d(x, w("f.c3.w"), w("f.c3.b"), 2, 1));
    return tape.val(tape.gap(x));
}

Tensor FeatureExtractor::features_matrix(const std::vector<Tensor>& images) const {
    if (images.empty()) throw std::invalid_argument("features_matrix: empty image list");
    Tensor out({static_cast<int>(images.size()), kDim});
    for (size_t i = 0; i < images.size(); ++i) {
        Tensor f = features(images[i]);
        for (int j = 0; j < kDim; ++j) out.at(static_cast<int>(i), j) = f.at(j);
    }
    return out;
}

uint64_t FeatureExtractor::checksum() const { return table_checksum(weights_); }

}  // namespace stylelab
