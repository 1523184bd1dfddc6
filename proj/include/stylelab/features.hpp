#pragma once

#include <vector>

#include "stylelab/params.hpp"
#include "stylelab/tensor.hpp"

namespace stylelab {

// Fixed random convolutional features for FID/KID: three stride-2 stages,
// global average pool, 64-d output. Weights derive from the seed and never
// change, so feature spaces are comparable across runs.
class FeatureExtractor {
 public:
    static constexpr int kDim = 64;
    static constexpr uint64_t kDefaultSeed = 90210;

    explicit FeatureExtractor(uint64_t seed = kDefaultSeed);

    Tensor features(const Tensor& image) const;                     // 64
    Tensor features_matrix(const std::vector<Tensor>& images) const;  // n x 64

    uint64_t seed() const { return seed_; }
    uint64_t checksum() const;

 private:
    uint64_t seed_;
    ParamTable weights_;
};

}  // namespace stylelab
