#pragma once

#include "stylelab/params.hpp"

namespace stylelab {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction. Moment tables are keyed by parameter name and
// created lazily on the first update.
class Adam {
 public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void update(ParamTable& params, const ParamTable& grads);
    // One optimizer step across several disjoint tables (theta + phi).
    void update(const std::vector<ParamTable*>& tables, const ParamTable& grads);
    int64_t step_count() const { return step_; }

 private:
    AdamConfig cfg_;
    ParamTable m_, v_;
    int64_t step_ = 0;
};

}  // namespace stylelab
