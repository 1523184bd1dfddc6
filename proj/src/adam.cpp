#include "stylelab/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace stylelab {

namespace {

void apply_one(const AdamConfig& cfg, double bc1, double bc2, ParamTable& params,
               const ParamTable& grads, ParamTable& m_store, ParamTable& v_store) {
    for (auto& [name, p] : params) {
        auto git = grads.find(name);
        if (git == grads.end()) continue;
        const Tensor& g = git->second;
        if (!g.same_shape(p)) {
            throw std::invalid_argument("adam: gradient shape mismatch for " + name);
        }
        Tensor& m = m_store.try_emplace(name, Tensor(p.shape)).first->second;
        Tensor& v = v_store.try_emplace(name, Tensor(p.shape)).first->second;
        for (size_t i = 0; i < p.data.size(); ++i) {
            m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * g.data[i];
            v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            p.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace

void Adam::update(ParamTable& params, const ParamTable& grads) {
    update(std::vector<ParamTable*>{&params}, grads);
}

void Adam::update(const std::vector<ParamTable*>& tables, const ParamTable& grads) {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (ParamTable* t : tables) apply_one(cfg_, bc1, bc2, *t, grads, m_, v_);
}

}  // namespace stylelab
