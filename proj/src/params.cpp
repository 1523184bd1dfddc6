#include "stylelab/params.hpp"

#include <stdexcept>

namespace stylelab {

const Tensor& table_get(const ParamTable& t, const std::string& name) {
    auto it = t.find(name);
    if (it == t.end()) throw std::out_of_range("no tensor named '" + name + "'");
    return it->second;
}

Tensor& table_get(ParamTable& t, const std::string& name) {
    auto it = t.find(name);
    if (it == t.end()) throw std::out_of_range("no tensor named '" + name + "'");
    return it->second;
}

uint64_t table_checksum(const ParamTable& t) {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* p, size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& [name, tensor] : t) {
        mix(name.data(), name.size());
        for (double d : tensor.data) {
            float f = static_cast<float>(d);
            mix(&f, sizeof(f));
        }
    }
    return h;
}

bool table_all_finite(const ParamTable& t) {
    for (const auto& [name, tensor] : t) {
        if (!tensor.all_finite()) return false;
    }
    return true;
}

size_t table_param_count(const ParamTable& t) {
    size_t n = 0;
    for (const auto& [name, tensor] : t) n += tensor.numel();
    return n;
}

}  // namespace stylelab
