#include "stylelab/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace stylelab {

bool Tensor::all_finite() const {
    for (double x : data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::string Tensor::shape_str() const {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

static void check_same(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
    }
}

Tensor add(const Tensor& a, const Tensor& b) {
    check_same(a, b, "add");
    Tensor out(a.shape);
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same(a, b, "sub");
    Tensor out(a.shape);
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

Tensor scale(const Tensor& a, double s) {
    Tensor out(a.shape);
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * s;
    return out;
}

Tensor axpby(double sa, const Tensor& a, double sb, const Tensor& b) {
    check_same(a, b, "axpby");
    Tensor out(a.shape);
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = sa * a.data[i] + sb * b.data[i];
    return out;
}

double mean_sq(const Tensor& a) {
    if (a.data.empty()) return 0.0;
    double s = 0.0;
    for (double x : a.data) s += x * x;
    return s / static_cast<double>(a.data.size());
}

double dot(const Tensor& a, const Tensor& b) {
    check_same(a, b, "dot");
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

}  // namespace stylelab
