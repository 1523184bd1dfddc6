#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "stylelab/rng.hpp"

namespace stylelab {

// Dense row-major tensor of doubles. Rank 0..4 is all this project needs.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(numel_of(shape), 0.0) {}
    Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {}

    static size_t numel_of(const std::vector<int>& s) {
        size_t n = 1;
        for (int d : s) n *= static_cast<size_t>(d);
        return n;
    }

    size_t numel() const { return data.size(); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }
    int rank() const { return static_cast<int>(shape.size()); }

    double& at(int i) { return data[static_cast<size_t>(i)]; }
    double at(int i) const { return data[static_cast<size_t>(i)]; }
    // (row, col) for rank 2
    double& at(int i, int j) { return data[static_cast<size_t>(i) * shape[1] + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * shape[1] + j]; }
    // (chan, row, col) for rank 3
    double& at(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * shape[1] + y) * shape[2] + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * shape[1] + y) * shape[2] + x];
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
    static Tensor full(std::vector<int> s, double v) {
        Tensor t(std::move(s));
        for (double& x : t.data) x = v;
        return t;
    }
    static Tensor randn(std::vector<int> s, Rng& rng, double std_dev = 1.0) {
        Tensor t(std::move(s));
        for (double& x : t.data) x = std_dev * rng.normal();
        return t;
    }

    bool all_finite() const;
    std::string shape_str() const;
};

// Elementwise helpers used outside the autodiff tape (sampler, metrics).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
// a*sa + b*sb, shapes must match
Tensor axpby(double sa, const Tensor& a, double sb, const Tensor& b);
double mean_sq(const Tensor& a);
double dot(const Tensor& a, const Tensor& b);

}  // namespace stylelab
