#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stylelab/tensor.hpp"

namespace stylelab {

// Eager reverse-mode tape. Every op computes its value immediately and
// records a backward closure; backward() walks the tape in reverse. One tape
// per loss evaluation; nodes are append-only.
//
// Nonlinearities are smooth (silu/sigmoid/softmax/norms) so central finite
// differences converge cleanly; gradient correctness for every op is pinned
// by the finite-difference tests.
class Tape {
 public:
    using Id = int32_t;

    Id leaf(Tensor value, bool needs_grad = false);

    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id mul(Id a, Id b);
    Id scale(Id a, double s);
    // a + s*b (shapes equal)
    Id add_scaled(Id a, Id b, double s);

    // (n x k) * (k x m) -> (n x m)
    Id matmul(Id a, Id b);
    Id transpose(Id a);
    // a: n x m, bias: m
    Id add_row_bias(Id a, Id bias);
    // x: C x H x W, bias: C
    Id add_chan_bias(Id x, Id bias);

    // x: Cin x H x W, w: Cout x Cin x kh x kw, b: Cout
    Id conv2d(Id x, Id w, Id b, int stride, int pad);
    Id upsample2x(Id x);
    Id concat_ch(Id a, Id b);
    // global average pool C x H x W -> C
    Id gap(Id x);

    Id silu(Id x);
    Id sigmoid(Id x);
    Id softmax_rows(Id x);
    Id layernorm_rows(Id x, Id gain, Id bias);
    Id group_norm(Id x, int groups, Id gain, Id bias);
    Id l2norm_rows(Id x);

    // table: V x d, ids index rows -> out: len(ids) x d
    Id embed(Id table, const std::vector<int>& ids);

    // stack n vectors of shape {d} (or {1,d}) into an n x d matrix
    Id stack_rows(const std::vector<Id>& rows);

    // C x H x W -> (H*W) x C and back
    Id chw_to_rows(Id x);
    Id rows_to_chw(Id x, int C, int H, int W);
    // same data, new shape (numel preserved)
    Id reshape(Id x, std::vector<int> shape);

    // scalar (shape {1}) ops
    Id mean_sq_diff(Id a, Id b);
    // mean over rows of (logsumexp(row) - row[diag]); logits: n x n
    Id softmax_xent_diag(Id logits);

    const Tensor& val(Id id) const { return nodes_[static_cast<size_t>(id)].value; }
    const Tensor& grad(Id id) const { return nodes_[static_cast<size_t>(id)].grad; }
    bool needs_grad(Id id) const { return nodes_[static_cast<size_t>(id)].needs_grad; }

    // Seeds d(loss)/d(loss) = 1 and accumulates grads; loss must be shape {1}.
    void backward(Id loss);

    size_t size() const { return nodes_.size(); }

 private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool needs_grad = false;
        std::function<void(Tape&)> back;  // null for leaves
    };

    Id push(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
    Tensor& grad_mut(Id id) { return nodes_[static_cast<size_t>(id)].grad; }

    std::vector<Node> nodes_;
};

}  // namespace stylelab
