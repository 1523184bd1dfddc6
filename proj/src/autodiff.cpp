#include "stylelab/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace stylelab {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("tape: " + msg);
}

double sigmoid_d(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Tape::Id Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::leaf(Tensor value, bool needs_grad) {
    return push(std::move(value), needs_grad, nullptr);
}

Tape::Id Tape::add(Id a, Id b) {
    require(val(a).same_shape(val(b)), "add shape mismatch");
    Tensor out(val(a).shape);
    const Tensor &va = val(a), &vb = val(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = va.data[i] + vb.data[i];
    bool ng = needs_grad(a) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, b, id](Tape& t) {
            const Tensor& g = t.grad(id);
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);
                for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& gb = t.grad_mut(b);
                for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] += g.data[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::sub(Id a, Id b) {
    require(val(a).same_shape(val(b)), "sub shape mismatch");
    Tensor out(val(a).shape);
    const Tensor &va = val(a), &vb = val(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = va.data[i] - vb.data[i];
    bool ng = needs_grad(a) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, b, id](Tape& t) {
            const Tensor& g = t.grad(id);
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);
                for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& gb = t.grad_mut(b);
                for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] -= g.data[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::mul(Id a, Id b) {
    require(val(a).same_shape(val(b)), "mul shape mismatch");
    Tensor out(val(a).shape);
    const Tensor &va = val(a), &vb = val(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = va.data[i] * vb.data[i];
    bool ng = needs_grad(a) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, b, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor &va2 = t.val(a), &vb2 = t.val(b);
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);
                for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * vb2.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& gb = t.grad_mut(b);
                for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] += g.data[i] * va2.data[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::scale(Id a, double s) {
    Tensor out(val(a).shape);
    const Tensor& va = val(a);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = va.data[i] * s;
    bool ng = needs_grad(a);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, s, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& ga = t.grad_mut(a);
            for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * s;
        };
    }
    return id;
}

Tape::Id Tape::add_scaled(Id a, Id b, double s) {
    require(val(a).same_shape(val(b)), "add_scaled shape mismatch");
    Tensor out(val(a).shape);
    const Tensor &va = val(a), &vb = val(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = va.data[i] + s * vb.data[i];
    bool ng = needs_grad(a) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, b, s, id](Tape& t) {
            const Tensor& g = t.grad(id);
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);
                for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& gb = t.grad_mut(b);
                for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] += s * g.data[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::matmul(Id a, Id b) {
    const Tensor &va = val(a), &vb = val(b);
    require(va.rank() == 2 && vb.rank() == 2 && va.dim(1) == vb.dim(0), "matmul shapes");
    const int n = va.dim(0), k = va.dim(1), m = vb.dim(1);
    Tensor out({n, m});
    for (int i = 0; i < n; ++i) {
        for (int p = 0; p < k; ++p) {
            const double aip = va.at(i, p);
            for (int j = 0; j < m; ++j) out.at(i, j) += aip * vb.at(p, j);
        }
    }
    bool ng = needs_grad(a) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, b, n, k, m, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor &va2 = t.val(a), &vb2 = t.val(b);
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);  // g * b^T
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) {
                        const double gij = g.at(i, j);
                        for (int p = 0; p < k; ++p) ga.at(i, p) += gij * vb2.at(p, j);
                    }
            }
            if (t.needs_grad(b)) {
                Tensor& gb = t.grad_mut(b);  // a^T * g
                for (int i = 0; i < n; ++i)
                    for (int p = 0; p < k; ++p) {
                        const double aip = va2.at(i, p);
                        for (int j = 0; j < m; ++j) gb.at(p, j) += aip * g.at(i, j);
                    }
            }
        };
    }
    return id;
}

Tape::Id Tape::transpose(Id a) {
    const Tensor& va = val(a);
    require(va.rank() == 2, "transpose rank");
    const int n = va.dim(0), m = va.dim(1);
    Tensor out({m, n});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) out.at(j, i) = va.at(i, j);
    bool ng = needs_grad(a);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, n, m, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& ga = t.grad_mut(a);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) ga.at(i, j) += g.at(j, i);
        };
    }
    return id;
}

Tape::Id Tape::add_row_bias(Id a, Id bias) {
    const Tensor &va = val(a), &vb = val(bias);
    require(va.rank() == 2 && vb.rank() == 1 && vb.dim(0) == va.dim(1), "add_row_bias shapes");
    const int n = va.dim(0), m = va.dim(1);
    Tensor out(va.shape);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) out.at(i, j) = va.at(i, j) + vb.at(j);
    bool ng = needs_grad(a) || needs_grad(bias);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, bias, n, m, id](Tape& t) {
            const Tensor& g = t.grad(id);
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);
                for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
            }
            if (t.needs_grad(bias)) {
                Tensor& gb = t.grad_mut(bias);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) gb.at(j) += g.at(i, j);
            }
        };
    }
    return id;
}

Tape::Id Tape::add_chan_bias(Id x, Id bias) {
    const Tensor &vx = val(x), &vb = val(bias);
    require(vx.rank() == 3 && vb.rank() == 1 && vb.dim(0) == vx.dim(0), "add_chan_bias shapes");
    const int C = vx.dim(0), H = vx.dim(1), W = vx.dim(2);
    Tensor out(vx.shape);
    for (int c = 0; c < C; ++c) {
        const double bc = vb.at(c);
        for (int y = 0; y < H; ++y)
            for (int xx = 0; xx < W; ++xx) out.at(c, y, xx) = vx.at(c, y, xx) + bc;
    }
    bool ng = needs_grad(x) || needs_grad(bias);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, bias, C, H, W, id](Tape& t) {
            const Tensor& g = t.grad(id);
            if (t.needs_grad(x)) {
                Tensor& gx = t.grad_mut(x);
                for (size_t i = 0; i < g.data.size(); ++i) gx.data[i] += g.data[i];
            }
            if (t.needs_grad(bias)) {
                Tensor& gb = t.grad_mut(bias);
                for (int c = 0; c < C; ++c) {
                    double s = 0.0;
                    for (int y = 0; y < H; ++y)
                        for (int xx = 0; xx < W; ++xx) s += g.at(c, y, xx);
                    gb.at(c) += s;
                }
            }
        };
    }
    return id;
}

namespace {

// Input copied into a zero-padded buffer so the hot loops are branch-free.
std::vector<double> pad_input(const Tensor& x, int pad) {
    const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int Hp = H + 2 * pad, Wp = W + 2 * pad;
    std::vector<double> buf(static_cast<size_t>(C) * Hp * Wp, 0.0);
    for (int c = 0; c < C; ++c) {
        for (int y = 0; y < H; ++y) {
            const double* src = &x.data[(static_cast<size_t>(c) * H + y) * W];
            double* dst = &buf[(static_cast<size_t>(c) * Hp + y + pad) * Wp + pad];
            std::copy(src, src + W, dst);
        }
    }
    return buf;
}

}  // namespace

Tape::Id Tape::conv2d(Id x, Id w, Id b, int stride, int pad) {
    const Tensor &vx = val(x), &vw = val(w), &vb = val(b);
    require(vx.rank() == 3 && vw.rank() == 4, "conv2d ranks");
    require(vw.dim(1) == vx.dim(0), "conv2d channel mismatch");
    require(vb.rank() == 1 && vb.dim(0) == vw.dim(0), "conv2d bias shape");
    const int Cin = vx.dim(0), H = vx.dim(1), W = vx.dim(2);
    const int Cout = vw.dim(0), kh = vw.dim(2), kw = vw.dim(3);
    const int Ho = (H + 2 * pad - kh) / stride + 1;
    const int Wo = (W + 2 * pad - kw) / stride + 1;
    const int Hp = H + 2 * pad, Wp = W + 2 * pad;
    require(Ho >= 1 && Wo >= 1, "conv2d output empty");
    const std::vector<double> xp = pad_input(vx, pad);
    Tensor out({Cout, Ho, Wo});
    for (int oc = 0; oc < Cout; ++oc) {
        double* orow_base = &out.data[static_cast<size_t>(oc) * Ho * Wo];
        const double bias = vb.at(oc);
        for (size_t i = 0; i < static_cast<size_t>(Ho) * Wo; ++i) orow_base[i] = bias;
        for (int ic = 0; ic < Cin; ++ic) {
            const double* wbase = &vw.data[(static_cast<size_t>(oc) * Cin + ic) * kh * kw];
            const double* xbase = &xp[static_cast<size_t>(ic) * Hp * Wp];
            for (int oy = 0; oy < Ho; ++oy) {
                double* orow = orow_base + static_cast<size_t>(oy) * Wo;
                for (int ky = 0; ky < kh; ++ky) {
                    const double* xrow = xbase + static_cast<size_t>(oy * stride + ky) * Wp;
                    const double* wrow = wbase + static_cast<size_t>(ky) * kw;
                    for (int ox = 0; ox < Wo; ++ox) {
                        const double* xpix = xrow + ox * stride;
                        double acc = 0.0;
                        for (int kx = 0; kx < kw; ++kx) acc += xpix[kx] * wrow[kx];
                        orow[ox] += acc;
                    }
                }
            }
        }
    }
    bool ng = needs_grad(x) || needs_grad(w) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, w, b, stride, pad, Cin, H, W, Cout, kh, kw, Ho, Wo, Hp, Wp,
                              id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor &vx2 = t.val(x), &vw2 = t.val(w);
            const bool gx_on = t.needs_grad(x), gw_on = t.needs_grad(w), gb_on = t.needs_grad(b);
            const std::vector<double> xp = pad_input(vx2, pad);
            std::vector<double> gxp(gx_on ? xp.size() : 0, 0.0);
            Tensor* gw = gw_on ? &t.grad_mut(w) : nullptr;
            Tensor* gb = gb_on ? &t.grad_mut(b) : nullptr;
            for (int oc = 0; oc < Cout; ++oc) {
                const double* grow_base = &g.data[static_cast<size_t>(oc) * Ho * Wo];
                if (gb_on) {
                    double s = 0.0;
                    for (size_t i = 0; i < static_cast<size_t>(Ho) * Wo; ++i) s += grow_base[i];
                    gb->at(oc) += s;
                }
                for (int ic = 0; ic < Cin; ++ic) {
                    const size_t woff = (static_cast<size_t>(oc) * Cin + ic) * kh * kw;
                    const double* xbase = &xp[static_cast<size_t>(ic) * Hp * Wp];
                    double* gxbase = gx_on ? &gxp[static_cast<size_t>(ic) * Hp * Wp] : nullptr;
                    for (int oy = 0; oy < Ho; ++oy) {
                        const double* grow = grow_base + static_cast<size_t>(oy) * Wo;
                        for (int ky = 0; ky < kh; ++ky) {
                            const double* xrow = xbase + static_cast<size_t>(oy * stride + ky) * Wp;
                            double* gxrow = gx_on
                                                ? gxbase + static_cast<size_t>(oy * stride + ky) * Wp
                                                : nullptr;
                            double* gwrow = gw_on ? &gw->data[woff + static_cast<size_t>(ky) * kw]
                                                  : nullptr;
                            const double* wrow = &vw2.data[woff + static_cast<size_t>(ky) * kw];
                            for (int ox = 0; ox < Wo; ++ox) {
                                const double go = grow[ox];
                                if (go == 0.0) continue;
                                const double* xpix = xrow + ox * stride;
                                if (gw_on) {
                                    for (int kx = 0; kx < kw; ++kx) gwrow[kx] += go * xpix[kx];
                                }
                                if (gx_on) {
                                    double* gxpix = gxrow + ox * stride;
                                    for (int kx = 0; kx < kw; ++kx) gxpix[kx] += go * wrow[kx];
                                }
                            }
                        }
                    }
                }
            }
            if (gx_on) {  // fold padded grad back
                Tensor& gx = t.grad_mut(x);
                for (int c = 0; c < Cin; ++c) {
                    for (int y = 0; y < H; ++y) {
                        const double* src = &gxp[(static_cast<size_t>(c) * Hp + y + pad) * Wp + pad];
                        double* dst = &gx.data[(static_cast<size_t>(c) * H + y) * W];
                        for (int xx = 0; xx < W; ++xx) dst[xx] += src[xx];
                    }
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::upsample2x(Id x) {
    const Tensor& vx = val(x);
    require(vx.rank() == 3, "upsample2x rank");
    const int C = vx.dim(0), H = vx.dim(1), W = vx.dim(2);
    Tensor out({C, 2 * H, 2 * W});
    for (int c = 0; c < C; ++c)
        for (int y = 0; y < 2 * H; ++y)
            for (int xx = 0; xx < 2 * W; ++xx) out.at(c, y, xx) = vx.at(c, y / 2, xx / 2);
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, C, H, W, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& gx = t.grad_mut(x);
            for (int c = 0; c < C; ++c)
                for (int y = 0; y < 2 * H; ++y)
                    for (int xx = 0; xx < 2 * W; ++xx) gx.at(c, y / 2, xx / 2) += g.at(c, y, xx);
        };
    }
    return id;
}

Tape::Id Tape::concat_ch(Id a, Id b) {
    const Tensor &va = val(a), &vb = val(b);
    require(va.rank() == 3 && vb.rank() == 3 && va.dim(1) == vb.dim(1) && va.dim(2) == vb.dim(2),
            "concat_ch shapes");
    const int Ca = va.dim(0), Cb = vb.dim(0), H = va.dim(1), W = va.dim(2);
    Tensor out({Ca + Cb, H, W});
    std::copy(va.data.begin(), va.data.end(), out.data.begin());
    std::copy(vb.data.begin(), vb.data.end(), out.data.begin() + va.data.size());
    bool ng = needs_grad(a) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, b, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const size_t na = t.val(a).data.size();
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);
                for (size_t i = 0; i < na; ++i) ga.data[i] += g.data[i];
            }
            if (t.needs_grad(b)) {
                Tensor& gb = t.grad_mut(b);
                for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += g.data[na + i];
            }
        };
    }
    return id;
}

Tape::Id Tape::gap(Id x) {
    const Tensor& vx = val(x);
    require(vx.rank() == 3, "gap rank");
    const int C = vx.dim(0), H = vx.dim(1), W = vx.dim(2);
    const double inv = 1.0 / (H * W);
    Tensor out({C});
    for (int c = 0; c < C; ++c) {
        double s = 0.0;
        for (int y = 0; y < H; ++y)
            for (int xx = 0; xx < W; ++xx) s += vx.at(c, y, xx);
        out.at(c) = s * inv;
    }
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, C, H, W, inv, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& gx = t.grad_mut(x);
            for (int c = 0; c < C; ++c) {
                const double gc = g.at(c) * inv;
                for (int y = 0; y < H; ++y)
                    for (int xx = 0; xx < W; ++xx) gx.at(c, y, xx) += gc;
            }
        };
    }
    return id;
}

Tape::Id Tape::silu(Id x) {
    const Tensor& vx = val(x);
    Tensor out(vx.shape);
    for (size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = vx.data[i] * sigmoid_d(vx.data[i]);
    }
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& vx2 = t.val(x);
            Tensor& gx = t.grad_mut(x);
            for (size_t i = 0; i < g.data.size(); ++i) {
                const double s = sigmoid_d(vx2.data[i]);
                gx.data[i] += g.data[i] * s * (1.0 + vx2.data[i] * (1.0 - s));
            }
        };
    }
    return id;
}

Tape::Id Tape::sigmoid(Id x) {
    const Tensor& vx = val(x);
    Tensor out(vx.shape);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = sigmoid_d(vx.data[i]);
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& y = t.val(id);
            Tensor& gx = t.grad_mut(x);
            for (size_t i = 0; i < g.data.size(); ++i)
                gx.data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
        };
    }
    return id;
}

Tape::Id Tape::softmax_rows(Id x) {
    const Tensor& vx = val(x);
    require(vx.rank() == 2, "softmax_rows rank");
    const int n = vx.dim(0), m = vx.dim(1);
    Tensor out(vx.shape);
    for (int i = 0; i < n; ++i) {
        double mx = vx.at(i, 0);
        for (int j = 1; j < m; ++j) mx = std::max(mx, vx.at(i, j));
        double z = 0.0;
        for (int j = 0; j < m; ++j) {
            const double e = std::exp(vx.at(i, j) - mx);
            out.at(i, j) = e;
            z += e;
        }
        for (int j = 0; j < m; ++j) out.at(i, j) /= z;
    }
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, n, m, id](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& y = t.val(id);
            Tensor& gx = t.grad_mut(x);
            for (int i = 0; i < n; ++i) {
                double dotgy = 0.0;
                for (int j = 0; j < m; ++j) dotgy += g.at(i, j) * y.at(i, j);
                for (int j = 0; j < m; ++j)
                    gx.at(i, j) += y.at(i, j) * (g.at(i, j) - dotgy);
            }
        };
    }
    return id;
}

Tape::Id Tape::layernorm_rows(Id x, Id gain, Id bias) {
    const Tensor &vx = val(x), &vg = val(gain), &vb = val(bias);
    require(vx.rank() == 2, "layernorm rank");
    const int n = vx.dim(0), m = vx.dim(1);
    require(vg.rank() == 1 && vg.dim(0) == m && vb.rank() == 1 && vb.dim(0) == m,
            "layernorm affine shapes");
    constexpr double eps = 1e-5;
    Tensor out(vx.shape);
    Tensor xhat(vx.shape);
    std::vector<double> inv_std(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double mu = 0.0;
        for (int j = 0; j < m; ++j) mu += vx.at(i, j);
        mu /= m;
        double var = 0.0;
        for (int j = 0; j < m; ++j) {
            const double d = vx.at(i, j) - mu;
            var += d * d;
        }
        var /= m;
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(i)] = is;
        for (int j = 0; j < m; ++j) {
            const double h = (vx.at(i, j) - mu) * is;
            xhat.at(i, j) = h;
            out.at(i, j) = vg.at(j) * h + vb.at(j);
        }
    }
    bool ng = needs_grad(x) || needs_grad(gain) || needs_grad(bias);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        auto xh = std::make_shared<Tensor>(std::move(xhat));
        auto istd = std::make_shared<std::vector<double>>(std::move(inv_std));
        nodes_.back().back = [x, gain, bias, n, m, id, xh, istd](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& vg2 = t.val(gain);
            for (int i = 0; i < n; ++i) {
                if (t.needs_grad(gain)) {
                    Tensor& gg = t.grad_mut(gain);
                    for (int j = 0; j < m; ++j) gg.at(j) += g.at(i, j) * xh->at(i, j);
                }
                if (t.needs_grad(bias)) {
                    Tensor& gb = t.grad_mut(bias);
                    for (int j = 0; j < m; ++j) gb.at(j) += g.at(i, j);
                }
                if (t.needs_grad(x)) {
                    Tensor& gx = t.grad_mut(x);
                    double mean_gh = 0.0, mean_ghx = 0.0;
                    for (int j = 0; j < m; ++j) {
                        const double gh = g.at(i, j) * vg2.at(j);
                        mean_gh += gh;
                        mean_ghx += gh * xh->at(i, j);
                    }
                    mean_gh /= m;
                    mean_ghx /= m;
                    const double is = (*istd)[static_cast<size_t>(i)];
                    for (int j = 0; j < m; ++j) {
                        const double gh = g.at(i, j) * vg2.at(j);
                        gx.at(i, j) += is * (gh - mean_gh - xh->at(i, j) * mean_ghx);
                    }
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::group_norm(Id x, int groups, Id gain, Id bias) {
    const Tensor &vx = val(x), &vg = val(gain), &vb = val(bias);
    require(vx.rank() == 3, "group_norm rank");
    const int C = vx.dim(0), H = vx.dim(1), W = vx.dim(2);
    require(groups >= 1 && C % groups == 0, "group_norm group count");
    require(vg.rank() == 1 && vg.dim(0) == C && vb.rank() == 1 && vb.dim(0) == C,
            "group_norm affine shapes");
    constexpr double eps = 1e-5;
    const int cg = C / groups;
    const int gsz = cg * H * W;
    Tensor out(vx.shape);
    Tensor xhat(vx.shape);
    std::vector<double> inv_std(static_cast<size_t>(groups));
    for (int g = 0; g < groups; ++g) {
        double mu = 0.0;
        for (int c = g * cg; c < (g + 1) * cg; ++c)
            for (int y = 0; y < H; ++y)
                for (int xx = 0; xx < W; ++xx) mu += vx.at(c, y, xx);
        mu /= gsz;
        double var = 0.0;
        for (int c = g * cg; c < (g + 1) * cg; ++c)
            for (int y = 0; y < H; ++y)
                for (int xx = 0; xx < W; ++xx) {
                    const double d = vx.at(c, y, xx) - mu;
                    var += d * d;
                }
        var /= gsz;
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(g)] = is;
        for (int c = g * cg; c < (g + 1) * cg; ++c)
            for (int y = 0; y < H; ++y)
                for (int xx = 0; xx < W; ++xx) {
                    const double h = (vx.at(c, y, xx) - mu) * is;
                    xhat.at(c, y, xx) = h;
                    out.at(c, y, xx) = vg.at(c) * h + vb.at(c);
                }
    }
    bool ng = needs_grad(x) || needs_grad(gain) || needs_grad(bias);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        auto xh = std::make_shared<Tensor>(std::move(xhat));
        auto istd = std::make_shared<std::vector<double>>(std::move(inv_std));
        nodes_.back().back = [x, gain, bias, groups, cg, H, W, gsz, id, xh, istd](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& vg2 = t.val(gain);
            if (t.needs_grad(gain) || t.needs_grad(bias)) {
                const int C2 = cg * groups;
                for (int c = 0; c < C2; ++c) {
                    double sg = 0.0, sb = 0.0;
                    for (int y = 0; y < H; ++y)
                        for (int xx = 0; xx < W; ++xx) {
                            sg += g.at(c, y, xx) * xh->at(c, y, xx);
                            sb += g.at(c, y, xx);
                        }
                    if (t.needs_grad(gain)) t.grad_mut(gain).at(c) += sg;
                    if (t.needs_grad(bias)) t.grad_mut(bias).at(c) += sb;
                }
            }
            if (t.needs_grad(x)) {
                Tensor& gx = t.grad_mut(x);
                for (int grp = 0; grp < groups; ++grp) {
                    double mean_gh = 0.0, mean_ghx = 0.0;
                    for (int c = grp * cg; c < (grp + 1) * cg; ++c)
                        for (int y = 0; y < H; ++y)
                            for (int xx = 0; xx < W; ++xx) {
                                const double gh = g.at(c, y, xx) * vg2.at(c);
                                mean_gh += gh;
                                mean_ghx += gh * xh->at(c, y, xx);
                            }
                    mean_gh /= gsz;
                    mean_ghx /= gsz;
                    const double is = (*istd)[static_cast<size_t>(grp)];
                    for (int c = grp * cg; c < (grp + 1) * cg; ++c)
                        for (int y = 0; y < H; ++y)
                            for (int xx = 0; xx < W; ++xx) {
                                const double gh = g.at(c, y, xx) * vg2.at(c);
                                gx.at(c, y, xx) +=
                                    is * (gh - mean_gh - xh->at(c, y, xx) * mean_ghx);
                            }
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::l2norm_rows(Id x) {
    const Tensor& vx = val(x);
    require(vx.rank() == 2, "l2norm_rows rank");
    const int n = vx.dim(0), m = vx.dim(1);
    constexpr double eps = 1e-12;
    Tensor out(vx.shape);
    std::vector<double> inv_norm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += vx.at(i, j) * vx.at(i, j);
        const double in = 1.0 / std::sqrt(s + eps);
        inv_norm[static_cast<size_t>(i)] = in;
        for (int j = 0; j < m; ++j) out.at(i, j) = vx.at(i, j) * in;
    }
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        auto invn = std::make_shared<std::vector<double>>(std::move(inv_norm));
        nodes_.back().back = [x, n, m, id, invn](Tape& t) {
            const Tensor& g = t.grad(id);
            const Tensor& y = t.val(id);
            Tensor& gx = t.grad_mut(x);
            for (int i = 0; i < n; ++i) {
                double gy = 0.0;
                for (int j = 0; j < m; ++j) gy += g.at(i, j) * y.at(i, j);
                const double in = (*invn)[static_cast<size_t>(i)];
                for (int j = 0; j < m; ++j)
                    gx.at(i, j) += in * (g.at(i, j) - y.at(i, j) * gy);
            }
        };
    }
    return id;
}

Tape::Id Tape::embed(Id table, const std::vector<int>& ids) {
    const Tensor& vt = val(table);
    require(vt.rank() == 2, "embed table rank");
    const int V = vt.dim(0), d = vt.dim(1);
    const int L = static_cast<int>(ids.size());
    for (int tok : ids) require(tok >= 0 && tok < V, "embed id out of range");
    Tensor out({L, d});
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < d; ++j) out.at(i, j) = vt.at(ids[static_cast<size_t>(i)], j);
    bool ng = needs_grad(table);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [table, ids, L, d, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& gt = t.grad_mut(table);
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < d; ++j) gt.at(ids[static_cast<size_t>(i)], j) += g.at(i, j);
        };
    }
    return id;
}

Tape::Id Tape::stack_rows(const std::vector<Id>& rows) {
    require(!rows.empty(), "stack_rows empty");
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(val(rows[0]).numel());
    Tensor out({n, d});
    bool ng = false;
    for (int i = 0; i < n; ++i) {
        const Tensor& v = val(rows[static_cast<size_t>(i)]);
        require(static_cast<int>(v.numel()) == d, "stack_rows width mismatch");
        for (int j = 0; j < d; ++j) out.at(i, j) = v.data[static_cast<size_t>(j)];
        ng = ng || needs_grad(rows[static_cast<size_t>(i)]);
    }
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [rows, n, d, id](Tape& t) {
            const Tensor& g = t.grad(id);
            for (int i = 0; i < n; ++i) {
                const Id r = rows[static_cast<size_t>(i)];
                if (!t.needs_grad(r)) continue;
                Tensor& gr = t.grad_mut(r);
                for (int j = 0; j < d; ++j) gr.data[static_cast<size_t>(j)] += g.at(i, j);
            }
        };
    }
    return id;
}

Tape::Id Tape::chw_to_rows(Id x) {
    const Tensor& vx = val(x);
    require(vx.rank() == 3, "chw_to_rows rank");
    const int C = vx.dim(0), H = vx.dim(1), W = vx.dim(2);
    Tensor out({H * W, C});
    for (int c = 0; c < C; ++c)
        for (int y = 0; y < H; ++y)
            for (int xx = 0; xx < W; ++xx) out.at(y * W + xx, c) = vx.at(c, y, xx);
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, C, H, W, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& gx = t.grad_mut(x);
            for (int c = 0; c < C; ++c)
                for (int y = 0; y < H; ++y)
                    for (int xx = 0; xx < W; ++xx) gx.at(c, y, xx) += g.at(y * W + xx, c);
        };
    }
    return id;
}

Tape::Id Tape::rows_to_chw(Id x, int C, int H, int W) {
    const Tensor& vx = val(x);
    require(vx.rank() == 2 && vx.dim(0) == H * W && vx.dim(1) == C, "rows_to_chw shapes");
    Tensor out({C, H, W});
    for (int c = 0; c < C; ++c)
        for (int y = 0; y < H; ++y)
            for (int xx = 0; xx < W; ++xx) out.at(c, y, xx) = vx.at(y * W + xx, c);
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, C, H, W, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& gx = t.grad_mut(x);
            for (int c = 0; c < C; ++c)
                for (int y = 0; y < H; ++y)
                    for (int xx = 0; xx < W; ++xx) gx.at(y * W + xx, c) += g.at(c, y, xx);
        };
    }
    return id;
}

Tape::Id Tape::reshape(Id x, std::vector<int> shape) {
    const Tensor& vx = val(x);
    require(Tensor::numel_of(shape) == vx.numel(), "reshape numel mismatch");
    Tensor out(std::move(shape), vx.data);
    bool ng = needs_grad(x);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [x, id](Tape& t) {
            const Tensor& g = t.grad(id);
            Tensor& gx = t.grad_mut(x);
            for (size_t i = 0; i < g.data.size(); ++i) gx.data[i] += g.data[i];
        };
    }
    return id;
}

Tape::Id Tape::mean_sq_diff(Id a, Id b) {
    const Tensor &va = val(a), &vb = val(b);
    require(va.same_shape(vb), "mean_sq_diff shape mismatch");
    const double inv = 1.0 / static_cast<double>(va.data.size());
    double s = 0.0;
    for (size_t i = 0; i < va.data.size(); ++i) {
        const double d = va.data[i] - vb.data[i];
        s += d * d;
    }
    Tensor out({1});
    out.at(0) = s / static_cast<double>(va.data.size());
    bool ng = needs_grad(a) || needs_grad(b);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_.back().back = [a, b, inv, id](Tape& t) {
            const double go = t.grad(id).at(0);
            const Tensor &va2 = t.val(a), &vb2 = t.val(b);
            if (t.needs_grad(a)) {
                Tensor& ga = t.grad_mut(a);
                for (size_t i = 0; i < va2.data.size(); ++i)
                    ga.data[i] += go * 2.0 * inv * (va2.data[i] - vb2.data[i]);
            }
            if (t.needs_grad(b)) {
                Tensor& gb = t.grad_mut(b);
                for (size_t i = 0; i < va2.data.size(); ++i)
                    gb.data[i] -= go * 2.0 * inv * (va2.data[i] - vb2.data[i]);
            }
        };
    }
    return id;
}

Tape::Id Tape::softmax_xent_diag(Id logits) {
    const Tensor& vl = val(logits);
    require(vl.rank() == 2 && vl.dim(0) == vl.dim(1), "softmax_xent_diag square");
    const int n = vl.dim(0);
    Tensor probs({n, n});
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        double mx = vl.at(i, 0);
        for (int j = 1; j < n; ++j) mx = std::max(mx, vl.at(i, j));
        double z = 0.0;
        for (int j = 0; j < n; ++j) {
            const double e = std::exp(vl.at(i, j) - mx);
            probs.at(i, j) = e;
            z += e;
        }
        for (int j = 0; j < n; ++j) probs.at(i, j) /= z;
        loss += std::log(z) + mx - vl.at(i, i);
    }
    Tensor out({1});
    out.at(0) = loss / n;
    bool ng = needs_grad(logits);
    Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        auto p = std::make_shared<Tensor>(std::move(probs));
        nodes_.back().back = [logits, n, id, p](Tape& t) {
            const double go = t.grad(id).at(0) / n;
            Tensor& gl = t.grad_mut(logits);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    gl.at(i, j) += go * (p->at(i, j) - (i == j ? 1.0 : 0.0));
        };
    }
    return id;
}

void Tape::backward(Id loss) {
    const Tensor& lv = val(loss);
    require(lv.numel() == 1, "backward: loss must be scalar");
    for (Node& n : nodes_) {
        if (n.needs_grad) {
            n.grad = Tensor(n.value.shape);
        }
    }
    if (!nodes_[static_cast<size_t>(loss)].needs_grad) return;
    grad_mut(loss).at(0) = 1.0;
    for (size_t i = nodes_.size(); i-- > 0;) {
        Node& n = nodes_[i];
        if (n.needs_grad && n.back) n.back(*this);
    }
}

}  // namespace stylelab
