#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "crackpot/tensor.hpp"

namespace crackpot {

// 2-D cross-correlation plus per-channel bias, zero padding.
// Each output element accumulates bias first, then terms in (ci, ky, kx)
// order, so the 64-bit instantiation reproduces the canonical scalar
// triple-loop evaluation bit for bit.
template <typename T>
TensorT<T> conv2d(const TensorT<T>& input, const TensorT<T>& kernel, const TensorT<T>& bias,
                  int stride, int pad) {
    if (input.rank() != 3 || kernel.rank() != 4 || bias.rank() != 1)
        throw InvalidParameterError("neuralnet.conv2d: expected C*H*W input, Co*Ci*k*k kernel");
    const int ci = input.dim(0), h = input.dim(1), w = input.dim(2);
    const int co = kernel.dim(0), k = kernel.dim(2);
    if (kernel.dim(1) != ci || kernel.dim(3) != k || bias.dim(0) != co)
        throw InvalidParameterError("neuralnet.conv2d: kernel/bias shapes inconsistent with input");
    if (stride < 1)
        throw InvalidParameterError("neuralnet.conv2d: stride must be >= 1");
    const int ho = (h + 2 * pad - k) / stride + 1;
    const int wo = (w + 2 * pad - k) / stride + 1;
    if (h + 2 * pad - k < 0 || w + 2 * pad - k < 0 || ho < 1 || wo < 1)
        throw InvalidParameterError("neuralnet.conv2d: non-positive output extent");

    TensorT<T> out({co, ho, wo});
    for (int oc = 0; oc < co; ++oc) {
        const T b = bias.data[oc];
        for (std::size_t i = 0; i < static_cast<std::size_t>(ho) * wo; ++i)
            out.data[static_cast<std::size_t>(oc) * ho * wo + i] = b;
        for (int ic = 0; ic < ci; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const T wv = kernel.at4(oc, ic, ky, kx);
                    for (int oy = 0; oy < ho; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (int ox = 0; ox < wo; ++ox) {
                            const int ix = ox * stride - pad + kx;
                            if (ix < 0 || ix >= w) continue;
                            out.at3(oc, oy, ox) += wv * input.at3(ic, iy, ix);
                        }
                    }
                }
            }
        }
    }
    return out;
}

template <typename T>
void conv2d_backward(const TensorT<T>& input, const TensorT<T>& kernel, int stride, int pad,
                     const TensorT<T>& dout, TensorT<T>& dinput, TensorT<T>& dkernel,
                     TensorT<T>& dbias) {
    const int ci = input.dim(0), h = input.dim(1), w = input.dim(2);
    const int co = kernel.dim(0), k = kernel.dim(2);
    const int ho = dout.dim(1), wo = dout.dim(2);
    for (int oc = 0; oc < co; ++oc) {
        for (int oy = 0; oy < ho; ++oy)
            for (int ox = 0; ox < wo; ++ox) dbias.data[oc] += dout.at3(oc, oy, ox);
        for (int ic = 0; ic < ci; ++ic) {
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const T wv = kernel.at4(oc, ic, ky, kx);
                    T dw = T(0);
                    for (int oy = 0; oy < ho; ++oy) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (int ox = 0; ox < wo; ++ox) {
                            const int ix = ox * stride - pad + kx;
                            if (ix < 0 || ix >= w) continue;
                            const T g = dout.at3(oc, oy, ox);
                            dw += g * input.at3(ic, iy, ix);
                            dinput.at3(ic, iy, ix) += g * wv;
                        }
                    }
                    dkernel.at4(oc, ic, ky, kx) += dw;
                }
            }
        }
    }
}

// 2x2 max pooling, stride 2; a trailing odd row/column is dropped.
// `argmax`, when provided, records the flat input index of the first maximal
// element of each window in row-major window order.
template <typename T>
TensorT<T> maxpool2(const TensorT<T>& input, std::vector<std::size_t>* argmax = nullptr) {
    if (input.rank() != 3)
        throw InvalidParameterError("neuralnet.maxpool2: expected C*H*W input");
    const int c = input.dim(0), h = input.dim(1), w = input.dim(2);
    if (h < 2 || w < 2)
        throw InvalidParameterError("neuralnet.maxpool2: spatial extent below 2");
    const int ho = h / 2, wo = w / 2;
    TensorT<T> out({c, ho, wo});
    if (argmax) argmax->assign(out.numel(), 0);
    std::size_t o = 0;
    for (int ch = 0; ch < c; ++ch) {
        for (int oy = 0; oy < ho; ++oy) {
            for (int ox = 0; ox < wo; ++ox, ++o) {
                T best = input.at3(ch, 2 * oy, 2 * ox);
                std::size_t best_idx =
                    (static_cast<std::size_t>(ch) * h + 2 * oy) * w + 2 * ox;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const T v = input.at3(ch, 2 * oy + dy, 2 * ox + dx);
                        if (v > best) {
                            best = v;
                            best_idx = (static_cast<std::size_t>(ch) * h + 2 * oy + dy) * w +
                                       2 * ox + dx;
                        }
                    }
                }
                out.data[o] = best;
                if (argmax) (*argmax)[o] = best_idx;
            }
        }
    }
    return out;
}

template <typename T>
void maxpool2_backward(const std::vector<std::size_t>& argmax, const TensorT<T>& dout,
                       TensorT<T>& dinput) {
    for (std::size_t o = 0; o < dout.numel(); ++o) dinput.data[argmax[o]] += dout.data[o];
}

template <typename T>
TensorT<T> relu(const TensorT<T>& input) {
    TensorT<T> out = input;
    for (T& v : out.data) v = std::max(v, T(0));
    return out;
}

// Subgradient at 0 is taken as 0: gradient passes only where pre > 0.
template <typename T>
TensorT<T> relu_backward(const TensorT<T>& pre, const TensorT<T>& dout) {
    TensorT<T> din = dout;
    for (std::size_t i = 0; i < din.data.size(); ++i)
        if (!(pre.data[i] > T(0))) din.data[i] = T(0);
    return din;
}

// out = weight * input + bias, weight m x n.
template <typename T>
std::vector<T> linear(const std::vector<T>& input, const TensorT<T>& weight,
                      const TensorT<T>& bias) {
    if (weight.rank() != 2 || bias.rank() != 1 ||
        weight.dim(1) != static_cast<int>(input.size()) || weight.dim(0) != bias.dim(0))
        throw InvalidParameterError("neuralnet.linear: dimension mismatch");
    const int m = weight.dim(0), n = weight.dim(1);
    std::vector<T> out(m);
    for (int r = 0; r < m; ++r) {
        T acc = bias.data[r];
        for (int c = 0; c < n; ++c) acc += weight.at2(r, c) * input[c];
        out[r] = acc;
    }
    return out;
}

template <typename T>
void linear_backward(const std::vector<T>& input, const TensorT<T>& weight,
                     const std::vector<T>& dout, std::vector<T>& dinput, TensorT<T>& dweight,
                     TensorT<T>& dbias) {
    const int m = weight.dim(0), n = weight.dim(1);
    dinput.assign(input.size(), T(0));
    for (int r = 0; r < m; ++r) {
        dbias.data[r] += dout[r];
        for (int c = 0; c < n; ++c) {
            dweight.at2(r, c) += dout[r] * input[c];
            dinput[c] += weight.at2(r, c) * dout[r];
        }
    }
}

// Numerically stabilized softmax (max subtraction).
template <typename T>
std::vector<T> softmax(const std::vector<T>& logits) {
    std::vector<T> out(logits.size());
    const T m = *std::max_element(logits.begin(), logits.end());
    T sum = T(0);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (T& v : out) v /= sum;
    return out;
}

// loss = -ln(probs[label]) with the probability clamped to [1e-12, 1].
// For 2-class softmax output this equals binary cross entropy on the
// positive-class probability.
template <typename T>
T cross_entropy_loss(const std::vector<T>& probs, int label) {
    if (label != 0 && label != 1)
        throw InvalidParameterError("neuralnet.cross_entropy_loss: label must be 0 or 1");
    if (probs.size() < 2)
        throw InvalidParameterError("neuralnet.cross_entropy_loss: expected 2 probabilities");
    const T p = std::clamp(probs[static_cast<std::size_t>(label)], T(1e-12), T(1));
    return -std::log(p);
}

// Returns the L2-normalized copy of v and its norm. A zero vector is
// returned unnormalized (norm reported as 0).
template <typename T>
std::pair<std::vector<T>, T> l2_normalize(const std::vector<T>& v) {
    T sq = T(0);
    for (T x : v) sq += x * x;
    const T norm = std::sqrt(sq);
    if (norm == T(0)) return {v, T(0)};
    std::vector<T> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
    return {out, norm};
}

}  // namespace crackpot
