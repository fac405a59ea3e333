#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "crackpot/tensor.hpp"

namespace crackpot {

// Learned residual-encoding parameters: K codeword centers of dimension D and
// one smoothing factor per codeword. Smoothing signs are unconstrained; both
// tensors are trained.
template <typename T>
struct EncodingParamsT {
    TensorT<T> codewords;  // K x D
    TensorT<T> smoothing;  // K
};

using EncodingParams = EncodingParamsT<float>;

namespace detail {

template <typename T>
void check_encoding_shapes(const TensorT<T>& features, const EncodingParamsT<T>& params) {
    if (features.rank() != 2)
        throw InvalidParameterError("neuralnet.encoding: features must be N x D");
    if (params.codewords.rank() != 2 || params.smoothing.rank() != 1 ||
        params.smoothing.dim(0) != params.codewords.dim(0))
        throw InvalidParameterError("neuralnet.encoding: malformed codeword/smoothing shapes");
    if (features.dim(1) != params.codewords.dim(1))
        throw InvalidParameterError(
            "neuralnet.encoding: descriptor dimension does not match codewords");
    if (features.dim(0) < 1)
        throw InvalidParameterError("neuralnet.encoding: need at least one descriptor");
}

}  // namespace detail

// Soft-assignment weights: a_ik = exp(-s_k ||f_i - c_k||^2) normalized over k,
// computed with max subtraction inside the softmax. Returns an N x K tensor;
// every row sums to 1.
template <typename T>
TensorT<T> encoding_assignments(const TensorT<T>& features, const EncodingParamsT<T>& params) {
    detail::check_encoding_shapes(features, params);
    const int n = features.dim(0), d = features.dim(1), k = params.codewords.dim(0);
    TensorT<T> assign({n, k});
    std::vector<T> logits(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            T dist = T(0);
            for (int e = 0; e < d; ++e) {
                const T r = features.at2(i, e) - params.codewords.at2(j, e);
                dist += r * r;
            }
            logits[j] = -params.smoothing.data[j] * dist;
        }
        const T m = *std::max_element(logits.begin(), logits.end());
        T sum = T(0);
        for (int j = 0; j < k; ++j) {
            const T v = std::exp(logits[j] - m);
            assign.at2(i, j) = v;
            sum += v;
        }
        for (int j = 0; j < k; ++j) assign.at2(i, j) /= sum;
    }
    return assign;
}

// Aggregated residuals before normalization: e_k = (1/N) sum_i a_ik (f_i - c_k),
// concatenated over k into a K*D vector.
template <typename T>
std::vector<T> encoding_aggregate(const TensorT<T>& features, const EncodingParamsT<T>& params,
                                  const TensorT<T>& assign) {
    const int n = features.dim(0), d = features.dim(1), k = params.codewords.dim(0);
    std::vector<T> out(static_cast<std::size_t>(k) * d, T(0));
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < n; ++i) {
            const T a = assign.at2(i, j);
            for (int e = 0; e < d; ++e)
                out[static_cast<std::size_t>(j) * d + e] +=
                    a * (features.at2(i, e) - params.codewords.at2(j, e));
        }
        for (int e = 0; e < d; ++e) out[static_cast<std::size_t>(j) * d + e] /= T(n);
    }
    return out;
}

template <typename T>
std::vector<T> encoding_aggregate(const TensorT<T>& features, const EncodingParamsT<T>& params) {
    return encoding_aggregate(features, params, encoding_assignments(features, params));
}

// Full encoding layer: aggregate residuals, then L2-normalize the K*D vector.
// The output length is K*D for any descriptor count N >= 1, which is what lets
// the layer replace global pooling for arbitrary input sizes. An all-zero
// aggregate is returned unnormalized.
template <typename T>
std::vector<T> encoding_forward(const TensorT<T>& features, const EncodingParamsT<T>& params) {
    const std::vector<T> agg = encoding_aggregate(features, params);
    T sq = T(0);
    for (T v : agg) sq += v * v;
    const T norm = std::sqrt(sq);
    if (norm == T(0)) return agg;
    std::vector<T> out(agg.size());
    for (std::size_t i = 0; i < agg.size(); ++i) out[i] = agg[i] / norm;
    return out;
}

// Reverse-mode gradients of the pre-normalization aggregate w.r.t. features,
// codewords and smoothing factors. `dagg` is dLoss/d(aggregate). Gradients
// accumulate into the provided sinks.
template <typename T>
void encoding_backward(const TensorT<T>& features, const EncodingParamsT<T>& params,
                       const TensorT<T>& assign, const std::vector<T>& dagg,
                       TensorT<T>& dfeatures, EncodingParamsT<T>& dparams) {
    const int n = features.dim(0), d = features.dim(1), k = params.codewords.dim(0);
    std::vector<T> residual(static_cast<std::size_t>(k) * d);
    std::vector<T> dist(static_cast<std::size_t>(k));
    std::vector<T> da(static_cast<std::size_t>(k));
    std::vector<T> dr(static_cast<std::size_t>(k) * d);

    const T inv_n = T(1) / T(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            T dd = T(0);
            for (int e = 0; e < d; ++e) {
                const T r = features.at2(i, e) - params.codewords.at2(j, e);
                residual[static_cast<std::size_t>(j) * d + e] = r;
                dd += r * r;
            }
            dist[j] = dd;
        }
        // through e_k = (1/N) sum_i a_ik r_ik
        for (int j = 0; j < k; ++j) {
            const T a = assign.at2(i, j);
            T daj = T(0);
            for (int e = 0; e < d; ++e) {
                const T g = dagg[static_cast<std::size_t>(j) * d + e] * inv_n;
                daj += g * residual[static_cast<std::size_t>(j) * d + e];
                dr[static_cast<std::size_t>(j) * d + e] = g * a;
            }
            da[j] = daj;
        }
        // softmax over k: dlogit_j = a_j (da_j - sum_m a_m da_m)
        T dot = T(0);
        for (int j = 0; j < k; ++j) dot += assign.at2(i, j) * da[j];
        for (int j = 0; j < k; ++j) {
            const T dlogit = assign.at2(i, j) * (da[j] - dot);
            // logit_j = -s_j * dist_j
            dparams.smoothing.data[j] += -dist[j] * dlogit;
            const T ddist = -params.smoothing.data[j] * dlogit;
            for (int e = 0; e < d; ++e)
                dr[static_cast<std::size_t>(j) * d + e] +=
                    T(2) * residual[static_cast<std::size_t>(j) * d + e] * ddist;
        }
        // r_ik = f_i - c_k
        for (int j = 0; j < k; ++j) {
            for (int e = 0; e < d; ++e) {
                const T g = dr[static_cast<std::size_t>(j) * d + e];
                dfeatures.at2(i, e) += g;
                dparams.codewords.at2(j, e) -= g;
            }
        }
    }
}

}  // namespace crackpot
