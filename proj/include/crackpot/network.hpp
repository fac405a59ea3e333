#pragma once

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "crackpot/encoding.hpp"
#include "crackpot/image.hpp"
#include "crackpot/netops.hpp"

namespace crackpot {

// Reduced fire-module topology sized for square patches:
//   conv1 3x3/s2 -> relu -> pool -> fire2 -> fire3 -> pool -> fire4 ->
//   residual encoding (K codewords over D = 2 * fire4_expand descriptors) ->
//   fully connected -> softmax over 2 classes.
struct NetworkConfig {
    int in_channels = 3;
    int patch_size = 64;
    int conv1_filters = 32;
    int fire2_squeeze = 16, fire2_expand = 32;
    int fire3_squeeze = 16, fire3_expand = 32;
    int fire4_squeeze = 32, fire4_expand = 64;
    int codewords = 32;  // K
    int classes = 2;

    int descriptor_dim() const { return 2 * fire4_expand; }  // D

    // Serialization order of the config integers (the "config" pseudo-tensor).
    std::array<int, 12> to_ints() const {
        return {in_channels, patch_size, conv1_filters, fire2_squeeze, fire2_expand,
                fire3_squeeze, fire3_expand, fire4_squeeze, fire4_expand,
                descriptor_dim(), codewords, classes};
    }

    static NetworkConfig from_ints(const std::array<int, 12>& v) {
        NetworkConfig cfg;
        cfg.in_channels = v[0];
        cfg.patch_size = v[1];
        cfg.conv1_filters = v[2];
        cfg.fire2_squeeze = v[3];
        cfg.fire2_expand = v[4];
        cfg.fire3_squeeze = v[5];
        cfg.fire3_expand = v[6];
        cfg.fire4_squeeze = v[7];
        cfg.fire4_expand = v[8];
        cfg.codewords = v[10];
        cfg.classes = v[11];
        cfg.validate();
        if (v[9] != cfg.descriptor_dim())
            throw InvalidParameterError(
                "neuralnet.NetworkConfig: stored D does not equal 2 * fire4_expand");
        return cfg;
    }

    void validate() const {
        if (in_channels != 1 && in_channels != 3)
            throw InvalidParameterError("neuralnet.NetworkConfig: in_channels must be 1 or 3");
        if (patch_size < 1 || conv1_filters < 1 || fire2_squeeze < 1 || fire2_expand < 1 ||
            fire3_squeeze < 1 || fire3_expand < 1 || fire4_squeeze < 1 || fire4_expand < 1 ||
            codewords < 1)
            throw InvalidParameterError("neuralnet.NetworkConfig: extents must be positive");
        if (classes != 2)
            throw InvalidParameterError("neuralnet.NetworkConfig: classifier is binary");
    }
};

// Downsized configuration used for finite-difference gradient verification.
inline NetworkConfig small_gradcheck_config() {
    NetworkConfig cfg;
    cfg.in_channels = 3;
    cfg.patch_size = 16;
    cfg.conv1_filters = 4;
    cfg.fire2_squeeze = 2;
    cfg.fire2_expand = 4;
    cfg.fire3_squeeze = 2;
    cfg.fire3_expand = 4;
    cfg.fire4_squeeze = 4;
    cfg.fire4_expand = 8;
    cfg.codewords = 4;
    return cfg;
}

template <typename T>
struct FireParamsT {
    TensorT<T> squeeze_w, squeeze_b;
    TensorT<T> expand1_w, expand1_b;
    TensorT<T> expand3_w, expand3_b;
};

// Every trainable tensor of the classifier.
template <typename T>
struct NetworkParamsT {
    TensorT<T> conv1_w, conv1_b;
    FireParamsT<T> fire2, fire3, fire4;
    EncodingParamsT<T> encoding;
    TensorT<T> fc_w, fc_b;

    // Visits tensors as (name, tensor) in the canonical persistence order.
    template <typename F>
    void for_each(F&& f) {
        f("conv1.w", conv1_w);
        f("conv1.b", conv1_b);
        visit_fire(f, "fire2", fire2);
        visit_fire(f, "fire3", fire3);
        visit_fire(f, "fire4", fire4);
        f("encoding.codewords", encoding.codewords);
        f("encoding.smoothing", encoding.smoothing);
        f("fc.w", fc_w);
        f("fc.b", fc_b);
    }
    template <typename F>
    void for_each(F&& f) const {
        const_cast<NetworkParamsT*>(this)->for_each(
            [&](const char* name, TensorT<T>& t) { f(name, const_cast<const TensorT<T>&>(t)); });
    }

private:
    template <typename F>
    static void visit_fire(F& f, const std::string& prefix, FireParamsT<T>& fire) {
        f((prefix + ".squeeze.w").c_str(), fire.squeeze_w);
        f((prefix + ".squeeze.b").c_str(), fire.squeeze_b);
        f((prefix + ".expand1x1.w").c_str(), fire.expand1_w);
        f((prefix + ".expand1x1.b").c_str(), fire.expand1_b);
        f((prefix + ".expand3x3.w").c_str(), fire.expand3_w);
        f((prefix + ".expand3x3.b").c_str(), fire.expand3_b);
    }
};

using NetworkParams = NetworkParamsT<float>;

namespace detail {

template <typename T>
FireParamsT<T> make_fire(int in_ch, int squeeze, int expand) {
    FireParamsT<T> fire;
    fire.squeeze_w = TensorT<T>({squeeze, in_ch, 1, 1});
    fire.squeeze_b = TensorT<T>({squeeze});
    fire.expand1_w = TensorT<T>({expand, squeeze, 1, 1});
    fire.expand1_b = TensorT<T>({expand});
    fire.expand3_w = TensorT<T>({expand, squeeze, 3, 3});
    fire.expand3_b = TensorT<T>({expand});
    return fire;
}

}  // namespace detail

// Zero-valued parameter set with the shapes implied by `cfg`.
template <typename T>
NetworkParamsT<T> make_params(const NetworkConfig& cfg) {
    cfg.validate();
    NetworkParamsT<T> p;
    p.conv1_w = TensorT<T>({cfg.conv1_filters, cfg.in_channels, 3, 3});
    p.conv1_b = TensorT<T>({cfg.conv1_filters});
    p.fire2 = detail::make_fire<T>(cfg.conv1_filters, cfg.fire2_squeeze, cfg.fire2_expand);
    p.fire3 = detail::make_fire<T>(2 * cfg.fire2_expand, cfg.fire3_squeeze, cfg.fire3_expand);
    p.fire4 = detail::make_fire<T>(2 * cfg.fire3_expand, cfg.fire4_squeeze, cfg.fire4_expand);
    p.encoding.codewords = TensorT<T>({cfg.codewords, cfg.descriptor_dim()});
    p.encoding.smoothing = TensorT<T>({cfg.codewords});
    p.fc_w = TensorT<T>({cfg.classes, cfg.codewords * cfg.descriptor_dim()});
    p.fc_b = TensorT<T>({cfg.classes});
    return p;
}

inline std::size_t param_count(const NetworkConfig& cfg) {
    auto p = make_params<float>(cfg);
    std::size_t n = 0;
    p.for_each([&](const char*, const Tensor& t) { n += t.numel(); });
    return n;
}

// Deterministic initialization. Weight tensors draw uniform(-sqrt(6/fan_in),
// +sqrt(6/fan_in)), codewords uniform(-1/sqrt(D), +1/sqrt(D)), smoothing
// factors 1, biases 0. The uniform mapping from the mt19937 stream is done by
// hand so the byte pattern does not depend on the standard library build.
template <typename T>
NetworkParamsT<T> init_params(const NetworkConfig& cfg, std::uint32_t seed) {
    NetworkParamsT<T> p = make_params<T>(cfg);
    std::mt19937 gen(seed);
    auto next_sym = [&](double bound) {
        const double u = gen() * (1.0 / 4294967296.0);  // [0, 1)
        return static_cast<T>((2.0 * u - 1.0) * bound);
    };
    auto fill_uniform = [&](TensorT<T>& t, double bound) {
        for (T& v : t.data) v = next_sym(bound);
    };
    auto init_conv = [&](TensorT<T>& w) {
        const double fan_in = double(w.dim(1)) * w.dim(2) * w.dim(3);
        fill_uniform(w, std::sqrt(6.0 / fan_in));
    };

    p.for_each([&](const std::string& name, TensorT<T>& t) {
        if (name == "encoding.codewords") {
            fill_uniform(t, 1.0 / std::sqrt(double(cfg.descriptor_dim())));
        } else if (name == "encoding.smoothing") {
            for (T& v : t.data) v = T(1);
        } else if (name == "fc.w") {
            fill_uniform(t, std::sqrt(6.0 / double(t.dim(1))));
        } else if (name.ends_with(".w")) {
            init_conv(t);
        }
        // biases stay zero
    });
    return p;
}

// Intermediates retained by the forward pass for reverse-mode differentiation.
template <typename T>
struct FireCache {
    TensorT<T> input;
    TensorT<T> squeeze_pre, squeeze_act;
    TensorT<T> concat_pre;  // expand outputs stacked before the relu
    TensorT<T> output;
};

template <typename T>
struct ForwardCache {
    TensorT<T> input;          // scaled Cin x S x S
    TensorT<T> conv1_pre, conv1_act, pool1;
    std::vector<std::size_t> pool1_idx;
    FireCache<T> fire2, fire3;
    TensorT<T> pool2;
    std::vector<std::size_t> pool2_idx;
    FireCache<T> fire4;
    TensorT<T> features;       // N x D
    TensorT<T> assignments;    // N x K
    std::vector<T> aggregate;  // K*D, pre-normalization
    std::vector<T> encoded;    // K*D, L2-normalized
    T encode_norm = T(0);
    std::vector<T> logits, probs;
};

namespace detail {

template <typename T>
TensorT<T> image_to_input(const Image& patch, const NetworkConfig& cfg) {
    if (patch.width != patch.height || patch.width < 1)
        throw InvalidParameterError("neuralnet.network_forward: patch must be square");
    if (patch.channels != cfg.in_channels && patch.channels != 1)
        throw InvalidParameterError(
            "neuralnet.network_forward: patch channels incompatible with network input");
    TensorT<T> input({cfg.in_channels, patch.height, patch.width});
    const T scale = T(1) / T(255);
    for (int c = 0; c < cfg.in_channels; ++c) {
        const int src_c = patch.channels == 1 ? 0 : c;
        for (int y = 0; y < patch.height; ++y)
            for (int x = 0; x < patch.width; ++x)
                input.at3(c, y, x) = T(patch.at(x, y, src_c)) * scale;
    }
    return input;
}

template <typename T>
TensorT<T> concat_channels(const TensorT<T>& a, const TensorT<T>& b) {
    TensorT<T> out({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
    return out;
}

template <typename T>
FireCache<T> fire_forward_cached(const TensorT<T>& input, const FireParamsT<T>& fire) {
    FireCache<T> cache;
    cache.input = input;
    cache.squeeze_pre = conv2d(input, fire.squeeze_w, fire.squeeze_b, 1, 0);
    cache.squeeze_act = relu(cache.squeeze_pre);
    TensorT<T> e1 = conv2d(cache.squeeze_act, fire.expand1_w, fire.expand1_b, 1, 0);
    TensorT<T> e3 = conv2d(cache.squeeze_act, fire.expand3_w, fire.expand3_b, 1, 1);
    cache.concat_pre = concat_channels(e1, e3);
    cache.output = relu(cache.concat_pre);
    return cache;
}

// Propagates dout through one fire module; returns d(input).
template <typename T>
TensorT<T> fire_backward(const FireCache<T>& cache, const FireParamsT<T>& fire,
                         const TensorT<T>& dout, FireParamsT<T>& grads) {
    const TensorT<T> dconcat = relu_backward(cache.concat_pre, dout);
    const int e1_ch = fire.expand1_w.dim(0);
    TensorT<T> de1({e1_ch, dconcat.dim(1), dconcat.dim(2)});
    TensorT<T> de3({dconcat.dim(0) - e1_ch, dconcat.dim(1), dconcat.dim(2)});
    std::copy(dconcat.data.begin(), dconcat.data.begin() + de1.data.size(), de1.data.begin());
    std::copy(dconcat.data.begin() + de1.data.size(), dconcat.data.end(), de3.data.begin());

    TensorT<T> dsqueeze_act = zeros_like(cache.squeeze_act);
    conv2d_backward(cache.squeeze_act, fire.expand1_w, 1, 0, de1, dsqueeze_act, grads.expand1_w,
                    grads.expand1_b);
    conv2d_backward(cache.squeeze_act, fire.expand3_w, 1, 1, de3, dsqueeze_act, grads.expand3_w,
                    grads.expand3_b);
    const TensorT<T> dsqueeze_pre = relu_backward(cache.squeeze_pre, dsqueeze_act);
    TensorT<T> dinput = zeros_like(cache.input);
    conv2d_backward(cache.input, fire.squeeze_w, 1, 0, dsqueeze_pre, dinput, grads.squeeze_w,
                    grads.squeeze_b);
    return dinput;
}

}  // namespace detail

// One fire module: 1x1 squeeze conv + relu, then parallel 1x1 and 3x3 (pad 1)
// expand convs whose channel concatenation is relu'd. Spatial size is kept.
template <typename T>
TensorT<T> fire_forward(const TensorT<T>& input, const FireParamsT<T>& params) {
    return detail::fire_forward_cached(input, params).output;
}

// Spatial activation C x H x W viewed as N = H*W descriptors of dimension C.
template <typename T>
TensorT<T> activation_to_descriptors(const TensorT<T>& act) {
    const int c = act.dim(0), h = act.dim(1), w = act.dim(2);
    TensorT<T> out({h * w, c});
    for (int ch = 0; ch < c; ++ch)
        for (int i = 0; i < h * w; ++i)
            out.at2(i, ch) = act.data[static_cast<std::size_t>(ch) * h * w + i];
    return out;
}

// A 1-channel patch is replicated across the configured input channels; all
// samples are scaled to [0, 1]. Any square patch whose stack keeps at least
// one spatial location is accepted.
template <typename T>
ForwardCache<T> network_forward_cached(const Image& patch, const NetworkParamsT<T>& params,
                                       const NetworkConfig& cfg) {
    ForwardCache<T> cache;
    cache.input = detail::image_to_input<T>(patch, cfg);
    try {
        cache.conv1_pre = conv2d(cache.input, params.conv1_w, params.conv1_b, 2, 1);
        cache.conv1_act = relu(cache.conv1_pre);
        cache.pool1 = maxpool2(cache.conv1_act, &cache.pool1_idx);
        cache.fire2 = detail::fire_forward_cached(cache.pool1, params.fire2);
        cache.fire3 = detail::fire_forward_cached(cache.fire2.output, params.fire3);
        cache.pool2 = maxpool2(cache.fire3.output, &cache.pool2_idx);
        cache.fire4 = detail::fire_forward_cached(cache.pool2, params.fire4);
    } catch (const InvalidParameterError&) {
        throw InvalidParameterError(
            "neuralnet.network_forward: patch too small for the network stack");
    }
    cache.features = activation_to_descriptors(cache.fire4.output);
    cache.assignments = encoding_assignments(cache.features, params.encoding);
    cache.aggregate = encoding_aggregate(cache.features, params.encoding, cache.assignments);
    auto [encoded, norm] = l2_normalize(cache.aggregate);
    cache.encoded = std::move(encoded);
    cache.encode_norm = norm;
    cache.logits = linear(cache.encoded, params.fc_w, params.fc_b);
    cache.probs = softmax(cache.logits);
    return cache;
}

// Classifies one patch; returns (logits, probabilities).
template <typename T>
std::pair<std::vector<T>, std::vector<T>> network_forward(const Image& patch,
                                                          const NetworkParamsT<T>& params,
                                                          const NetworkConfig& cfg) {
    ForwardCache<T> cache = network_forward_cached(patch, params, cfg);
    return {std::move(cache.logits), std::move(cache.probs)};
}

// Cross-entropy loss and reverse-mode gradients for one labeled patch.
// Gradients accumulate into `grads` (callers zero or batch-sum as needed);
// returns the loss, and the class probabilities via `probs_out` when given.
template <typename T>
T network_backward(const Image& patch, int label, const NetworkParamsT<T>& params,
                   const NetworkConfig& cfg, NetworkParamsT<T>& grads,
                   std::vector<T>* probs_out = nullptr) {
    ForwardCache<T> cache = network_forward_cached(patch, params, cfg);
    const T loss = cross_entropy_loss(cache.probs, label);
    if (probs_out) *probs_out = cache.probs;

    // softmax + cross entropy collapse to p - onehot at the logits
    std::vector<T> dlogits = cache.probs;
    dlogits[static_cast<std::size_t>(label)] -= T(1);

    std::vector<T> dencoded;
    linear_backward(cache.encoded, params.fc_w, dlogits, dencoded, grads.fc_w, grads.fc_b);

    // through the L2 normalization y = e / ||e||
    std::vector<T> dagg(dencoded.size());
    if (cache.encode_norm > T(0)) {
        T dot = T(0);
        for (std::size_t i = 0; i < dencoded.size(); ++i) dot += cache.encoded[i] * dencoded[i];
        for (std::size_t i = 0; i < dencoded.size(); ++i)
            dagg[i] = (dencoded[i] - cache.encoded[i] * dot) / cache.encode_norm;
    } else {
        dagg = dencoded;
    }

    TensorT<T> dfeatures = zeros_like(cache.features);
    encoding_backward(cache.features, params.encoding, cache.assignments, dagg, dfeatures,
                      grads.encoding);

    // descriptors back to the C x H x W activation
    const TensorT<T>& f4 = cache.fire4.output;
    TensorT<T> dfire4 = zeros_like(f4);
    const int hw = f4.dim(1) * f4.dim(2);
    for (int ch = 0; ch < f4.dim(0); ++ch)
        for (int i = 0; i < hw; ++i)
            dfire4.data[static_cast<std::size_t>(ch) * hw + i] = dfeatures.at2(i, ch);

    TensorT<T> dpool2 = detail::fire_backward(cache.fire4, params.fire4, dfire4, grads.fire4);
    TensorT<T> dfire3_out = zeros_like(cache.fire3.output);
    maxpool2_backward(cache.pool2_idx, dpool2, dfire3_out);
    TensorT<T> dfire2_out = detail::fire_backward(cache.fire3, params.fire3, dfire3_out, grads.fire3);
    TensorT<T> dpool1 = detail::fire_backward(cache.fire2, params.fire2, dfire2_out, grads.fire2);
    TensorT<T> dconv1_act = zeros_like(cache.conv1_act);
    maxpool2_backward(cache.pool1_idx, dpool1, dconv1_act);
    const TensorT<T> dconv1_pre = relu_backward(cache.conv1_pre, dconv1_act);
    TensorT<T> dinput = zeros_like(cache.input);
    conv2d_backward(cache.input, params.conv1_w, 2, 1, dconv1_pre, dinput, grads.conv1_w,
                    grads.conv1_b);
    return loss;
}

}  // namespace crackpot
