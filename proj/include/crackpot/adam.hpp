#pragma once

#include <cmath>

#include "crackpot/network.hpp"

namespace crackpot {

struct AdamConfig {
    double lr = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moment estimates shaped like the parameters, plus the shared
// step counter used for bias correction.
template <typename T>
struct AdamStateT {
    NetworkParamsT<T> m;
    NetworkParamsT<T> v;
    long step = 0;
};

using AdamState = AdamStateT<float>;

template <typename T>
AdamStateT<T> make_adam_state(const NetworkConfig& cfg) {
    AdamStateT<T> st;
    st.m = make_params<T>(cfg);
    st.v = make_params<T>(cfg);
    return st;
}

// One Adam update:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * mhat / (sqrt(vhat) + eps)
// with bias-corrected mhat = m/(1-b1^t), vhat = v/(1-b2^t).
template <typename T>
void adam_step(NetworkParamsT<T>& params, const NetworkParamsT<T>& grads, AdamStateT<T>& state,
               const AdamConfig& cfg) {
    state.step += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, double(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, double(state.step));

    // walk all four structures in lockstep via the canonical tensor order
    std::vector<TensorT<T>*> ptensors, mtensors, vtensors;
    std::vector<const TensorT<T>*> gtensors;
    params.for_each([&](const char*, TensorT<T>& t) { ptensors.push_back(&t); });
    grads.for_each([&](const char*, const TensorT<T>& t) { gtensors.push_back(&t); });
    state.m.for_each([&](const char*, TensorT<T>& t) { mtensors.push_back(&t); });
    state.v.for_each([&](const char*, TensorT<T>& t) { vtensors.push_back(&t); });

    for (std::size_t ti = 0; ti < ptensors.size(); ++ti) {
        TensorT<T>& p = *ptensors[ti];
        const TensorT<T>& g = *gtensors[ti];
        TensorT<T>& m = *mtensors[ti];
        TensorT<T>& v = *vtensors[ti];
        if (!p.same_shape(g) || !p.same_shape(m) || !p.same_shape(v))
            throw InvalidParameterError("neuralnet.adam_step: gradient/state shape mismatch");
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double gi = double(g.data[i]);
            const double mi = cfg.beta1 * double(m.data[i]) + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * double(v.data[i]) + (1.0 - cfg.beta2) * gi * gi;
            m.data[i] = T(mi);
            v.data[i] = T(vi);
            const double mhat = mi / c1;
            const double vhat = vi / c2;
            p.data[i] = T(double(p.data[i]) - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    }
}

}  // namespace crackpot
