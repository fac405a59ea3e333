#pragma once

#include <random>
#include <string>

#include "crackpot/network.hpp"

namespace crackpot {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

// Verifies every parameter coordinate of the reverse-mode gradient against
// central finite differences in 64-bit arithmetic on a deterministic random
// patch. rel = |a - n| / max(|a|, |n|, 1e-4).
//
// Parameters are jittered away from the freshly initialized point: zero
// biases put relu pre-activations exactly on the kink (an all-zero squeezed
// vector through a 1x1 conv lands on the bias), where one-sided finite
// differences disagree with the subgradient by construction.
inline GradCheckResult gradient_check(const NetworkConfig& cfg, std::uint32_t seed,
                                      double h = 1e-5) {
    NetworkParamsT<double> params = init_params<double>(cfg, seed);
    std::mt19937 jitter(seed + 2);
    params.for_each([&](const char*, TensorT<double>& t) {
        for (double& v : t.data) v += (jitter() * (1.0 / 4294967296.0) - 0.5) * 0.1;
    });

    std::mt19937 gen(seed + 1);
    Image patch = Image::make(cfg.patch_size, cfg.patch_size, 1);
    for (auto& v : patch.data) v = static_cast<std::uint8_t>(gen() % 256);
    const int label = 1;

    NetworkParamsT<double> grads = make_params<double>(cfg);
    network_backward(patch, label, params, cfg, grads);

    auto loss_at = [&]() {
        auto [logits, probs] = network_forward(patch, params, cfg);
        (void)logits;
        return cross_entropy_loss(probs, label);
    };

    GradCheckResult result;
    std::vector<TensorT<double>*> ptensors;
    std::vector<const TensorT<double>*> gtensors;
    std::vector<std::string> names;
    params.for_each([&](const char* name, TensorT<double>& t) {
        ptensors.push_back(&t);
        names.push_back(name);
    });
    grads.for_each([&](const char*, const TensorT<double>& t) { gtensors.push_back(&t); });

    for (std::size_t ti = 0; ti < ptensors.size(); ++ti) {
        TensorT<double>& t = *ptensors[ti];
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            const double saved = t.data[i];
            t.data[i] = saved + h;
            const double lp = loss_at();
            t.data[i] = saved - h;
            const double lm = loss_at();
            t.data[i] = saved;
            const double numeric = (lp - lm) / (2.0 * h);
            const double analytic = gtensors[ti]->data[i];
            const double denom =
                std::max({std::abs(analytic), std::abs(numeric), 1e-4});
            const double rel = std::abs(analytic - numeric) / denom;
            ++result.checked;
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_tensor = names[ti];
                result.worst_index = i;
            }
        }
    }
    return result;
}

}  // namespace crackpot
