#include "crackpot/train.hpp"

#include <cstdio>
#include <fstream>

namespace crackpot {

std::vector<int> shuffled_indices(std::size_t n, std::mt19937& gen) {
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = i + gen() % (n - i);
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

TrainResult train(const std::vector<LabeledPatch>& dataset, const NetworkConfig& cfg,
                  const TrainHyper& hyper) {
    if (dataset.empty())
        throw InvalidParameterError("dataeval.train: empty dataset");
    if (hyper.batch < 1 || hyper.epochs < 0 || hyper.lr <= 0)
        throw InvalidParameterError("dataeval.train: batch >= 1, epochs >= 0, lr > 0 required");

    TrainResult result;
    result.params = init_params<float>(cfg, hyper.seed);
    AdamState state = make_adam_state<float>(cfg);
    AdamConfig adam{hyper.lr, hyper.beta1, hyper.beta2, hyper.eps};
    std::mt19937 shuffle_gen(hyper.seed);

    const std::size_t n = dataset.size();
    NetworkParams grads = make_params<float>(cfg);
    std::vector<float> probs;

    for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
        const std::vector<int> order = shuffled_indices(n, shuffle_gen);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(hyper.batch)) {
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(hyper.batch));
            grads.for_each([](const char*, Tensor& t) {
                std::fill(t.data.begin(), t.data.end(), 0.0f);
            });
            for (std::size_t s = start; s < end; ++s) {
                const LabeledPatch& sample = dataset[static_cast<std::size_t>(order[s])];
                loss_sum += network_backward(sample.pixels, sample.label, result.params, cfg,
                                             grads, &probs);
                const int predicted = probs[1] >= 0.5f ? 1 : 0;
                if (predicted == sample.label) ++correct;
            }
            const float inv = 1.0f / float(end - start);
            grads.for_each([&](const char*, Tensor& t) {
                for (float& v : t.data) v *= inv;
            });
            adam_step(result.params, grads, state, adam);
        }
        result.log.push_back(EpochStats{epoch, loss_sum / double(n), double(correct) / double(n)});
    }
    return result;
}

MetricsReport evaluate(const std::vector<LabeledPatch>& dataset, const NetworkParams& params,
                       const NetworkConfig& cfg, double threshold) {
    if (dataset.empty())
        throw InvalidParameterError("dataeval.evaluate: empty dataset");
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    for (const LabeledPatch& sample : dataset) {
        auto [logits, probs] = network_forward(sample.pixels, params, cfg);
        (void)logits;
        const bool predicted = double(probs[1]) >= threshold;
        if (predicted && sample.label == 1) ++tp;
        else if (predicted && sample.label == 0) ++fp;
        else if (!predicted && sample.label == 0) ++tn;
        else ++fn;
    }
    return compute_metrics(tp, fp, tn, fn);
}

void write_train_log_csv(const std::string& path, const std::vector<EpochStats>& log) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw NotFoundError("dataeval.write_train_log_csv: cannot open " + path);
    out << "epoch,mean_loss,train_accuracy\n";
    char line[96];
    for (const EpochStats& e : log) {
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f\n", e.epoch, e.mean_loss, e.accuracy);
        out << line;
    }
}

}  // namespace crackpot
