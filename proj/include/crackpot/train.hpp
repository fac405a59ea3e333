#pragma once

#include <random>
#include <string>
#include <vector>

#include "crackpot/adam.hpp"
#include "crackpot/dataset.hpp"
#include "crackpot/metrics.hpp"
#include "crackpot/network.hpp"

namespace crackpot {

struct TrainHyper {
    double lr = 1e-5;
    int batch = 64;
    int epochs = 20;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint32_t seed = 1;
};

struct EpochStats {
    int epoch = 0;          // 1-based
    double mean_loss = 0.0;
    double accuracy = 0.0;  // training accuracy at threshold 0.5
};

struct TrainResult {
    NetworkParams params;
    std::vector<EpochStats> log;
};

// Seeded Fisher-Yates permutation of 0..n-1 (a multiset-preserving shuffle).
std::vector<int> shuffled_indices(std::size_t n, std::mt19937& gen);

// Supervised training: per epoch, shuffle, walk batches (the final short batch
// is kept), average gradients over each batch, and take one Adam step per
// batch. Deterministic for a fixed seed; epochs = 0 returns the initialized
// parameters untouched.
TrainResult train(const std::vector<LabeledPatch>& dataset, const NetworkConfig& cfg,
                  const TrainHyper& hyper);

// Classifies every patch (crack iff crack-class probability >= threshold) and
// accumulates the confusion counts with label 1 as positive.
MetricsReport evaluate(const std::vector<LabeledPatch>& dataset, const NetworkParams& params,
                       const NetworkConfig& cfg, double threshold);

// CSV: epoch,mean_loss,train_accuracy with 6 decimal digits.
void write_train_log_csv(const std::string& path, const std::vector<EpochStats>& log);

}  // namespace crackpot
