#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crackpot/network.hpp"
#include "oracles.hpp"

using namespace crackpot;

TEST_CASE("zero parameters produce logits [0,0] and probs [0.5,0.5]") {
    NetworkConfig cfg;
    const NetworkParams params = make_params<float>(cfg);
    std::mt19937 gen(1);
    const Image patch = oracles::random_image(gen, 64, 64, 3);
    auto [logits, probs] = network_forward(patch, params, cfg);
    CHECK(logits[0] == 0.0f);
    CHECK(logits[1] == 0.0f);
    CHECK(probs[0] == doctest::Approx(0.5));
    CHECK(probs[1] == doctest::Approx(0.5));
}

TEST_CASE("forward is deterministic for identical patches") {
    NetworkConfig cfg;
    const NetworkParams params = init_params<float>(cfg, 3);
    std::mt19937 gen(2);
    const Image patch = oracles::random_image(gen, 64, 64, 1);
    const Image copy = patch;
    auto [l1, p1] = network_forward(patch, params, cfg);
    auto [l2, p2] = network_forward(copy, params, cfg);
    CHECK(l1 == l2);
    CHECK(p1 == p2);
}

TEST_CASE("64x64 and 99x99 patches produce the same K*D encoding length") {
    NetworkConfig cfg;
    const NetworkParams params = init_params<float>(cfg, 5);
    std::mt19937 gen(3);
    const Image small = oracles::random_image(gen, 64, 64, 3);
    const Image large = oracles::random_image(gen, 99, 99, 3);

    const auto cache_small = network_forward_cached(small, params, cfg);
    const auto cache_large = network_forward_cached(large, params, cfg);
    const std::size_t kd = static_cast<std::size_t>(cfg.codewords) * cfg.descriptor_dim();
    CHECK(cache_small.encoded.size() == kd);
    CHECK(cache_large.encoded.size() == kd);
    // descriptor counts differ, outputs are still 2-class distributions
    CHECK(cache_small.features.dim(0) != cache_large.features.dim(0));
    CHECK(cache_small.probs.size() == 2);
    CHECK(cache_large.probs.size() == 2);
    CHECK(cache_small.probs[0] + cache_small.probs[1] == doctest::Approx(1.0));
    CHECK(cache_large.probs[0] + cache_large.probs[1] == doctest::Approx(1.0));
}

TEST_CASE("gray patches are replicated over the input channels") {
    NetworkConfig cfg;
    const NetworkParams params = init_params<float>(cfg, 7);
    std::mt19937 gen(4);
    const Image gray = oracles::random_image(gen, 64, 64, 1);
    Image rgb = Image::make(64, 64, 3);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = gray.at(x, y);
    auto [lg, pg] = network_forward(gray, params, cfg);
    auto [lr, pr] = network_forward(rgb, params, cfg);
    CHECK(lg == lr);
    CHECK(pg == pr);
}

TEST_CASE("patches too small for the stack are rejected") {
    NetworkConfig cfg;
    const NetworkParams params = make_params<float>(cfg);
    const Image tiny = Image::make(4, 4, 3, 100);
    CHECK_THROWS_AS(network_forward(tiny, params, cfg), InvalidParameterError);
}

TEST_CASE("init_params is reproducible and seed-sensitive") {
    NetworkConfig cfg = small_gradcheck_config();
    auto flatten = [&](const NetworkParamsT<float>& p) {
        std::vector<float> all;
        p.for_each([&](const char*, const Tensor& t) {
            all.insert(all.end(), t.data.begin(), t.data.end());
        });
        return all;
    };
    CHECK(flatten(init_params<float>(cfg, 42)) == flatten(init_params<float>(cfg, 42)));
    CHECK(flatten(init_params<float>(cfg, 42)) != flatten(init_params<float>(cfg, 43)));
}

TEST_CASE("init_params distribution shape: biases zero, smoothing one, mean near zero") {
    NetworkConfig cfg;  // conv1 holds 32*3*3*3 = 864 samples
    const NetworkParamsT<double> params = init_params<double>(cfg, 11);
    for (double v : params.conv1_b.data) CHECK(v == 0.0);
    for (double v : params.encoding.smoothing.data) CHECK(v == 1.0);

    const double bound = std::sqrt(6.0 / 27.0);
    double mean = 0.0;
    for (double v : params.conv1_w.data) {
        CHECK(std::abs(v) <= bound);
        mean += v;
    }
    const std::size_t n = params.conv1_w.data.size();
    mean /= double(n);
    // sample mean of uniform(-a, a) has sigma = a / sqrt(3 n)
    const double sigma = bound / std::sqrt(3.0 * double(n));
    CHECK(std::abs(mean) <= 3.0 * sigma);
}

TEST_CASE("parameter count is a pure function of the config") {
    CHECK(param_count(small_gradcheck_config()) == 886);
    NetworkConfig cfg;
    CHECK(param_count(cfg) == param_count(NetworkConfig{}));
}

TEST_CASE("config integer round-trip and validation") {
    NetworkConfig cfg;
    const NetworkConfig back = NetworkConfig::from_ints(cfg.to_ints());
    CHECK(back.to_ints() == cfg.to_ints());

    auto ints = cfg.to_ints();
    ints[9] = 999;  // stored D inconsistent with fire4_expand
    CHECK_THROWS_AS(NetworkConfig::from_ints(ints), InvalidParameterError);
}

TEST_CASE("duplicate sample gradients add linearly") {
    NetworkConfig cfg = small_gradcheck_config();
    const NetworkParamsT<double> params = init_params<double>(cfg, 9);
    std::mt19937 gen(5);
    const Image patch = oracles::random_image(gen, 16, 16, 1);

    NetworkParamsT<double> once = make_params<double>(cfg);
    network_backward(patch, 1, params, cfg, once);
    NetworkParamsT<double> twice = make_params<double>(cfg);
    network_backward(patch, 1, params, cfg, twice);
    network_backward(patch, 1, params, cfg, twice);

    std::vector<const TensorT<double>*> t1, t2;
    once.for_each([&](const char*, const TensorT<double>& t) { t1.push_back(&t); });
    twice.for_each([&](const char*, const TensorT<double>& t) { t2.push_back(&t); });
    for (std::size_t ti = 0; ti < t1.size(); ++ti)
        for (std::size_t i = 0; i < t1[ti]->data.size(); ++i)
            CHECK(t2[ti]->data[i] == doctest::Approx(2.0 * t1[ti]->data[i]).epsilon(1e-12));
}

TEST_CASE("softmax cross entropy gradient is p - onehot at the logits") {
    NetworkConfig cfg = small_gradcheck_config();
    const NetworkParamsT<double> params = init_params<double>(cfg, 13);
    std::mt19937 gen(6);
    const Image patch = oracles::random_image(gen, 16, 16, 1);

    NetworkParamsT<double> grads = make_params<double>(cfg);
    std::vector<double> probs;
    network_backward(patch, 1, params, cfg, grads, &probs);
    // fc bias gradient receives dlogits directly
    CHECK(grads.fc_b.data[0] == doctest::Approx(probs[0]).epsilon(1e-12));
    CHECK(grads.fc_b.data[1] == doctest::Approx(probs[1] - 1.0).epsilon(1e-12));
}
