#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crackpot/encoding.hpp"
#include "oracles.hpp"

using namespace crackpot;

namespace {

EncodingParamsT<double> random_encoding(std::mt19937& gen, int k, int d) {
    EncodingParamsT<double> p;
    p.codewords = TensorT<double>({k, d});
    p.smoothing = TensorT<double>({k});
    for (auto& v : p.codewords.data) v = gen() * (1.0 / 4294967296.0) * 4.0 - 2.0;
    for (auto& v : p.smoothing.data) v = 0.1 + gen() * (1.0 / 4294967296.0) * 1.9;
    return p;
}

TensorT<double> random_features(std::mt19937& gen, int n, int d) {
    TensorT<double> f({n, d});
    for (auto& v : f.data) v = gen() * (1.0 / 4294967296.0) * 4.0 - 2.0;
    return f;
}

}  // namespace

TEST_CASE("K=1 assigns weight 1 to every descriptor") {
    std::mt19937 gen(1);
    const TensorT<double> features = random_features(gen, 5, 3);
    const EncodingParamsT<double> params = random_encoding(gen, 1, 3);
    const TensorT<double> assign = encoding_assignments(features, params);
    for (double a : assign.data) CHECK(a == 1.0);
}

TEST_CASE("all descriptors equal to the single codeword give a zero vector") {
    EncodingParamsT<double> params;
    params.codewords = TensorT<double>({1, 4});
    params.codewords.data = {0.5, -1.0, 2.0, 0.0};
    params.smoothing = TensorT<double>({1}, 1.0);
    TensorT<double> features({3, 4});
    for (int i = 0; i < 3; ++i)
        for (int e = 0; e < 4; ++e) features.at2(i, e) = params.codewords.data[static_cast<std::size_t>(e)];
    const std::vector<double> out = encoding_forward(features, params);
    REQUIRE(out.size() == 4);
    for (double v : out) CHECK(v == 0.0);  // zero vector stays unnormalized
}

TEST_CASE("worked N=2 D=1 K=2 example") {
    TensorT<double> features({2, 1});
    features.data = {0.0, 1.0};
    EncodingParamsT<double> params;
    params.codewords = TensorT<double>({2, 1});
    params.codewords.data = {0.0, 1.0};
    params.smoothing = TensorT<double>({2}, 1.0);

    const TensorT<double> assign = encoding_assignments(features, params);
    CHECK(assign.at2(0, 0) == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(assign.at2(0, 1) == doctest::Approx(0.2689).epsilon(1e-4));
    CHECK(assign.at2(1, 0) == doctest::Approx(0.2689).epsilon(1e-4));
    CHECK(assign.at2(1, 1) == doctest::Approx(0.7311).epsilon(1e-4));

    const std::vector<double> agg = encoding_aggregate(features, params);
    REQUIRE(agg.size() == 2);
    CHECK(agg[0] == doctest::Approx(0.13445).epsilon(1e-4));
    CHECK(agg[1] == doctest::Approx(-0.13445).epsilon(1e-4));

    const std::vector<double> out = encoding_forward(features, params);
    CHECK(out[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(out[1] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("assignment rows sum to 1") {
    std::mt19937 gen(2);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + int(gen() % 16), d = 1 + int(gen() % 8), k = 1 + int(gen() % 8);
        const TensorT<double> features = random_features(gen, n, d);
        const EncodingParamsT<double> params = random_encoding(gen, k, d);
        const TensorT<double> assign = encoding_assignments(features, params);
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j < k; ++j) sum += assign.at2(i, j);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
        // 32-bit mode holds the looser bound
        const TensorT<float> f32 = cast_tensor<float>(features);
        EncodingParamsT<float> p32;
        p32.codewords = cast_tensor<float>(params.codewords);
        p32.smoothing = cast_tensor<float>(params.smoothing);
        const TensorT<float> assign32 = encoding_assignments(f32, p32);
        for (int i = 0; i < n; ++i) {
            float sum = 0.0f;
            for (int j = 0; j < k; ++j) sum += assign32.at2(i, j);
            CHECK(std::abs(sum - 1.0f) < 1e-6f);
        }
    }
}

TEST_CASE("output length is K*D regardless of N") {
    std::mt19937 gen(3);
    const EncodingParamsT<double> params = random_encoding(gen, 5, 3);
    for (int n : {1, 2, 7, 64, 199}) {
        const TensorT<double> features = random_features(gen, n, 3);
        CHECK(encoding_forward(features, params).size() == 15);
    }
}

TEST_CASE("encoding matches the literal formula evaluation") {
    std::mt19937 gen(4);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + int(gen() % 16), d = 1 + int(gen() % 8), k = 1 + int(gen() % 8);
        const TensorT<double> features = random_features(gen, n, d);
        const EncodingParamsT<double> params = random_encoding(gen, k, d);

        const oracles::Eq1Result ref = oracles::eq1_ref(features, params);
        const TensorT<double> assign = encoding_assignments(features, params);
        const std::vector<double> out = encoding_forward(features, params);
        for (std::size_t i = 0; i < assign.data.size(); ++i)
            REQUIRE(assign.data[i] == doctest::Approx(ref.assignments[i]).epsilon(1e-9));
        for (std::size_t i = 0; i < out.size(); ++i)
            REQUIRE(out[i] == doctest::Approx(ref.normalized[i]).epsilon(1e-9));
    }
}

TEST_CASE("encoding is permutation invariant over descriptors") {
    std::mt19937 gen(5);
    const TensorT<double> features = random_features(gen, 9, 4);
    const EncodingParamsT<double> params = random_encoding(gen, 3, 4);
    const std::vector<double> base = encoding_forward(features, params);

    std::vector<int> perm = {8, 2, 5, 0, 7, 1, 4, 6, 3};
    TensorT<double> permuted({9, 4});
    for (int i = 0; i < 9; ++i)
        for (int e = 0; e < 4; ++e) permuted.at2(i, e) = features.at2(perm[static_cast<std::size_t>(i)], e);
    const std::vector<double> shuffled = encoding_forward(permuted, params);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(shuffled[i] == doctest::Approx(base[i]).epsilon(1e-12));
}

TEST_CASE("stabilized exponentials survive huge residual norms") {
    TensorT<double> features({2, 2});
    features.data = {500.0, -500.0, -500.0, 500.0};
    EncodingParamsT<double> params;
    params.codewords = TensorT<double>({2, 2});
    params.codewords.data = {-500.0, 500.0, 500.0, -500.0};
    params.smoothing = TensorT<double>({2}, 5.0);
    const std::vector<double> out = encoding_forward(features, params);
    for (double v : out) CHECK(std::isfinite(v));
    const TensorT<double> assign = encoding_assignments(features, params);
    for (double a : assign.data) CHECK(std::isfinite(a));
}

TEST_CASE("descriptor dimension mismatch is rejected") {
    std::mt19937 gen(6);
    const TensorT<double> features = random_features(gen, 4, 3);
    const EncodingParamsT<double> params = random_encoding(gen, 2, 5);
    CHECK_THROWS_AS(encoding_forward(features, params), InvalidParameterError);
}
