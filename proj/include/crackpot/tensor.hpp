#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "crackpot/error.hpp"

namespace crackpot {

// Dense row-major numeric array, rank 1-4. Activations use C x H x W layout.
// T is float for training/inference and double for gradient checking.
template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;

    TensorT() = default;
    explicit TensorT(std::vector<int> s, T fill = T(0)) : shape(std::move(s)) {
        data.assign(numel_of(shape), fill);
    }

    static std::size_t numel_of(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int e : s) {
            if (e < 0) throw InvalidParameterError("neuralnet.Tensor: negative extent");
            n *= static_cast<std::size_t>(e);
        }
        return n;
    }

    int rank() const { return static_cast<int>(shape.size()); }
    std::size_t numel() const { return data.size(); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    T& at3(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * dim(1) + y) * dim(2) + x];
    }
    T at3(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * dim(1) + y) * dim(2) + x];
    }
    T& at4(int o, int c, int y, int x) {
        return data[((static_cast<std::size_t>(o) * dim(1) + c) * dim(2) + y) * dim(3) + x];
    }
    T at4(int o, int c, int y, int x) const {
        return data[((static_cast<std::size_t>(o) * dim(1) + c) * dim(2) + y) * dim(3) + x];
    }
    T& at2(int r, int c) { return data[static_cast<std::size_t>(r) * dim(1) + c]; }
    T at2(int r, int c) const { return data[static_cast<std::size_t>(r) * dim(1) + c]; }
};

using Tensor = TensorT<float>;

template <typename T>
TensorT<T> zeros_like(const TensorT<T>& t) {
    return TensorT<T>(t.shape);
}

template <typename U, typename T>
TensorT<U> cast_tensor(const TensorT<T>& t) {
    TensorT<U> out(t.shape);
    for (std::size_t i = 0; i < t.data.size(); ++i) out.data[i] = static_cast<U>(t.data[i]);
    return out;
}

}  // namespace crackpot
