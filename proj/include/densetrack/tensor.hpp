// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "densetrack/errors.hpp"

namespace densetrack {

// Dense row-major tensor. Small by design: shape + contiguous storage.
// Layouts used throughout: {C,H,W} for images/features, {rows,cols} for
// affinity matrices, {Cout,Cin,K,K} for convolution kernels.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(numel_of(shape), T(0)) {}
    Tensor(std::initializer_list<int> s) : Tensor(std::vector<int>(s)) {}

    static long numel_of(const std::vector<int>& s) {
        long n = 1;
        for (int d : s) {
            if (d < 0) throw ShapeError("negative tensor dimension");
            n *= d;
        }
        return n;
    }

    long numel() const { return static_cast<long>(data.size()); }
    int ndim() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    bool empty() const { return data.empty(); }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    T& operator[](long i) { return data[static_cast<std::size_t>(i)]; }
    const T& operator[](long i) const { return data[static_cast<std::size_t>(i)]; }

    // {C,H,W} accessors.
    T& at3(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * shape[1] + y) * shape[2] + x];
    }
    const T& at3(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * shape[1] + y) * shape[2] + x];
    }
    // {rows,cols} accessors.
    T& at2(long r, long c) { return data[static_cast<std::size_t>(r) * shape[1] + c]; }
    const T& at2(long r, long c) const { return data[static_cast<std::size_t>(r) * shape[1] + c]; }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

using Tensorf = Tensor<float>;
using Tensord = Tensor<double>;

template <typename T>
void require_shape(const Tensor<T>& t, const std::vector<int>& s, const char* what) {
    if (t.shape != s) throw ShapeError(std::string("unexpected tensor shape for ") + what);
}

// y += a * x (elementwise, shapes must match)
template <typename T>
void axpy(T a, const Tensor<T>& x, Tensor<T>& y) {
    if (!x.same_shape(y)) throw ShapeError("axpy shape mismatch");
    for (long i = 0; i < x.numel(); ++i) y[i] += a * x[i];
}

template <typename T>
T max_abs(const Tensor<T>& t) {
    T m = T(0);
    for (const T& v : t.data) m = std::max(m, std::abs(v));
    return m;
}

template <typename T, typename U>
Tensor<U> tensor_cast(const Tensor<T>& t) {
    Tensor<U> out(t.shape);
    for (long i = 0; i < t.numel(); ++i) out[i] = static_cast<U>(t[i]);
    return out;
}

}  // namespace densetrack
