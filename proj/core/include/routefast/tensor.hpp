// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "routefast/graph.hpp"

namespace routefast {

class ShapeMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense row-major tensor. f16 is emulated: values are stored as f32 but have
// been round-tripped through IEEE binary16, which is all the padding-bias
// semantics need (-65504 is exactly representable).
struct Tensor {
    std::vector<int64_t> shape;
    DType dtype = DType::f32;
    std::vector<float> data;

    Tensor() = default;
    Tensor(std::vector<int64_t> shape_in, DType dtype_in = DType::f32);

    std::size_t numel() const;
    int64_t dim(std::size_t i) const { return shape.at(i); }

    static Tensor zeros(std::vector<int64_t> shape, DType dtype = DType::f32);
    static Tensor full(std::vector<int64_t> shape, float value, DType dtype = DType::f32);
    // uniform in [-1, 1), deterministic in `rng`
    static Tensor random(std::vector<int64_t> shape, std::mt19937_64& rng,
                         DType dtype = DType::f32);
};

std::size_t shape_numel(const std::vector<int64_t>& shape);

// IEEE 754 binary16 conversion with round-to-nearest-even.
uint16_t float_to_half(float value);
float half_to_float(uint16_t bits);
float quantize_f16(float value);

}  // namespace routefast
