// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/tensor.hpp"

#include <bit>
#include <cmath>

namespace routefast {

std::size_t shape_numel(const std::vector<int64_t>& shape) {
    std::size_t n = 1;
    for (int64_t d : shape) {
        if (d < 0) throw ShapeMismatch("negative dimension");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

Tensor::Tensor(std::vector<int64_t> shape_in, DType dtype_in)
    : shape(std::move(shape_in)), dtype(dtype_in), data(shape_numel(shape), 0.0f) {}

std::size_t Tensor::numel() const { return shape_numel(shape); }

Tensor Tensor::zeros(std::vector<int64_t> shape, DType dtype) {
    return Tensor(std::move(shape), dtype);
}

Tensor Tensor::full(std::vector<int64_t> shape, float value, DType dtype) {
    Tensor t(std::move(shape), dtype);
    std::fill(t.data.begin(), t.data.end(), value);
    return t;
}

Tensor Tensor::random(std::vector<int64_t> shape, std::mt19937_64& rng, DType dtype) {
    Tensor t(std::move(shape), dtype);
    for (auto& v : t.data) {
        // 53-bit draw mapped to [-1, 1); avoids std::uniform_real_distribution
        // so the stream is identical across standard libraries
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = static_cast<float>(2.0 * u - 1.0);
        if (dtype == DType::f16) v = quantize_f16(v);
    }
    return t;
}

uint16_t float_to_half(float value) {
    uint32_t bits = std::bit_cast<uint32_t>(value);
    uint32_t sign = (bits >> 16) & 0x8000u;
    int32_t exponent = static_cast<int32_t>((bits >> 23) & 0xFFu) - 127 + 15;
    uint32_t mantissa = bits & 0x7FFFFFu;

    if (((bits >> 23) & 0xFFu) == 0xFFu) {  // inf / nan
        return static_cast<uint16_t>(sign | 0x7C00u | (mantissa ? 0x200u : 0u));
    }
    if (exponent >= 0x1F) {  // overflow -> inf
        return static_cast<uint16_t>(sign | 0x7C00u);
    }
    if (exponent <= 0) {  // subnormal or zero
        if (exponent < -10) return static_cast<uint16_t>(sign);
        mantissa |= 0x800000u;
        int shift = 14 - exponent;
        uint32_t half_mant = mantissa >> shift;
        uint32_t rem = mantissa & ((1u << shift) - 1);
        uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (half_mant & 1u))) ++half_mant;
        return static_cast<uint16_t>(sign | half_mant);
    }
    uint32_t half = sign | (static_cast<uint32_t>(exponent) << 10) | (mantissa >> 13);
    uint32_t rem = mantissa & 0x1FFFu;
    if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half;  // may carry into exponent
    return static_cast<uint16_t>(half);
}

float half_to_float(uint16_t bits) {
    uint32_t sign = static_cast<uint32_t>(bits & 0x8000u) << 16;
    uint32_t exponent = (bits >> 10) & 0x1Fu;
    uint32_t mantissa = bits & 0x3FFu;

    if (exponent == 0x1Fu) {  // inf / nan
        return std::bit_cast<float>(sign | 0x7F800000u | (mantissa << 13));
    }
    if (exponent == 0) {
        if (mantissa == 0) return std::bit_cast<float>(sign);
        // normalize subnormal
        int shift = 0;
        while ((mantissa & 0x400u) == 0) {
            mantissa <<= 1;
            ++shift;
        }
        mantissa &= 0x3FFu;
        exponent = static_cast<uint32_t>(1 - shift);
    }
    uint32_t f32_exp = exponent - 15 + 127;
    return std::bit_cast<float>(sign | (f32_exp << 23) | (mantissa << 13));
}

float quantize_f16(float value) { return half_to_float(float_to_half(value)); }

}  // namespace routefast
