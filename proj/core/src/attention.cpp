// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace routefast {

namespace {

void check_qkv(const Tensor& q, const Tensor& k, const Tensor& v) {
    if (q.shape.size() != 4 || k.shape.size() != 4 || v.shape.size() != 4) {
        throw ShapeMismatch("attention inputs must be [B,H,S,d]");
    }
    if (q.shape != k.shape || q.shape != v.shape) {
        throw ShapeMismatch("Q, K, V must have identical shapes");
    }
}

// mask2d entry with [B|1, H|1, S, S] broadcasting
inline float mask_at(const Tensor& m, int64_t b, int64_t h, int64_t i, int64_t j) {
    int64_t mb = m.shape[0] == 1 ? 0 : b;
    int64_t mh = m.shape[1] == 1 ? 0 : h;
    std::size_t idx = static_cast<std::size_t>(
        ((mb * m.shape[1] + mh) * m.shape[2] + i) * m.shape[3] + j);
    return m.data[idx];
}

}  // namespace

double AttentionSpec::effective_scale(int64_t head_dim) const {
    return scale != 0.0 ? scale : 1.0 / std::sqrt(static_cast<double>(head_dim));
}

Tensor sdpa(const Tensor& q, const Tensor& k, const Tensor& v, const Tensor* mask2d,
            double scale) {
    check_qkv(q, k, v);
    const int64_t B = q.shape[0], H = q.shape[1], S = q.shape[2], d = q.shape[3];
    if (mask2d) {
        const auto& ms = mask2d->shape;
        if (ms.size() != 4 || ms[2] != S || ms[3] != S ||
            (ms[0] != 1 && ms[0] != B) || (ms[1] != 1 && ms[1] != H)) {
            throw ShapeMismatch("mask2d must broadcast over [B,H,S,S]");
        }
    }

    Tensor out({B, H, S, d});
    std::vector<double> scores(static_cast<std::size_t>(S) * static_cast<std::size_t>(S));

    for (int64_t b = 0; b < B; ++b) {
        for (int64_t h = 0; h < H; ++h) {
            const std::size_t base = static_cast<std::size_t>((b * H + h) * S * d);
            const float* qp = q.data.data() + base;
            const float* kp = k.data.data() + base;
            const float* vp = v.data.data() + base;
            float* op = out.data.data() + base;

            for (int64_t i = 0; i < S; ++i) {
                for (int64_t j = 0; j < S; ++j) {
                    double dot = 0.0;
                    for (int64_t c = 0; c < d; ++c) {
                        dot += static_cast<double>(qp[i * d + c]) *
                               static_cast<double>(kp[j * d + c]);
                    }
                    double s = dot * scale;
                    if (mask2d) s += static_cast<double>(mask_at(*mask2d, b, h, i, j));
                    scores[static_cast<std::size_t>(i * S + j)] = s;
                }
            }

            for (int64_t i = 0; i < S; ++i) {
                double* row = scores.data() + static_cast<std::size_t>(i * S);
                double row_max = -std::numeric_limits<double>::infinity();
                bool any_live = false;
                for (int64_t j = 0; j < S; ++j) {
                    bool masked = mask2d &&
                                  mask_at(*mask2d, b, h, i, j) <= kMaskThreshold;
                    if (!masked) any_live = true;
                    row_max = std::max(row_max, row[j]);
                }
                if (!any_live) {  // fully masked row: zeros by convention
                    for (int64_t c = 0; c < d; ++c) op[i * d + c] = 0.0f;
                    continue;
                }
                double denom = 0.0;
                for (int64_t j = 0; j < S; ++j) {
                    row[j] = std::exp(row[j] - row_max);
                    denom += row[j];
                }
                for (int64_t c = 0; c < d; ++c) {
                    double acc = 0.0;
                    for (int64_t j = 0; j < S; ++j) {
                        acc += row[j] * static_cast<double>(vp[j * d + c]);
                    }
                    op[i * d + c] = static_cast<float>(acc / denom);
                }
            }
        }
    }
    return out;
}

Tensor flash_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                       const AttentionSpec& spec, int64_t tile, FlashStats* stats) {
    check_qkv(q, k, v);
    const int64_t B = q.shape[0], H = q.shape[1], S = q.shape[2], d = q.shape[3];
    if (tile < 1) throw ShapeMismatch("tile must be >= 1");
    if (spec.pad_bias) {
        const auto& ps = spec.pad_bias->shape;
        if (ps.size() != 4 || ps[0] != B || ps[1] != 1 || ps[2] != 1 || ps[3] != S) {
            throw ShapeMismatch("pad_bias must be [B,1,1,S]");
        }
    }
    const double scale = spec.effective_scale(d);

    Tensor out({B, H, S, d});
    // running softmax state per query row, plus one tile of scores
    std::vector<double> row_max(static_cast<std::size_t>(S));
    std::vector<double> row_sum(static_cast<std::size_t>(S));
    std::vector<double> tile_scores(static_cast<std::size_t>(tile));
    std::vector<double> acc(static_cast<std::size_t>(S) * static_cast<std::size_t>(d));

    if (stats) {
        stats->tile_scratch_floats = tile_scores.size();
        stats->row_state_floats = row_max.size() + row_sum.size();
        stats->output_floats = out.data.size();
    }

    auto in_window = [&](int64_t i, int64_t j) {
        if (spec.window_left >= 0 && i - j > spec.window_left) return false;
        if (spec.window_right >= 0 && j - i > spec.window_right) return false;
        return true;
    };

    for (int64_t b = 0; b < B; ++b) {
        const float* pad = spec.pad_bias
                               ? spec.pad_bias->data.data() + static_cast<std::size_t>(b * S)
                               : nullptr;
        for (int64_t h = 0; h < H; ++h) {
            const std::size_t base = static_cast<std::size_t>((b * H + h) * S * d);
            const float* qp = q.data.data() + base;
            const float* kp = k.data.data() + base;
            const float* vp = v.data.data() + base;

            std::fill(row_max.begin(), row_max.end(),
                      -std::numeric_limits<double>::infinity());
            std::fill(row_sum.begin(), row_sum.end(), 0.0);
            std::fill(acc.begin(), acc.end(), 0.0);

            for (int64_t t0 = 0; t0 < S; t0 += tile) {
                const int64_t t1 = std::min(t0 + tile, S);
                for (int64_t i = 0; i < S; ++i) {
                    double tile_max = -std::numeric_limits<double>::infinity();
                    bool any = false;
                    for (int64_t j = t0; j < t1; ++j) {
                        double s = -std::numeric_limits<double>::infinity();
                        bool live = in_window(i, j) &&
                                    (!pad || pad[j] > kMaskThreshold);
                        if (live) {
                            double dot = 0.0;
                            for (int64_t c = 0; c < d; ++c) {
                                dot += static_cast<double>(qp[i * d + c]) *
                                       static_cast<double>(kp[j * d + c]);
                            }
                            s = dot * scale;
                            if (pad) s += static_cast<double>(pad[j]);
                            any = true;
                        }
                        tile_scores[static_cast<std::size_t>(j - t0)] = s;
                        tile_max = std::max(tile_max, s);
                    }
                    if (!any) continue;

                    double new_max = std::max(row_max[i], tile_max);
                    double correction =
                        std::isinf(row_max[i]) ? 0.0 : std::exp(row_max[i] - new_max);
                    if (correction != 1.0) {
                        for (int64_t c = 0; c < d; ++c) {
                            acc[static_cast<std::size_t>(i * d + c)] *= correction;
                        }
                        row_sum[i] *= correction;
                    }
                    for (int64_t j = t0; j < t1; ++j) {
                        double s = tile_scores[static_cast<std::size_t>(j - t0)];
                        if (std::isinf(s)) continue;
                        double w = std::exp(s - new_max);
                        row_sum[i] += w;
                        for (int64_t c = 0; c < d; ++c) {
                            acc[static_cast<std::size_t>(i * d + c)] +=
                                w * static_cast<double>(vp[j * d + c]);
                        }
                    }
                    row_max[i] = new_max;
                }
            }

            float* op = out.data.data() + base;
            for (int64_t i = 0; i < S; ++i) {
                for (int64_t c = 0; c < d; ++c) {
                    double denom = row_sum[i];
                    op[i * d + c] = denom > 0.0
                                        ? static_cast<float>(
                                              acc[static_cast<std::size_t>(i * d + c)] / denom)
                                        : 0.0f;
                }
            }
        }
    }
    return out;
}

Tensor window_to_mask2d(int64_t seq_len, int64_t window_left, int64_t window_right,
                        const Tensor* pad_bias) {
    if (seq_len < 1) throw ShapeMismatch("seq_len must be >= 1");
    int64_t B = 1;
    if (pad_bias) {
        const auto& ps = pad_bias->shape;
        if (ps.size() != 4 || ps[1] != 1 || ps[2] != 1 || ps[3] != seq_len) {
            throw ShapeMismatch("pad_bias must be [B,1,1,S]");
        }
        B = ps[0];
    }
    Tensor mask({B, 1, seq_len, seq_len});
    for (int64_t b = 0; b < B; ++b) {
        const float* pad =
            pad_bias ? pad_bias->data.data() + static_cast<std::size_t>(b * seq_len) : nullptr;
        float* mp = mask.data.data() + static_cast<std::size_t>(b * seq_len * seq_len);
        for (int64_t i = 0; i < seq_len; ++i) {
            for (int64_t j = 0; j < seq_len; ++j) {
                bool live = true;
                if (window_left >= 0 && i - j > window_left) live = false;
                if (window_right >= 0 && j - i > window_right) live = false;
                if (pad && pad[j] <= kMaskThreshold) live = false;
                mp[i * seq_len + j] = live ? 0.0f : kMaskValue;
            }
        }
    }
    return mask;
}

uint64_t mask_memory_bytes(uint64_t batch, uint64_t heads, uint64_t seq_len,
                           uint64_t bytes_per_element) {
    return batch * heads * seq_len * seq_len * bytes_per_element;
}

uint64_t fa_memory_bytes(uint64_t batch, uint64_t heads, uint64_t seq_len, uint64_t head_dim,
                         uint64_t tile, uint64_t bytes_per_element) {
    return batch * heads * (2 * tile * head_dim + seq_len * head_dim) * bytes_per_element;
}

}  // namespace routefast
