// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/bench_report.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

#include "json.hpp"

namespace routefast {

std::string BenchReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = seed;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["tokens"] = r.tokens;
        row["mode"] = r.mode;
        row["iters"] = r.iters;
        row["mean_ms"] = r.mean_ms;
        row["p50_ms"] = r.p50_ms;
        row["mean_ratio"] = r.mean_ratio;
        row["mean_output_tokens"] = r.mean_output_tokens;
        row["max_output_tokens"] = r.max_output_tokens;
        row["budget_violations"] = r.budget_violations;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2);
}

std::string BenchReport::to_table() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%8s  %10s  %9s  %9s  %8s  %12s  %6s\n", "tokens",
                  "mode", "mean_ms", "p50_ms", "ratio", "out_tokens", "iters");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%8zu  %10s  %9.3f  %9.3f  %7.1f%%  %12.1f  %6zu\n",
                      r.tokens, r.mode.c_str(), r.mean_ms, r.p50_ms, r.mean_ratio * 100.0,
                      r.mean_output_tokens, r.iters);
        out += line;
    }
    return out;
}

BenchReport run_bench(const BenchOptions& options) {
    BenchReport report;
    report.seed = options.seed;

    for (std::size_t size : options.sizes) {
        CorpusOptions corpus_opts;
        corpus_opts.seed = options.seed;
        corpus_opts.count = options.iters;
        corpus_opts.target_tokens = size;
        auto docs = generate_corpus(corpus_opts);

        std::vector<double> ms(docs.size(), 0.0);
        std::vector<double> ratios(docs.size(), 0.0);
        std::vector<std::size_t> out_tokens(docs.size(), 0);

        auto worker = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                CompressedPrompt result = compress(docs[i].text, options.compression);
                ms[i] = static_cast<double>(result.duration.count()) / 1000.0;
                ratios[i] = result.ratio;
                out_tokens[i] = result.output_tokens;
            }
        };

        if (options.parallel && docs.size() > 1) {
            unsigned hw = std::max(2u, std::thread::hardware_concurrency());
            std::size_t workers = std::min<std::size_t>(hw, docs.size());
            std::vector<std::thread> threads;
            std::size_t chunk = (docs.size() + workers - 1) / workers;
            for (std::size_t w = 0; w < workers; ++w) {
                std::size_t begin = w * chunk;
                std::size_t end = std::min(begin + chunk, docs.size());
                if (begin >= end) break;
                threads.emplace_back(worker, begin, end);
            }
            for (auto& t : threads) t.join();
        } else {
            worker(0, docs.size());
        }

        BenchRow row;
        row.tokens = size;
        row.iters = docs.size();
        for (std::size_t i = 0; i < docs.size(); ++i) {
            row.mean_ms += ms[i];
            row.mean_ratio += ratios[i];
            row.mean_output_tokens += static_cast<double>(out_tokens[i]);
            row.max_output_tokens = std::max(row.max_output_tokens, out_tokens[i]);
            if (out_tokens[i] > options.compression.max_tokens) ++row.budget_violations;
        }
        const auto n = static_cast<double>(docs.size());
        row.mean_ms /= n;
        row.mean_ratio /= n;
        row.mean_output_tokens /= n;

        std::vector<double> sorted = ms;
        std::sort(sorted.begin(), sorted.end());
        row.p50_ms = sorted[sorted.size() / 2];
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace routefast
