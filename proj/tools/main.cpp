// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0
//
// routefast: single binary exposing the compression, graph-rewrite,
// attention-oracle, streaming-simulation, benchmark and service pipelines.

#include <filesystem>
#include <future>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "routefast/attention.hpp"
#include "routefast/bench_report.hpp"
#include "routefast/compress.hpp"
#include "routefast/corpus.hpp"
#include "routefast/graph.hpp"
#include "routefast/interpreter.hpp"
#include "routefast/rewrite.hpp"
#include "routefast/service.hpp"
#include "routefast/stream.hpp"

namespace rf = routefast;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_input(const std::string& path) {
    if (path == "-" || path.empty()) {
        std::stringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

rf::SignalPosition parse_position(const std::string& name) {
    if (name == "start") return rf::SignalPosition::start;
    if (name == "middle") return rf::SignalPosition::middle;
    if (name == "end") return rf::SignalPosition::end;
    if (name == "none") return rf::SignalPosition::none;
    throw CLI::ValidationError("position must be start|middle|end|none");
}

// ---------------------------------------------------------------------------

int cmd_compress(const std::string& input_path, rf::CompressionConfig config) {
    std::string text = read_input(input_path);
    rf::CompressedPrompt result = rf::compress(text, config);

    ordered_json j;
    j["text"] = result.text;
    j["selected_indices"] = result.selected_indices;
    j["input_tokens"] = result.input_tokens;
    j["output_tokens"] = result.output_tokens;
    j["ratio"] = result.ratio;
    j["duration_ms"] = static_cast<double>(result.duration.count()) / 1000.0;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_rewrite_graph(const std::string& in_path, const std::string& out_path,
                      const rf::RewriteOptions& options) {
    rf::Graph graph = rf::parse_graph(read_input(in_path));
    rf::Graph rewritten = rf::rewrite(graph, options);
    write_file(out_path, rf::serialize_graph(rewritten));
    std::cerr << "rewrote " << rf::find_sdpa_patterns(graph).size() << " attention chain(s): "
              << graph.nodes.size() << " -> " << rewritten.nodes.size() << " nodes\n";
    return 0;
}

// random inputs for verification: *mask* inputs get a 1...10...0 padding row,
// everything else is uniform in [-1, 1)
rf::TensorMap random_inputs(const rf::Graph& graph, std::mt19937_64& rng) {
    rf::TensorMap inputs;
    for (const auto& decl : graph.inputs) {
        if (decl.name.find("mask") != std::string::npos && !decl.shape.empty()) {
            rf::Tensor mask = rf::Tensor::full(decl.shape, 1.0f, decl.dtype);
            auto seq = static_cast<std::size_t>(decl.shape.back());
            std::size_t pad = seq > 8 ? rng() % (seq / 8) : 0;
            for (std::size_t i = 0; i < pad; ++i) {
                mask.data[mask.data.size() - 1 - i] = 0.0f;
            }
            inputs[decl.name] = std::move(mask);
        } else {
            inputs[decl.name] = rf::Tensor::random(decl.shape, rng, decl.dtype);
        }
    }
    return inputs;
}

int cmd_verify_rewrite(const std::string& graph_path, const std::string& rewritten_path,
                       int trials, double tol, uint64_t seed) {
    rf::Graph original = rf::parse_graph(read_input(graph_path));
    rf::Graph rewritten = rf::parse_graph(read_input(rewritten_path));

    std::mt19937_64 rng(seed);
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
        rf::TensorMap inputs = random_inputs(original, rng);
        rf::TensorMap a = rf::interpret(original, inputs);
        rf::TensorMap b = rf::interpret(rewritten, inputs);
        for (const auto& name : original.outputs) {
            const auto& ta = a.at(name);
            auto it = b.find(name);
            if (it == b.end()) {
                std::cerr << "FAIL trial " << t << ": output '" << name
                          << "' missing from rewritten graph\n";
                ok = false;
                continue;
            }
            if (it->second.shape != ta.shape) {
                std::cerr << "FAIL trial " << t << ": output '" << name << "' shape mismatch\n";
                ok = false;
                continue;
            }
            double max_abs = 0.0;
            for (std::size_t i = 0; i < ta.data.size(); ++i) {
                max_abs = std::max(max_abs, static_cast<double>(std::abs(
                                                ta.data[i] - it->second.data[i])));
            }
            if (max_abs > tol) {
                std::cerr << "FAIL trial " << t << ": output '" << name << "' max-abs diff "
                          << max_abs << " > tol " << tol << "\n";
                ok = false;
            } else {
                std::cout << "trial " << t << " output '" << name << "': max-abs diff "
                          << max_abs << " (tol " << tol << ")\n";
            }
        }
    }
    if (!ok) return 1;
    std::cout << "verify-rewrite: all " << trials << " trial(s) within tolerance\n";
    return 0;
}

int cmd_memory_model(uint64_t heads, uint64_t batch, const std::string& dtype,
                     uint64_t budget_mb, uint64_t head_dim, uint64_t tile,
                     std::vector<uint64_t> sizes) {
    const uint64_t bpe = dtype == "f32" ? 4 : 2;
    const uint64_t budget = budget_mb * 1024 * 1024;
    if (sizes.empty()) sizes = {512, 1024, 2048, 4096, 8192, 16384, 32768};

    std::printf("%8s  %16s  %14s  %12s\n", "S", "sdpa_bytes", "fa_bytes", "fits_budget");
    for (uint64_t s : sizes) {
        uint64_t sdpa = rf::mask_memory_bytes(batch, heads, s, bpe);
        uint64_t fa = rf::fa_memory_bytes(batch, heads, s, head_dim, tile, bpe);
        std::printf("%8llu  %16llu  %14llu  %12s\n", static_cast<unsigned long long>(s),
                    static_cast<unsigned long long>(sdpa), static_cast<unsigned long long>(fa),
                    sdpa <= budget ? "yes" : "no");
    }
    std::printf("budget: %llu bytes (%llu MiB), dtype %s, batch %llu, heads %llu\n",
                static_cast<unsigned long long>(budget),
                static_cast<unsigned long long>(budget_mb), dtype.c_str(),
                static_cast<unsigned long long>(batch), static_cast<unsigned long long>(heads));
    return 0;
}

int cmd_simulate(const std::string& file, std::size_t chunk_size) {
    std::string body = read_input(file);
    rf::StreamHandler handler;

    std::size_t offset = 0;
    std::size_t chunk_index = 0;
    std::optional<rf::RoutingDecision> decision;
    while (offset < body.size() || body.empty()) {
        std::size_t len = std::min(chunk_size, body.size() - offset);
        bool eos = offset + len >= body.size();
        rf::ChunkAction act = handler.on_chunk({body.data() + offset, len}, eos);
        switch (act.kind) {
            case rf::ChunkAction::Kind::forward:
                std::cout << "chunk " << chunk_index << ": forward " << act.forward_bytes.size()
                          << " B\n";
                break;
            case rf::ChunkAction::Kind::consume:
                std::cout << "chunk " << chunk_index << ": consume (" << len << " B buffered)\n";
                break;
            case rf::ChunkAction::Kind::finalize:
                std::cout << "chunk " << chunk_index << ": finalize, emit "
                          << act.final_body.size() << " B upstream\n";
                decision = std::move(act.decision);
                break;
        }
        ++chunk_index;
        offset += len;
        if (eos || decision) break;
    }

    if (!decision) {
        std::cerr << "stream ended without a decision\n";
        return 1;
    }
    ordered_json j;
    j["mode"] = decision->mode == rf::RouteMode::passthrough ? "passthrough" : "classified";
    j["selected_model"] = decision->selected_model;
    j["rejected"] = decision->rejected;
    if (decision->rejected) j["reject_reason"] = decision->reject_reason;
    if (decision->signals) {
        j["signals"] = {{"jailbreak", decision->signals->jailbreak.flagged},
                        {"pii", decision->signals->pii.flagged},
                        {"domain", decision->signals->domain.label}};
    }
    j["eval_tokens"] = decision->eval_tokens;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_bench(const rf::BenchOptions& options, bool as_json) {
    rf::BenchReport report = rf::run_bench(options);
    if (as_json) {
        std::cout << report.to_json() << "\n";
    } else {
        std::cout << report.to_table();
    }
    for (const auto& row : report.rows) {
        if (row.budget_violations > 0) {
            std::cerr << "bench: " << row.budget_violations << " budget violation(s) at "
                      << row.tokens << " tokens\n";
            return 1;
        }
    }
    return 0;
}

int cmd_gen_corpus(const std::string& out_dir, rf::CorpusOptions options, bool bodies) {
    std::filesystem::create_directories(out_dir);
    auto docs = rf::generate_corpus(options);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "doc_%04zu.txt", i);
        write_file((std::filesystem::path(out_dir) / name).string(), docs[i].text);
        if (bodies) {
            std::snprintf(name, sizeof name, "doc_%04zu.body.json", i);
            std::string body = rf::make_chat_body(
                "auto", "You route requests to the best backend model.", docs[i].text);
            write_file((std::filesystem::path(out_dir) / name).string(), body);
        }
    }
    write_file((std::filesystem::path(out_dir) / "manifest.json").string(),
               rf::corpus_manifest_json(docs));
    std::cout << "wrote " << docs.size() << " docs to " << out_dir << "\n";
    return 0;
}

int cmd_serve(rf::ServiceConfig config) {
    rf::RouteService service(std::move(config));
    if (!service.start()) {
        std::cerr << "failed to bind " << service.config().host << ":" << service.config().port
                  << "\n";
        return 1;
    }
    std::cout << "routefast serving on " << service.config().host << ":" << service.port()
              << " (POST /v1/chat/completions, GET /metrics, GET /healthz)\n";
    // block until killed
    std::promise<void> never;
    never.get_future().wait();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"routing fastpath toolkit"};
    app.require_subcommand(1);

    // compress
    auto* compress = app.add_subcommand("compress", "compress a prompt to the token budget");
    std::string compress_input = "-";
    rf::CompressionConfig compress_cfg;
    std::vector<double> weights;
    compress->add_option("file", compress_input, "input file (default: stdin)");
    compress->add_option("--max-tokens", compress_cfg.max_tokens, "token budget");
    compress->add_option("--weights", weights,
                         "textrank,position,tfidf,novelty weights (must sum to 1)")
        ->delimiter(',')
        ->expected(4);
    compress->add_option("--depth", compress_cfg.curve_depth, "position curve depth in [0,1]");
    compress->add_option("--preserve-first", compress_cfg.preserve_first,
                         "always keep this many leading sentences");
    compress->add_option("--preserve-last", compress_cfg.preserve_last,
                         "always keep this many trailing sentences");
    compress->add_option("--sentence-cap", compress_cfg.sentence_cap,
                         "uniform-sample documents above this sentence count");

    // rewrite-graph
    auto* rewrite_cmd = app.add_subcommand("rewrite-graph",
                                           "fuse SDPA chains into flash-attention nodes");
    std::string rw_in, rw_out;
    rf::RewriteOptions rw_options;
    rewrite_cmd->add_option("--in", rw_in, "input graph JSON")->required();
    rewrite_cmd->add_option("--out", rw_out, "output graph JSON")->required();
    rewrite_cmd->add_option("--hdim", rw_options.head_dim, "head dimension (32|64|128)");
    rewrite_cmd->add_option("--local-attention", rw_options.local_window,
                            "local sliding-window size (even)");
    rewrite_cmd->add_option("--mask-input", rw_options.mask_input,
                            "graph input carrying the [B,1,1,S] attention mask");

    // verify-rewrite
    auto* verify = app.add_subcommand("verify-rewrite",
                                      "interpret original vs rewritten graph on random inputs");
    std::string vr_graph, vr_rewritten;
    int vr_trials = 3;
    double vr_tol = 1e-3;
    uint64_t vr_seed = 42;
    verify->add_option("--graph", vr_graph, "original graph JSON")->required();
    verify->add_option("--rewritten", vr_rewritten, "rewritten graph JSON")->required();
    verify->add_option("--trials", vr_trials, "random input trials");
    verify->add_option("--tol", vr_tol, "max-abs tolerance");
    verify->add_option("--seed", vr_seed, "rng seed");

    // memory-model
    auto* mem = app.add_subcommand("memory-model", "attention memory scaling table");
    uint64_t mm_heads = 12, mm_batch = 1, mm_budget = 718, mm_hdim = 64, mm_tile = 64;
    std::string mm_dtype = "f16";
    std::vector<uint64_t> mm_sizes;
    mem->add_option("--heads", mm_heads, "attention heads");
    mem->add_option("--batch", mm_batch, "batch size");
    mem->add_option("--dtype", mm_dtype, "f16|f32");
    mem->add_option("--budget-mb", mm_budget, "available memory budget (MiB)");
    mem->add_option("--hdim", mm_hdim, "head dimension (FA working set)");
    mem->add_option("--tile", mm_tile, "FA tile size");
    mem->add_option("--sizes", mm_sizes, "sequence lengths")->delimiter(',');

    // simulate
    auto* simulate = app.add_subcommand("simulate",
                                        "replay a body through the stream handler");
    std::string sim_file;
    std::size_t sim_chunk = 1024;
    simulate->add_option("--file", sim_file, "request body JSON")->required();
    simulate->add_option("--chunk-size", sim_chunk, "chunk size in bytes")
        ->check(CLI::PositiveNumber);

    // bench
    auto* bench = app.add_subcommand("bench", "compression benchmark (Table-style report)");
    rf::BenchOptions bench_options;
    bool bench_json = false;
    bench->add_option("--sizes", bench_options.sizes, "corpus sizes in tokens")->delimiter(',');
    bench->add_option("--iters", bench_options.iters, "docs per size");
    bench->add_option("--seed", bench_options.seed, "corpus seed");
    bench->add_flag("--parallel", bench_options.parallel, "compress docs on all cores");
    bench->add_flag("--json", bench_json, "emit machine-readable JSON");

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "write fixture prompts with ground truth");
    std::string gen_out = "corpus";
    rf::CorpusOptions gen_options;
    std::string gen_jb = "start", gen_dq = "end";
    bool gen_bodies = false;
    bool gen_no_pii = false;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--count", gen_options.count, "number of documents");
    gen->add_option("--tokens", gen_options.target_tokens, "target tokens per document");
    gen->add_option("--seed", gen_options.seed, "rng seed");
    gen->add_option("--domain", gen_options.domain, "fixed domain (default: cycle)");
    gen->add_option("--jailbreak", gen_jb, "jailbreak position: start|middle|end|none");
    gen->add_option("--domain-question", gen_dq, "question position: start|middle|end|none");
    gen->add_flag("--no-pii", gen_no_pii, "skip PII sentences");
    gen->add_flag("--bodies", gen_bodies, "also write OpenAI-shaped request bodies");

    // serve
    auto* serve = app.add_subcommand("serve", "run the demo routing service");
    rf::ServiceConfig serve_cfg_flags;
    std::string serve_config_path;
    serve->add_option("--config", serve_config_path,
                      "service config JSON (overrides ROUTEFAST_CONFIG)");
    auto* host_opt = serve->add_option("--host", serve_cfg_flags.host, "listen host");
    auto* port_opt = serve->add_option("--port", serve_cfg_flags.port, "listen port");
    auto* thr_opt = serve->add_option("--jailbreak-threshold",
                                      serve_cfg_flags.jailbreak_threshold,
                                      "jailbreak rejection threshold");
    auto* model_opt = serve->add_option("--default-model", serve_cfg_flags.default_model,
                                        "fallback model for unmatched domains");
    auto* max_opt = serve->add_option("--max-body", serve_cfg_flags.max_body_bytes,
                                      "request body limit in bytes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2
    }

    try {
        if (compress->parsed()) {
            if (!weights.empty()) {
                for (std::size_t i = 0; i < 4; ++i) compress_cfg.weights[i] = weights[i];
            }
            compress_cfg.validate();
            return cmd_compress(compress_input, compress_cfg);
        }
        if (rewrite_cmd->parsed()) return cmd_rewrite_graph(rw_in, rw_out, rw_options);
        if (verify->parsed()) {
            return cmd_verify_rewrite(vr_graph, vr_rewritten, vr_trials, vr_tol, vr_seed);
        }
        if (mem->parsed()) {
            return cmd_memory_model(mm_heads, mm_batch, mm_dtype, mm_budget, mm_hdim, mm_tile,
                                    mm_sizes);
        }
        if (simulate->parsed()) return cmd_simulate(sim_file, sim_chunk);
        if (bench->parsed()) return cmd_bench(bench_options, bench_json);
        if (gen->parsed()) {
            gen_options.jailbreak = parse_position(gen_jb);
            gen_options.domain_question = parse_position(gen_dq);
            gen_options.embed_pii = !gen_no_pii;
            return cmd_gen_corpus(gen_out, gen_options, gen_bodies);
        }
        if (serve->parsed()) {
            rf::ServiceConfig cfg;
            if (!serve_config_path.empty()) {
                cfg = rf::ServiceConfig::from_json(read_input(serve_config_path));
            } else {
                cfg = rf::ServiceConfig::from_env();
            }
            // flags override whatever the config file said
            if (host_opt->count()) cfg.host = serve_cfg_flags.host;
            if (port_opt->count()) cfg.port = serve_cfg_flags.port;
            if (thr_opt->count()) cfg.jailbreak_threshold = serve_cfg_flags.jailbreak_threshold;
            if (model_opt->count()) cfg.default_model = serve_cfg_flags.default_model;
            if (max_opt->count()) cfg.max_body_bytes = serve_cfg_flags.max_body_bytes;
            return cmd_serve(std::move(cfg));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
