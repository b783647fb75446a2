// ragloop — ingest documents, run the iterative retrieval loop, and
// benchmark the concurrent/hybrid arm against the sequential baseline.
//
// Exit codes: 0 success (ask: satisfied), 3 iteration cap fired without
// satisfaction, 1 usage / configuration error, 2 runtime error.

#include <CLI11.hpp>

#include "ragloop/config.hpp"
#include "ragloop/engine.hpp"
#include "ragloop/error.hpp"
#include "ragloop/http_provider.hpp"
#include "ragloop/ingest.hpp"
#include "ragloop/mock_provider.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUnsatisfied = 3;

struct EngineFlags {
    std::optional<std::string> provider;
    std::optional<std::string> mock_script;
    std::optional<std::string> model;
    std::optional<double> temperature;
    std::optional<int> max_tokens;
    std::optional<int> k;
    std::optional<int> n_questions;
    std::optional<int> parallelism;
    std::optional<int> max_iters;
    bool final_refine = false;
    std::optional<long> seed;
    std::optional<std::string> prompts_dir;
    std::string report_path;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& flags) {
    cmd->add_option("--provider", flags.provider, "Chat provider: mock or http")
        ->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--mock-script", flags.mock_script, "Mock provider script (JSON)");
    cmd->add_option("--model", flags.model, "Model name for the http provider");
    cmd->add_option("--temperature", flags.temperature, "Sampling temperature (default 0)");
    cmd->add_option("--max-tokens", flags.max_tokens, "Completion token cap (default 2000)");
    cmd->add_option("--k", flags.k, "Chunks kept after reranking (default 5)");
    cmd->add_option("--n-questions", flags.n_questions,
                    "Follow-up questions per brainstorm (default 5)");
    cmd->add_option("--parallelism", flags.parallelism,
                    "Concurrent note-extraction calls (default: n-questions)");
    cmd->add_option("--max-iters", flags.max_iters, "Iteration cap (default 5)");
    cmd->add_flag("--final-refine", flags.final_refine,
                  "Refine the hypothesis once after a satisfied exit");
    cmd->add_option("--seed", flags.seed, "Seed for the local-hash embedder");
    cmd->add_option("--prompts", flags.prompts_dir, "Directory of prompt template overrides");
    cmd->add_option("--report", flags.report_path, "Write the machine-readable report here");
}

void apply_engine_flags(ragloop::AppConfig& config, const EngineFlags& flags) {
    if (flags.provider) config.provider = *flags.provider;
    if (flags.mock_script) config.mock_script = *flags.mock_script;
    if (flags.model) config.model = *flags.model;
    if (flags.temperature) config.engine.temperature = *flags.temperature;
    if (flags.max_tokens) config.engine.max_tokens = *flags.max_tokens;
    if (flags.k) config.engine.k = *flags.k;
    if (flags.n_questions) config.engine.n_questions = *flags.n_questions;
    if (flags.parallelism) config.engine.parallelism = *flags.parallelism;
    if (flags.max_iters) config.engine.max_iterations = *flags.max_iters;
    if (flags.final_refine) config.engine.final_refine = true;
    if (flags.seed) {
        config.engine.seed = static_cast<std::uint64_t>(*flags.seed);
        config.embedder.seed = config.engine.seed;
    }
    if (flags.prompts_dir) config.prompts_dir = *flags.prompts_dir;
}

std::unique_ptr<ragloop::ChatProvider> make_provider(const ragloop::AppConfig& config) {
    if (config.provider == "mock") {
        if (config.mock_script.empty()) {
            throw ragloop::ConfigError("mock provider needs --mock-script");
        }
        return std::make_unique<ragloop::MockProvider>(
            ragloop::MockScript::load_file(config.mock_script));
    }

    ragloop::HttpProviderOptions options;
    options.base_url = config.base_url;
    options.model = config.model;
    if (options.model.empty()) {
        throw ragloop::ConfigError("http provider needs --model (or provider.model in config)");
    }
    const char* key = std::getenv("ENGINE_API_KEY");
    if (key == nullptr || *key == '\0') {
        throw ragloop::ConfigError("http provider needs the ENGINE_API_KEY environment variable");
    }
    options.api_key = key;
    return std::make_unique<ragloop::HttpProvider>(options);
}

ragloop::PromptLibrary load_prompts(const ragloop::AppConfig& config) {
    if (config.prompts_dir.empty()) {
        return ragloop::PromptLibrary::builtin();
    }
    return ragloop::PromptLibrary::from_directory(config.prompts_dir);
}

/// Remote embedders authenticate the same way as the chat provider.
ragloop::EmbedderConfig resolve_embedder(const ragloop::AppConfig& config) {
    ragloop::EmbedderConfig embedder_config = config.embedder;
    if (embedder_config.kind == ragloop::EmbedderKind::Remote && embedder_config.api_key.empty()) {
        const char* key = std::getenv("ENGINE_API_KEY");
        if (key == nullptr || *key == '\0') {
            throw ragloop::ConfigError(
                "remote embedder needs the ENGINE_API_KEY environment variable");
        }
        embedder_config.api_key = key;
    }
    return embedder_config;
}

void write_report(const std::string& path, const nlohmann::json& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ragloop::Error("cannot write report file: " + path);
    }
    out << body.dump(2) << "\n";
}

int cmd_ingest(const ragloop::AppConfig& config, const std::vector<std::string>& paths,
               const std::string& store_path) {
    auto embedder = ragloop::make_embedder(resolve_embedder(config));

    auto docs = ragloop::load_documents(paths);
    auto chunks = ragloop::chunk_documents(docs, config.chunk_size, config.overlap);

    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& chunk : chunks) {
        texts.push_back(chunk.text);
    }
    auto embeddings = embedder->embed_batch(texts);

    std::size_t dim = embeddings.empty() ? embedder->dim() : embeddings.front().dim();
    if (dim == 0) {
        throw ragloop::ConfigError("nothing to ingest and embedder dimension is unknown");
    }
    ragloop::VectorStore store(dim, embedder->fingerprint());
    store.add_chunks(chunks, embeddings);
    store.save(store_path);

    std::cout << "documents: " << docs.size() << "\n";
    std::cout << "chunks: " << chunks.size() << "\n";
    std::cout << "store: " << store_path << "\n";
    return kExitOk;
}

/// Rejects a store whose embedding space does not match the configured
/// embedder; queries would be meaningless otherwise.
void check_fingerprint(const ragloop::VectorStore& store, const ragloop::Embedder& embedder) {
    if (store.fingerprint() != embedder.fingerprint()) {
        throw ragloop::ConfigError("store was built with embedder '" + store.fingerprint() +
                                   "' but the configured embedder is '" + embedder.fingerprint() +
                                   "'");
    }
}

int cmd_ask(const ragloop::AppConfig& config, const std::string& query,
            const std::string& store_path, const std::string& report_path) {
    auto store = ragloop::VectorStore::load(store_path);
    auto embedder = ragloop::make_embedder(config.embedder);
    check_fingerprint(store, *embedder);
    auto prompts = load_prompts(config);
    auto provider = make_provider(config);

    ragloop::Engine engine(store, *embedder, prompts, config.engine);
    ragloop::RunReport report = engine.run_loop(query, *provider);

    if (!report_path.empty()) {
        write_report(report_path, report.to_json(true));
    }
    std::cout << report.final_hypothesis << "\n";
    if (!report.satisfied) {
        std::cerr << "iteration cap (" << config.engine.max_iterations
                  << ") reached without satisfaction";
        if (!report.final_feedback.empty()) {
            std::cerr << "; last feedback: " << report.final_feedback;
        }
        std::cerr << "\n";
        return kExitUnsatisfied;
    }
    return kExitOk;
}

int cmd_bench(const ragloop::AppConfig& config, const std::string& query,
              const std::string& store_path, const std::string& report_path) {
    auto store = ragloop::VectorStore::load(store_path);
    auto embedder = ragloop::make_embedder(config.embedder);
    check_fingerprint(store, *embedder);
    auto prompts = load_prompts(config);

    // Each arm gets its own provider; with mock scripts that means a fresh
    // copy of the same script file per arm.
    auto baseline_provider = make_provider(config);
    auto proposed_provider = make_provider(config);

    ragloop::Engine engine(store, *embedder, prompts, config.engine);
    ragloop::BenchOutcome outcome =
        ragloop::run_bench(engine, query, *baseline_provider, *proposed_provider);

    if (!report_path.empty()) {
        write_report(report_path, outcome.report.to_json(true));
    }
    std::cout << ragloop::render_bench_table(outcome.report);
    return kExitOk;
}

int cmd_inspect(const std::string& store_path) {
    auto store = ragloop::VectorStore::load(store_path);
    std::cout << "store: " << store_path << "\n";
    std::cout << "dim: " << store.dim() << "\n";
    std::cout << "embedder: " << store.fingerprint() << "\n";
    std::cout << "chunks: " << store.size() << "\n";
    std::cout << "documents: " << store.document_count() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative retrieval-augmented generation loop with concurrent "
                 "brainstorming and a hybrid hypothesize-satisfy verdict"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "INI config file (see configs/default.ini)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Chunk and embed documents into a store file");
    std::vector<std::string> ingest_paths;
    std::string ingest_store;
    std::optional<int> chunk_size;
    std::optional<int> overlap;
    std::optional<long> ingest_seed;
    ingest->add_option("paths", ingest_paths, "Text files or directories (.txt, .md)")
        ->required();
    ingest->add_option("--store", ingest_store, "Output store file")->required();
    ingest->add_option("--chunk-size", chunk_size, "Window size in characters (default 1000)");
    ingest->add_option("--overlap", overlap, "Window overlap in characters (default 200)");
    ingest->add_option("--seed", ingest_seed, "Seed for the local-hash embedder");

    // ask
    auto* ask = app.add_subcommand("ask", "Run the retrieval loop for one query");
    std::string ask_query;
    std::string ask_store;
    EngineFlags ask_flags;
    ask->add_option("query", ask_query, "The user query")->required();
    ask->add_option("--store", ask_store, "Store file from 'ingest'")->required();
    add_engine_flags(ask, ask_flags);

    // bench
    auto* bench = app.add_subcommand("bench", "Compare the loop against the sequential baseline");
    std::string bench_query;
    std::string bench_store;
    EngineFlags bench_flags;
    bench->add_option("query", bench_query, "The user query")->required();
    bench->add_option("--store", bench_store, "Store file from 'ingest'")->required();
    add_engine_flags(bench, bench_flags);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Print a store file's header and counts");
    std::string inspect_store;
    inspect->add_option("--store", inspect_store, "Store file to inspect")->required();

    // let --config appear after the subcommand name too
    for (CLI::App* sub : {ingest, ask, bench, inspect}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        ragloop::AppConfig config = config_path.empty()
                                        ? ragloop::AppConfig::defaults()
                                        : ragloop::AppConfig::load_file(config_path);

        if (ingest->parsed()) {
            if (chunk_size) config.chunk_size = static_cast<std::size_t>(*chunk_size);
            if (overlap) config.overlap = static_cast<std::size_t>(*overlap);
            if (ingest_seed) {
                config.engine.seed = static_cast<std::uint64_t>(*ingest_seed);
                config.embedder.seed = config.engine.seed;
            }
            return cmd_ingest(config, ingest_paths, ingest_store);
        }
        if (ask->parsed()) {
            apply_engine_flags(config, ask_flags);
            return cmd_ask(config, ask_query, ask_store, ask_flags.report_path);
        }
        if (bench->parsed()) {
            apply_engine_flags(config, bench_flags);
            return cmd_bench(config, bench_query, bench_store, bench_flags.report_path);
        }
        if (inspect->parsed()) {
            return cmd_inspect(inspect_store);
        }
        return kExitUsage;
    } catch (const ragloop::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ragloop::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ragloop::ProtocolError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "raw model output: " << e.raw_text << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
