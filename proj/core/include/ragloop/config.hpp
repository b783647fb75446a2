#pragma once

#include "ragloop/embedding.hpp"
#include "ragloop/engine.hpp"

#include <cstddef>
#include <string>

namespace ragloop {

/// Everything the CLI wires together. Field defaults are the shipped
/// defaults; a config file overrides them and flags override the file.
struct AppConfig {
    EngineConfig engine;
    EmbedderConfig embedder;

    std::size_t chunk_size = 1000;
    std::size_t overlap = 200;

    std::string provider = "mock"; // mock | http
    std::string model;
    std::string base_url = "https://api.openai.com";
    std::string mock_script;
    std::string prompts_dir; // empty -> builtin templates

    static AppConfig defaults();

    /// INI-style file: [section] headers, key = value pairs, '#'/';'
    /// comments. Unknown sections or keys are ConfigErrors. See
    /// configs/default.ini for the full key list.
    static AppConfig load_file(const std::string& path);
};

} // namespace ragloop
