#include "ragloop/config.hpp"

#include "ragloop/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <string_view>

namespace ragloop {

namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return std::string(s.substr(begin, end - begin));
}

long parse_long(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        long parsed = std::stol(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        double parsed = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

} // namespace

AppConfig AppConfig::defaults() {
    AppConfig config;
    config.engine.prices = PriceTable::parse("0.001", "0.002");
    config.embedder.seed = config.engine.seed;
    return config;
}

AppConfig AppConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }

    AppConfig config = defaults();
    std::string prompt_price = config.engine.prices.prompt_per_1k.str();
    std::string completion_price = config.engine.prices.completion_per_1k.str();

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"provider.kind",
         [&](const std::string& k, const std::string& v) {
             if (v != "mock" && v != "http") {
                 throw ConfigError("config key '" + k + "' must be 'mock' or 'http'");
             }
             config.provider = v;
         }},
        {"provider.model", [&](const std::string&, const std::string& v) { config.model = v; }},
        {"provider.base_url",
         [&](const std::string&, const std::string& v) { config.base_url = v; }},
        {"provider.mock_script",
         [&](const std::string&, const std::string& v) { config.mock_script = v; }},
        {"pricing.prompt_per_1k",
         [&](const std::string&, const std::string& v) { prompt_price = v; }},
        {"pricing.completion_per_1k",
         [&](const std::string&, const std::string& v) { completion_price = v; }},
        {"engine.max_iterations",
         [&](const std::string& k, const std::string& v) {
             config.engine.max_iterations = static_cast<int>(parse_long(v, k));
         }},
        {"engine.n_questions",
         [&](const std::string& k, const std::string& v) {
             config.engine.n_questions = static_cast<int>(parse_long(v, k));
         }},
        {"engine.k",
         [&](const std::string& k, const std::string& v) {
             config.engine.k = static_cast<int>(parse_long(v, k));
         }},
        {"engine.parallelism",
         [&](const std::string& k, const std::string& v) {
             config.engine.parallelism = static_cast<int>(parse_long(v, k));
         }},
        {"engine.final_refine",
         [&](const std::string& k, const std::string& v) {
             config.engine.final_refine = parse_bool(v, k);
         }},
        {"engine.temperature",
         [&](const std::string& k, const std::string& v) {
             config.engine.temperature = parse_double(v, k);
         }},
        {"engine.max_tokens",
         [&](const std::string& k, const std::string& v) {
             config.engine.max_tokens = static_cast<int>(parse_long(v, k));
         }},
        {"engine.seed",
         [&](const std::string& k, const std::string& v) {
             config.engine.seed = static_cast<std::uint64_t>(parse_long(v, k));
             config.embedder.seed = config.engine.seed;
         }},
        {"embedder.kind",
         [&](const std::string& k, const std::string& v) {
             if (v == "local-hash") {
                 config.embedder.kind = EmbedderKind::LocalHash;
             } else if (v == "remote") {
                 config.embedder.kind = EmbedderKind::Remote;
             } else {
                 throw ConfigError("config key '" + k + "' must be 'local-hash' or 'remote'");
             }
         }},
        {"embedder.dim",
         [&](const std::string& k, const std::string& v) {
             config.embedder.dim = static_cast<std::size_t>(parse_long(v, k));
         }},
        {"embedder.model",
         [&](const std::string&, const std::string& v) { config.embedder.model_name = v; }},
        {"embedder.base_url",
         [&](const std::string&, const std::string& v) { config.embedder.base_url = v; }},
        {"ingest.chunk_size",
         [&](const std::string& k, const std::string& v) {
             config.chunk_size = static_cast<std::size_t>(parse_long(v, k));
         }},
        {"ingest.overlap",
         [&](const std::string& k, const std::string& v) {
             config.overlap = static_cast<std::size_t>(parse_long(v, k));
         }},
        {"prompts.dir",
         [&](const std::string&, const std::string& v) { config.prompts_dir = v; }},
    };

    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed section");
            }
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = section + "." + trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));

        auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        }
        it->second(key, value);
    }

    config.engine.prices = PriceTable::parse(prompt_price, completion_price);
    return config;
}

} // namespace ragloop
