#include "ragloop/embedding.hpp"

#include "ragloop/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

namespace ragloop {

double dot(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        throw InvalidInput("dot: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                           std::to_string(b.dim()) + ")");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        sum += a.values[i] * b.values[i];
    }
    return sum;
}

double l2_norm(const Embedding& e) {
    double sum = 0.0;
    for (double v : e.values) {
        sum += v * v;
    }
    return std::sqrt(sum);
}

std::uint64_t fnv1a64(std::uint64_t seed, std::string_view data) {
    constexpr std::uint64_t kOffsetBasis = 14695981039346656037ull;
    constexpr std::uint64_t kPrime = 1099511628211ull;

    std::uint64_t h = kOffsetBasis;
    for (int i = 0; i < 8; ++i) { // little-endian seed bytes first
        h ^= (seed >> (8 * i)) & 0xffu;
        h *= kPrime;
    }
    for (unsigned char c : data) {
        h ^= c;
        h *= kPrime;
    }
    return h;
}

namespace {

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

LocalHashEmbedder::LocalHashEmbedder(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim_ == 0) {
        throw ConfigError("embedder dim must be positive");
    }
}

Embedding LocalHashEmbedder::embed(std::string_view text) const {
    if (text.empty() || is_blank(text)) {
        throw InvalidInput("embed: empty text");
    }

    Embedding out;
    out.values.assign(dim_, 0.0);

    if (text.size() < 3) {
        out.values[fnv1a64(seed_, text) % dim_] += 1.0;
    } else {
        for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
            out.values[fnv1a64(seed_, text.substr(i, 3)) % dim_] += 1.0;
        }
    }

    double norm = l2_norm(out);
    for (double& v : out.values) {
        v /= norm;
    }
    return out;
}

std::string LocalHashEmbedder::fingerprint() const {
    return "local-hash/fnv1a64/dim=" + std::to_string(dim_) + "/seed=" + std::to_string(seed_);
}

std::vector<Embedding> Embedder::embed_batch(const std::vector<std::string>& texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        try {
            out.push_back(embed(texts[i]));
        } catch (const Error& e) {
            throw InvalidInput("embed_batch: element " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

// Defined in remote_embedder.cpp.
std::unique_ptr<Embedder> make_remote_embedder(const EmbedderConfig& config);

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
    switch (config.kind) {
    case EmbedderKind::LocalHash:
        return std::make_unique<LocalHashEmbedder>(config.dim, config.seed);
    case EmbedderKind::Remote:
        if (config.model_name.empty()) {
            throw ConfigError("remote embedder requires a model name");
        }
        return make_remote_embedder(config);
    }
    throw ConfigError("unknown embedder kind");
}

Embedding embed_text(std::string_view text, const EmbedderConfig& config) {
    return make_embedder(config)->embed(text);
}

std::vector<Embedding> embed_batch(const std::vector<std::string>& texts,
                                   const EmbedderConfig& config) {
    return make_embedder(config)->embed_batch(texts);
}

} // namespace ragloop
