#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ragloop {

/// Fixed-dimension unit vector. Every embedder normalizes at the boundary,
/// so cosine similarity downstream is a plain dot product.
struct Embedding {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

double dot(const Embedding& a, const Embedding& b);
double l2_norm(const Embedding& e);

enum class EmbedderKind { LocalHash, Remote };

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::LocalHash;

    // local-hash
    std::size_t dim = 256;
    std::uint64_t seed = 0;

    // remote (OpenAI-compatible /v1/embeddings)
    std::string model_name;
    std::string base_url = "https://api.openai.com";
    std::string api_key;
    int transport_attempts = 3;
    std::chrono::milliseconds backoff_base{500};
};

class Embedder {
public:
    virtual ~Embedder() = default;

    /// text must be non-empty after whitespace trimming.
    virtual Embedding embed(std::string_view text) const = 0;

    /// Elementwise embed; order preserved. A failing element fails the
    /// batch with its index in the message.
    virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const;

    /// 0 while unknown (remote, before the first call).
    virtual std::size_t dim() const = 0;

    /// Identifies the embedding space; stored in the vector store header so
    /// mismatched stores are rejected at load time.
    virtual std::string fingerprint() const = 0;
};

/// 64-bit FNV-1a over the little-endian seed bytes followed by the data
/// bytes. Stated here because the hashed-n-gram embedding below depends on
/// it being reproducible across implementations.
std::uint64_t fnv1a64(std::uint64_t seed, std::string_view data);

/// Deterministic offline embedder: hashed byte-3-gram term frequencies.
///
/// Each overlapping 3-byte window of the UTF-8 text (the whole text when it
/// is shorter than 3 bytes) hashes via fnv1a64(seed, gram) to a bucket
/// h % dim; bucket counts are accumulated and the vector L2-normalized.
class LocalHashEmbedder final : public Embedder {
public:
    LocalHashEmbedder(std::size_t dim, std::uint64_t seed);

    Embedding embed(std::string_view text) const override;
    std::size_t dim() const override { return dim_; }
    std::string fingerprint() const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

/// Convenience forms mirroring the one-shot API.
Embedding embed_text(std::string_view text, const EmbedderConfig& config);
std::vector<Embedding> embed_batch(const std::vector<std::string>& texts,
                                   const EmbedderConfig& config);

} // namespace ragloop
