#include "ragloop/embedding.hpp"
#include "ragloop/error.hpp"

#include "http_transport.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <memory>

namespace ragloop {

namespace {

using nlohmann::json;

/// Client for an OpenAI-compatible /v1/embeddings endpoint. Vectors are
/// L2-normalized on receipt; the dimension is pinned by the first response
/// and later mismatches are rejected.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {}

    Embedding embed(std::string_view text) const override {
        auto batch = request_batch({std::string(text)});
        return std::move(batch.front());
    }

    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override {
        if (texts.empty()) {
            return {};
        }
        return request_batch(texts);
    }

    std::size_t dim() const override { return dim_.load(); }

    std::string fingerprint() const override { return "remote/" + config_.model_name; }

private:
    std::vector<Embedding> request_batch(const std::vector<std::string>& texts) const {
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (texts[i].empty() ||
                texts[i].find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
                throw InvalidInput("embed_batch: element " + std::to_string(i) + ": empty text");
            }
        }

        json body = {{"model", config_.model_name}, {"input", texts}};

        detail::HttpPostSpec spec;
        spec.base_url = config_.base_url;
        spec.path = "/v1/embeddings";
        spec.api_key = config_.api_key;
        spec.body = body.dump();
        spec.attempts = config_.transport_attempts;
        spec.backoff_base = config_.backoff_base;

        std::string response = detail::post_json_with_retry(spec);

        json parsed = json::parse(response, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("data") || !parsed["data"].is_array()) {
            throw TransportError("malformed embeddings response from " + config_.base_url, 1);
        }

        std::vector<Embedding> out(texts.size());
        std::vector<bool> filled(texts.size(), false);
        for (const auto& item : parsed["data"]) {
            if (!item.contains("index") || !item.contains("embedding")) {
                throw TransportError("malformed embeddings response item", 1);
            }
            std::size_t idx = item["index"].get<std::size_t>();
            if (idx >= out.size()) {
                throw TransportError("embeddings response index out of range", 1);
            }
            Embedding e;
            e.values = item["embedding"].get<std::vector<double>>();
            normalize(e, idx);
            out[idx] = std::move(e);
            filled[idx] = true;
        }
        for (std::size_t i = 0; i < filled.size(); ++i) {
            if (!filled[i]) {
                throw TransportError("embeddings response missing element " + std::to_string(i),
                                     1);
            }
        }
        return out;
    }

    void normalize(Embedding& e, std::size_t index) const {
        double norm = l2_norm(e);
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw TransportError("embeddings response element " + std::to_string(index) +
                                     " is not a finite nonzero vector",
                                 1);
        }
        for (double& v : e.values) {
            v /= norm;
        }

        std::size_t expected = dim_.load();
        if (expected == 0) {
            dim_.store(e.dim());
        } else if (e.dim() != expected) {
            throw TransportError("embeddings dimension changed mid-session: expected " +
                                     std::to_string(expected) + ", got " + std::to_string(e.dim()),
                                 1);
        }
    }

    EmbedderConfig config_;
    mutable std::atomic<std::size_t> dim_{0};
};

} // namespace

std::unique_ptr<Embedder> make_remote_embedder(const EmbedderConfig& config) {
    return std::make_unique<RemoteEmbedder>(config);
}

} // namespace ragloop
