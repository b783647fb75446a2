#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ragloop/embedding.hpp"
#include "ragloop/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

using namespace ragloop;

namespace {

/// Independent FNV-1a64 oracle: offset basis 14695981039346656037,
/// prime 1099511628211, seed fed first as 8 little-endian bytes.
std::uint64_t oracle_fnv1a64(std::uint64_t seed, const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (int i = 0; i < 8; ++i) {
        h = (h ^ ((seed >> (8 * i)) & 0xffu)) * 1099511628211ull;
    }
    for (unsigned char c : data) {
        h = (h ^ c) * 1099511628211ull;
    }
    return h;
}

EmbedderConfig local_config(std::size_t dim, std::uint64_t seed) {
    EmbedderConfig config;
    config.kind = EmbedderKind::LocalHash;
    config.dim = dim;
    config.seed = seed;
    return config;
}

} // namespace

TEST_CASE("embed_text is deterministic") {
    auto config = local_config(64, 9001);
    auto a = embed_text("retrieval augmented generation", config);
    auto b = embed_text("retrieval augmented generation", config);
    REQUIRE(a.dim() == 64);
    CHECK(a.values == b.values); // bit-identical
}

TEST_CASE("every embedding is a unit vector") {
    auto config = local_config(128, 3);
    for (const char* text : {"a", "ab", "abc", "some longer text with spaces",
                             "unicode: \xc3\xa9\xc3\xa8\xc3\xaa", "x"}) {
        auto e = embed_text(text, config);
        CHECK(std::abs(l2_norm(e) - 1.0) < 1e-9);
        for (double v : e.values) {
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("'abc' with dim=8, seed=42 is one-hot at the oracle bucket") {
    auto e = embed_text("abc", local_config(8, 42));
    std::size_t expected_bucket = oracle_fnv1a64(42, "abc") % 8;

    for (std::size_t i = 0; i < 8; ++i) {
        if (i == expected_bucket) {
            CHECK(e.values[i] == doctest::Approx(1.0).epsilon(1e-12));
        } else {
            CHECK(e.values[i] == 0.0);
        }
    }
}

TEST_CASE("library hash matches the stated FNV-1a64 semantics") {
    for (std::uint64_t seed : {0ull, 42ull, 0xdeadbeefull}) {
        for (const std::string& data : {std::string("abc"), std::string(""), std::string("xyz")}) {
            CHECK(fnv1a64(seed, data) == oracle_fnv1a64(seed, data));
        }
    }
}

TEST_CASE("texts shorter than 3 bytes hash as a single gram") {
    auto e = embed_text("ab", local_config(16, 5));
    std::size_t bucket = oracle_fnv1a64(5, "ab") % 16;
    CHECK(e.values[bucket] == doctest::Approx(1.0));
}

TEST_CASE("batch embedding equals elementwise embedding") {
    auto config = local_config(64, 11);
    std::vector<std::string> texts = {"first text", "second text", "third one"};

    auto batch = embed_batch(texts, config);
    REQUIRE(batch.size() == 3);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        CHECK(batch[i].values == embed_text(texts[i], config).values);
    }

    CHECK(embed_batch({}, config).empty());
    auto single = embed_batch({texts[0]}, config);
    CHECK(single.size() == 1);
    CHECK(single[0].values == embed_text(texts[0], config).values);
}

TEST_CASE("permuting a batch permutes the outputs identically") {
    auto config = local_config(32, 123);
    std::vector<std::string> texts = {"alpha", "beta", "gamma", "delta"};
    auto forward = embed_batch(texts, config);

    std::vector<std::string> reversed(texts.rbegin(), texts.rend());
    auto backward = embed_batch(reversed, config);

    for (std::size_t i = 0; i < texts.size(); ++i) {
        CHECK(forward[i].values == backward[texts.size() - 1 - i].values);
    }
}

TEST_CASE("texts sharing no 3-grams are near-orthogonal at dim 4096") {
    auto config = local_config(4096, 77);
    // disjoint byte alphabets -> disjoint trigram sets
    auto a = embed_text("aaa bbb aab abb baa bba", config);
    auto b = embed_text("xxx yyy xxy xyy yxx yyx", config);
    CHECK(std::abs(dot(a, b)) < 0.05);
}

TEST_CASE("self cosine is exactly 1 within tolerance") {
    auto e = embed_text("self similarity check", local_config(256, 1));
    CHECK(dot(e, e) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empty or blank text is rejected") {
    auto config = local_config(16, 0);
    CHECK_THROWS_AS(embed_text("", config), InvalidInput);
    CHECK_THROWS_AS(embed_text("   \n\t", config), InvalidInput);
}

TEST_CASE("batch failure reports the failing index") {
    auto config = local_config(16, 0);
    CHECK_THROWS_WITH_AS(embed_batch({"fine", "", "also fine"}, config),
                         doctest::Contains("element 1"), InvalidInput);
}

TEST_CASE("fingerprints identify the embedding space") {
    LocalHashEmbedder a(256, 42);
    LocalHashEmbedder b(256, 43);
    LocalHashEmbedder c(128, 42);
    CHECK(a.fingerprint() != b.fingerprint());
    CHECK(a.fingerprint() != c.fingerprint());
    CHECK(a.fingerprint() == LocalHashEmbedder(256, 42).fingerprint());

    auto made = make_embedder(local_config(256, 42));
    CHECK(made->fingerprint() == a.fingerprint());
    CHECK(made->dim() == 256);
}

TEST_CASE("zero dim is a configuration error") {
    CHECK_THROWS_AS(LocalHashEmbedder(0, 1), ConfigError);
}
