#include "ragloop/ingest.hpp"

#include "ragloop/error.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace fs = std::filesystem;

namespace ragloop {

namespace {

bool is_text_extension(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".txt" || ext == ".md";
}

bool is_blank(const std::string& text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string normalize_doc_id(const fs::path& p) {
    return p.lexically_normal().generic_string();
}

RawDocument read_document(const fs::path& path, const std::string& as_given) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError("cannot read file: " + as_given);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IngestError("cannot read file: " + as_given);
    }
    std::string text = std::move(buf).str();
    if (text.empty() || is_blank(text)) {
        throw IngestError("empty document: " + as_given);
    }
    return RawDocument{normalize_doc_id(path), std::move(text), as_given};
}

} // namespace

std::vector<RawDocument> load_documents(const std::vector<std::string>& paths) {
    std::vector<RawDocument> docs;
    std::unordered_set<std::string> seen_ids;

    auto push = [&](RawDocument doc) {
        if (!seen_ids.insert(doc.doc_id).second) {
            throw IngestError("duplicate document id in batch: " + doc.doc_id);
        }
        docs.push_back(std::move(doc));
    };

    for (const auto& given : paths) {
        fs::path p(given);
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::recursive_directory_iterator(p)) {
                if (entry.is_regular_file() && is_text_extension(entry.path())) {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end(),
                      [](const fs::path& a, const fs::path& b) {
                          return a.generic_string() < b.generic_string();
                      });
            for (const auto& f : files) {
                push(read_document(f, f.string()));
            }
        } else if (fs::is_regular_file(p, ec)) {
            if (!is_text_extension(p)) {
                throw IngestError("unsupported file type (expected .txt or .md): " + given);
            }
            push(read_document(p, given));
        } else {
            throw IngestError("no such file or directory: " + given);
        }
    }
    return docs;
}

std::vector<DocumentChunk> chunk_document(const RawDocument& doc,
                                          std::size_t chunk_size,
                                          std::size_t overlap) {
    if (chunk_size == 0) {
        throw ConfigError("chunk_size must be positive");
    }
    if (overlap >= chunk_size) {
        throw ConfigError("overlap (" + std::to_string(overlap) +
                          ") must be smaller than chunk_size (" + std::to_string(chunk_size) + ")");
    }
    if (doc.text.empty()) {
        throw IngestError("cannot chunk empty document: " + doc.doc_id);
    }

    const std::size_t len = doc.text.size();
    const std::size_t stride = chunk_size - overlap;

    std::vector<DocumentChunk> chunks;
    int ordinal = 0;
    for (std::size_t start = 0; start < len; start += stride) {
        std::size_t end = std::min(start + chunk_size, len);
        DocumentChunk chunk;
        chunk.doc_id = doc.doc_id;
        chunk.ordinal = ordinal;
        chunk.chunk_id = doc.doc_id + ":" + std::to_string(ordinal);
        chunk.text = doc.text.substr(start, end - start);
        chunk.span = CharSpan{start, end};
        chunks.push_back(std::move(chunk));
        ++ordinal;
    }
    return chunks;
}

std::vector<DocumentChunk> chunk_documents(const std::vector<RawDocument>& docs,
                                           std::size_t chunk_size,
                                           std::size_t overlap) {
    std::vector<DocumentChunk> all;
    for (const auto& doc : docs) {
        auto chunks = chunk_document(doc, chunk_size, overlap);
        all.insert(all.end(), std::make_move_iterator(chunks.begin()),
                   std::make_move_iterator(chunks.end()));
    }
    return all;
}

} // namespace ragloop
