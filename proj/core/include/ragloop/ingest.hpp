#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ragloop {

/// One loaded source file, pre-chunking.
struct RawDocument {
    std::string doc_id;      // normalized relative path, unique per batch
    std::string text;        // UTF-8, non-empty after trimming
    std::string source_path; // path as given on the command line / API
};

struct CharSpan {
    std::size_t start = 0;
    std::size_t end = 0; // exclusive; 0 <= start < end <= document length
};

/// A retrievable window of one document.
struct DocumentChunk {
    std::string chunk_id; // doc_id + ":" + ordinal
    std::string doc_id;
    int ordinal = 0;
    std::string text;
    CharSpan span; // offsets into RawDocument::text
};

/// Loads .txt / .md files. Directory paths expand recursively to their
/// text files in sorted-path order; file order otherwise matches input
/// order. Unreadable or empty (after trimming) files are errors.
std::vector<RawDocument> load_documents(const std::vector<std::string>& paths);

/// Greedy fixed-window chunking. Windows start at 0, stride, 2*stride, ...
/// while start < len, with stride = chunk_size - overlap; the last window is
/// clipped at the document end. Spans cover the text with no gaps.
std::vector<DocumentChunk> chunk_document(const RawDocument& doc,
                                          std::size_t chunk_size,
                                          std::size_t overlap);

/// chunk_document over a whole batch, preserving document order.
std::vector<DocumentChunk> chunk_documents(const std::vector<RawDocument>& docs,
                                           std::size_t chunk_size,
                                           std::size_t overlap);

} // namespace ragloop
