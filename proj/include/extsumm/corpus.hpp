#pragma once

#include <stdexcept>

#include "extsumm/document.hpp"

namespace extsumm {

struct CorpusStats {
    std::size_t num_docs = 0;
    double avg_doc_tokens = 0.0;
    double avg_summary_tokens = 0.0;
};

// Keeps exactly the documents whose reference summary has at least
// min_summary_tokens tokens, preserving order.
inline Corpus filter_long(const Corpus& corpus, int min_summary_tokens = 350) {
    if (min_summary_tokens < 0) throw std::invalid_argument("min_summary_tokens must be >= 0");
    Corpus out;
    for (const auto& doc : corpus) {
        if (doc.summary_tokens.size() >= static_cast<std::size_t>(min_summary_tokens)) {
            out.push_back(doc);
        }
    }
    return out;
}

inline CorpusStats compute_stats(const Corpus& corpus) {
    CorpusStats stats;
    stats.num_docs = corpus.size();
    if (corpus.empty()) return stats;
    double doc_tokens = 0.0;
    double summary_tokens = 0.0;
    for (const auto& doc : corpus) {
        doc_tokens += static_cast<double>(doc.num_doc_tokens());
        summary_tokens += static_cast<double>(doc.summary_tokens.size());
    }
    stats.avg_doc_tokens = doc_tokens / static_cast<double>(corpus.size());
    stats.avg_summary_tokens = summary_tokens / static_cast<double>(corpus.size());
    return stats;
}

// First-k truncation used when feeding documents to the encoder. Oracle
// labeling and ROUGE evaluation always see the whole document.
inline Document truncated(const Document& doc, std::size_t max_sentences) {
    if (doc.sentences.size() <= max_sentences) return doc;
    Document out = doc;
    out.sentences.resize(max_sentences);
    return out;
}

}  // namespace extsumm
