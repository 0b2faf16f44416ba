#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "extsumm/document.hpp"
#include "extsumm/model.hpp"
#include "extsumm/vocab.hpp"
#include "json.hpp"

namespace extsumm {

struct ExtractionResult {
    std::string doc_id;
    std::vector<double> probs;        // one per sentence; 0.0 past the encoder budget
    std::vector<int> selected;        // ascending positions
    std::vector<int> section_pred;    // argmax section per sentence (scored prefix only)
    std::string summary_text;
    std::vector<std::string> summary_tokens;
};

// Positions of the k highest probabilities; ties go to the lower position.
// Returned ascending (document order).
inline std::vector<int> select_top_k(const std::vector<double>& probs, int k) {
    std::vector<int> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (probs[static_cast<std::size_t>(a)] != probs[static_cast<std::size_t>(b)]) {
            return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
        }
        return a < b;
    });
    if (k < 0) k = 0;
    if (order.size() > static_cast<std::size_t>(k)) order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

inline bool has_shared_trigram(const std::vector<std::string>& candidate,
                               const std::vector<std::string>& accepted) {
    if (candidate.size() < 3 || accepted.size() < 3) return false;
    auto key = [](const std::vector<std::string>& toks, std::size_t i) {
        return toks[i] + '\x1f' + toks[i + 1] + '\x1f' + toks[i + 2];
    };
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i + 3 <= accepted.size(); ++i) seen.insert(key(accepted, i));
    for (std::size_t i = 0; i + 3 <= candidate.size(); ++i) {
        if (seen.count(key(candidate, i))) return true;
    }
    return false;
}

// Walks sentences by probability rank (tie -> lower position), skipping a
// candidate that shares a trigram with any already-accepted sentence when
// blocking is on. Stops after k acceptances; returns ascending positions.
inline std::vector<int> select_sentences(const std::vector<double>& probs, int k,
                                         bool trigram_blocking,
                                         const std::vector<SentenceRecord>& sentences) {
    if (!trigram_blocking) return select_top_k(probs, k);
    std::vector<int> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (probs[static_cast<std::size_t>(a)] != probs[static_cast<std::size_t>(b)]) {
            return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
        }
        return a < b;
    });
    std::vector<int> accepted;
    for (int pos : order) {
        if (accepted.size() >= static_cast<std::size_t>(std::max(k, 0))) break;
        const auto& cand = sentences[static_cast<std::size_t>(pos)].tokens;
        bool blocked = false;
        for (int a : accepted) {
            if (has_shared_trigram(cand, sentences[static_cast<std::size_t>(a)].tokens)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) accepted.push_back(pos);
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

// All positions with prob >= threshold, ascending. Config alternative to top-k.
inline std::vector<int> select_above_threshold(const std::vector<double>& probs,
                                               double threshold) {
    std::vector<int> out;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] >= threshold) out.push_back(static_cast<int>(i));
    }
    return out;
}

inline std::vector<std::vector<int>> encode_sentences(const Document& doc,
                                                      const Vocabulary& vocab,
                                                      int max_sentences) {
    const std::size_t n =
        std::min(doc.sentences.size(), static_cast<std::size_t>(max_sentences));
    std::vector<std::vector<int>> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(vocab.encode(doc.sentences[i].tokens));
    return ids;
}

// On-disk prediction record, one JSON object per line. "section_pred" is an
// extension over the minimal contract so section accuracy can be audited.
struct PredRecord {
    std::string id;
    std::vector<double> probs;
    std::vector<int> selected;
    std::string summary;
    std::vector<int> section_pred;

    bool operator==(const PredRecord&) const = default;
};

inline nlohmann::json to_json(const PredRecord& rec) {
    return nlohmann::json{{"id", rec.id},
                          {"probs", rec.probs},
                          {"selected", rec.selected},
                          {"summary", rec.summary},
                          {"section_pred", rec.section_pred}};
}

inline PredRecord pred_record_from_json(const nlohmann::json& j) {
    try {
        PredRecord rec;
        rec.id = j.at("id").get<std::string>();
        rec.probs = j.at("probs").get<std::vector<double>>();
        rec.selected = j.at("selected").get<std::vector<int>>();
        rec.summary = j.at("summary").get<std::string>();
        if (j.contains("section_pred")) {
            rec.section_pred = j.at("section_pred").get<std::vector<int>>();
        }
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(std::string("prediction record: ") + e.what());
    }
}

inline std::vector<PredRecord> read_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::vector<PredRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecord(std::string("prediction line: ") + e.what());
        }
        out.push_back(pred_record_from_json(j));
    }
    return out;
}

inline void write_predictions(const std::string& path, const std::vector<PredRecord>& recs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (const auto& rec : recs) out << to_json(rec).dump() << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

namespace detail {

inline ExtractionResult score_document(const Document& doc, const Model& model,
                                       const Vocabulary& vocab) {
    if (doc.sentences.empty()) throw EmptyDocument("document '" + doc.id + "' has no sentences");
    const auto ids = encode_sentences(doc, vocab, model.config.max_sentences);
    const Forward fwd = model.forward(ids, false, nullptr);
    ExtractionResult res;
    res.doc_id = doc.id;
    res.probs.assign(doc.sentences.size(), 0.0);
    for (Eigen::Index i = 0; i < fwd.probs.size(); ++i) {
        res.probs[static_cast<std::size_t>(i)] = fwd.probs(i);
    }
    res.section_pred = fwd.section_argmax();
    return res;
}

inline void assemble_summary(ExtractionResult& res, const Document& doc) {
    for (std::size_t i = 0; i < res.selected.size(); ++i) {
        const auto& s = doc.sentences[static_cast<std::size_t>(res.selected[i])];
        if (i > 0) res.summary_text += ' ';
        res.summary_text += s.text;
        res.summary_tokens.insert(res.summary_tokens.end(), s.tokens.begin(), s.tokens.end());
    }
}

}  // namespace detail

inline ExtractionResult extract_summary(const Document& doc, const Model& model,
                                        const Vocabulary& vocab, int top_k,
                                        bool trigram_blocking = false) {
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
    ExtractionResult res = detail::score_document(doc, model, vocab);
    res.selected = select_sentences(res.probs, top_k, trigram_blocking, doc.sentences);
    detail::assemble_summary(res, doc);
    return res;
}

// Config alternative to the top-k budget: keep everything scoring at or above
// the threshold.
inline ExtractionResult extract_summary_threshold(const Document& doc, const Model& model,
                                                  const Vocabulary& vocab, double threshold) {
    ExtractionResult res = detail::score_document(doc, model, vocab);
    res.selected = select_above_threshold(res.probs, threshold);
    detail::assemble_summary(res, doc);
    return res;
}

inline PredRecord to_pred_record(const ExtractionResult& res) {
    return PredRecord{res.doc_id, res.probs, res.selected, res.summary_text, res.section_pred};
}

}  // namespace extsumm
