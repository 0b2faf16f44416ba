#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "extsumm/document.hpp"
#include "extsumm/rouge.hpp"

namespace extsumm {

enum class GainMetric {
    MeanRg12,   // mean of ROUGE-1 F1 and ROUGE-2 F1
    MeanRg12L,  // mean of ROUGE-1, ROUGE-2 and ROUGE-L F1
};

struct OracleConfig {
    int k = 15;
    GainMetric gain_metric = GainMetric::MeanRg12;
    bool diversity = true;

    void validate() const {
        if (k < 1) throw std::invalid_argument("oracle k must be >= 1");
    }
};

struct GreedyStep {
    int position = 0;
    double score_after = 0.0;
};

struct GreedyTrace {
    std::vector<GreedyStep> steps;
    std::vector<int> labels;
};

namespace detail {

struct DocIds {
    std::vector<std::vector<int>> sentences;
    std::vector<int> summary;
};

inline DocIds intern_document(const Document& doc) {
    DocIds ids;
    std::unordered_map<std::string_view, int> table;
    ids.sentences.reserve(doc.sentences.size());
    for (const auto& s : doc.sentences) ids.sentences.push_back(intern_tokens(s.tokens, table));
    ids.summary = intern_tokens(doc.summary_tokens, table);
    return ids;
}

// Score of a selected position set: the chosen sentences are concatenated in
// document order into one flat sequence and scored against the summary.
inline double set_score(const DocIds& ids, std::span<const int> positions, GainMetric metric) {
    std::vector<int> concat;
    std::size_t total = 0;
    for (int p : positions) total += ids.sentences[static_cast<std::size_t>(p)].size();
    concat.reserve(total);
    for (int p : positions) {
        const auto& s = ids.sentences[static_cast<std::size_t>(p)];
        concat.insert(concat.end(), s.begin(), s.end());
    }
    const RougeScore r1 = rouge_n_ids(concat, ids.summary, 1);
    const RougeScore r2 = rouge_n_ids(concat, ids.summary, 2);
    if (metric == GainMetric::MeanRg12) return 0.5 * (r1.f1 + r2.f1);
    const RougeScore rl = rouge_l_ids(concat, ids.summary);
    return (r1.f1 + r2.f1 + rl.f1) / 3.0;
}

}  // namespace detail

inline double oracle_set_score(const Document& doc, std::span<const int> positions,
                               GainMetric metric) {
    std::vector<int> ordered(positions.begin(), positions.end());
    std::sort(ordered.begin(), ordered.end());
    for (int p : ordered) {
        if (p < 0 || static_cast<std::size_t>(p) >= doc.sentences.size()) {
            throw LabelOutOfRange("position " + std::to_string(p) + " outside document '" +
                                  doc.id + "'");
        }
    }
    return detail::set_score(detail::intern_document(doc), ordered, metric);
}

// Greedy selection: at each step add the sentence with the largest strictly
// positive score gain; stop at k or when nothing improves the score. With
// diversity on, each step only considers sentences from the least-selected
// section categories among those that still offer a positive-gain candidate.
// Ties always break toward the lowest position.
inline GreedyTrace greedy_oracle_trace(const Document& doc, const OracleConfig& cfg) {
    cfg.validate();
    if (doc.sentences.empty()) throw EmptyDocument("document '" + doc.id + "' has no sentences");

    const auto ids = detail::intern_document(doc);
    const auto m = doc.sentences.size();

    GreedyTrace trace;
    std::vector<int> selected;  // sorted ascending
    std::vector<char> taken(m, 0);
    std::array<int, kNumSections> picks_per_category{};
    double score = 0.0;

    while (selected.size() < static_cast<std::size_t>(cfg.k)) {
        std::vector<int> candidates;
        std::vector<double> cand_scores;
        for (std::size_t c = 0; c < m; ++c) {
            if (taken[c]) continue;
            std::vector<int> trial = selected;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), static_cast<int>(c)),
                         static_cast<int>(c));
            double s = detail::set_score(ids, trial, cfg.gain_metric);
            if (s > score) {
                candidates.push_back(static_cast<int>(c));
                cand_scores.push_back(s);
            }
        }
        if (candidates.empty()) break;

        if (cfg.diversity) {
            int min_count = std::numeric_limits<int>::max();
            for (int c : candidates) {
                auto cat = static_cast<int>(doc.sentences[static_cast<std::size_t>(c)].section_category);
                min_count = std::min(min_count, picks_per_category[static_cast<std::size_t>(cat)]);
            }
            std::vector<int> restricted;
            std::vector<double> restricted_scores;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                auto cat = static_cast<int>(
                    doc.sentences[static_cast<std::size_t>(candidates[i])].section_category);
                if (picks_per_category[static_cast<std::size_t>(cat)] == min_count) {
                    restricted.push_back(candidates[i]);
                    restricted_scores.push_back(cand_scores[i]);
                }
            }
            if (!restricted.empty()) {
                candidates = std::move(restricted);
                cand_scores = std::move(restricted_scores);
            }
        }

        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (cand_scores[i] > cand_scores[best]) best = i;
        }
        const int pick = candidates[best];
        score = cand_scores[best];
        taken[static_cast<std::size_t>(pick)] = 1;
        selected.insert(std::upper_bound(selected.begin(), selected.end(), pick), pick);
        ++picks_per_category[static_cast<std::size_t>(
            static_cast<int>(doc.sentences[static_cast<std::size_t>(pick)].section_category))];
        trace.steps.push_back({pick, score});
    }

    trace.labels.assign(m, 0);
    for (int p : selected) trace.labels[static_cast<std::size_t>(p)] = 1;
    return trace;
}

inline std::vector<int> greedy_oracle(const Document& doc, const OracleConfig& cfg) {
    return greedy_oracle_trace(doc, cfg).labels;
}

// Exhaustive reference: scores every subset of size <= k. Guarded to small
// documents; intended for tests and spot checks, not production labeling.
inline std::vector<int> brute_force_oracle(const Document& doc, int k, GainMetric metric) {
    if (doc.sentences.empty()) throw EmptyDocument("document '" + doc.id + "' has no sentences");
    const auto m = doc.sentences.size();
    if (m > 12) {
        throw TooLarge("brute_force_oracle is limited to 12 sentences, got " + std::to_string(m));
    }
    if (k < 0) throw std::invalid_argument("brute_force_oracle k must be >= 0");

    const auto ids = detail::intern_document(doc);
    std::vector<int> best_positions;  // empty set scores 0
    double best_score = 0.0;

    const auto limit = static_cast<std::uint32_t>(1u << m);
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        if (std::popcount(mask) > k) continue;
        std::vector<int> positions;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) positions.push_back(static_cast<int>(i));
        }
        const double s = detail::set_score(ids, positions, metric);
        if (s > best_score ||
            (s == best_score && std::lexicographical_compare(positions.begin(), positions.end(),
                                                             best_positions.begin(),
                                                             best_positions.end()))) {
            best_score = s;
            best_positions = std::move(positions);
        }
    }

    std::vector<int> labels(m, 0);
    for (int p : best_positions) labels[static_cast<std::size_t>(p)] = 1;
    return labels;
}

struct PerDatasetOracleConfig {
    OracleConfig fallback;
    std::map<std::string, OracleConfig> by_dataset;

    const OracleConfig& resolve(const std::string& dataset) const {
        auto it = by_dataset.find(dataset);
        return it == by_dataset.end() ? fallback : it->second;
    }
};

inline void apply_oracle_labels(Document& doc, const std::vector<int>& labels) {
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        doc.sentences[i].oracle_label = labels[i];
    }
}

inline void label_corpus(Corpus& corpus, const OracleConfig& cfg) {
    for (auto& doc : corpus) apply_oracle_labels(doc, greedy_oracle(doc, cfg));
}

inline void label_corpus(Corpus& corpus, const PerDatasetOracleConfig& cfg) {
    for (auto& doc : corpus) {
        apply_oracle_labels(doc, greedy_oracle(doc, cfg.resolve(doc.dataset)));
    }
}

}  // namespace extsumm
