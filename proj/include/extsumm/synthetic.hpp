#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "extsumm/document.hpp"

namespace extsumm {

struct SyntheticConfig {
    int num_docs = 100;
    int sentences_per_doc = 12;
    int num_sections = kNumSections;  // categories drawn uniformly from the first S
    std::uint64_t seed = 7;

    int salient_vocab = 40;    // "key<i>" tokens shared between positives and summary
    int noise_vocab = 120;     // "filler<i>" tokens
    int doc_pool = 8;          // distinct salient tokens available to one document
    int salient_per_positive = 6;
    int noise_per_positive = 2;
    int tokens_per_negative = 8;

    void validate() const {
        if (num_docs < 1 || sentences_per_doc < 1) {
            throw std::invalid_argument("synthetic corpus sizes must be positive");
        }
        if (num_sections < 1 || num_sections > kNumSections) {
            throw std::invalid_argument("num_sections must be in [1, " +
                                        std::to_string(kNumSections) + "]");
        }
        if (doc_pool > salient_vocab) {
            throw std::invalid_argument("doc_pool cannot exceed salient_vocab");
        }
    }

    int planted_per_doc() const { return std::max(1, sentences_per_doc / 4); }
};

namespace detail {

inline const char* synthetic_section_title(SectionCategory cat) {
    switch (cat) {
        case SectionCategory::Introduction: return "Introduction";
        case SectionCategory::Background: return "Background";
        case SectionCategory::Method: return "Methodology";
        case SectionCategory::Experiment: return "Experiments";
        case SectionCategory::Result: return "Results";
        case SectionCategory::Conclusion: return "Conclusion";
        case SectionCategory::Other: return "Acknowledgements";
    }
    return "Acknowledgements";
}

inline std::string synthetic_section_marker(SectionCategory cat) {
    std::string name = to_string(cat);
    for (char& c : name) c = static_cast<char>(c - 'A' + 'a');
    return name + "mark";
}

}  // namespace detail

// Deterministic corpus with planted signal: positives share "key" vocabulary
// with the summary, negatives are filler-only, and every sentence opens with a
// lexical marker naming its section category. All text is lowercase
// alphanumeric, so tokenize(text) reproduces the generated tokens.
inline Corpus gen_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> pick_section(0, cfg.num_sections - 1);
    std::uniform_int_distribution<int> pick_noise(0, cfg.noise_vocab - 1);

    Corpus corpus;
    corpus.reserve(static_cast<std::size_t>(cfg.num_docs));
    for (int d = 0; d < cfg.num_docs; ++d) {
        Document doc;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "syn-%06d", d);
        doc.id = idbuf;
        doc.dataset = "synthetic";

        // Per-document salient pool and planted positive positions.
        std::vector<int> keys(static_cast<std::size_t>(cfg.salient_vocab));
        std::iota(keys.begin(), keys.end(), 0);
        std::shuffle(keys.begin(), keys.end(), rng);
        keys.resize(static_cast<std::size_t>(cfg.doc_pool));
        std::uniform_int_distribution<int> pick_key(0, cfg.doc_pool - 1);

        std::vector<int> positions(static_cast<std::size_t>(cfg.sentences_per_doc));
        std::iota(positions.begin(), positions.end(), 0);
        std::shuffle(positions.begin(), positions.end(), rng);
        positions.resize(static_cast<std::size_t>(cfg.planted_per_doc()));
        std::sort(positions.begin(), positions.end());
        std::vector<char> positive(static_cast<std::size_t>(cfg.sentences_per_doc), 0);
        for (int p : positions) positive[static_cast<std::size_t>(p)] = 1;

        std::vector<std::string> summary_tokens;
        for (int i = 0; i < cfg.sentences_per_doc; ++i) {
            const auto cat = static_cast<SectionCategory>(pick_section(rng));
            std::vector<std::string> tokens;
            tokens.push_back(detail::synthetic_section_marker(cat));
            if (positive[static_cast<std::size_t>(i)]) {
                for (int t = 0; t < cfg.salient_per_positive; ++t) {
                    const std::string key =
                        "key" + std::to_string(keys[static_cast<std::size_t>(pick_key(rng))]);
                    tokens.push_back(key);
                    summary_tokens.push_back(key);
                }
                for (int t = 0; t < cfg.noise_per_positive; ++t) {
                    tokens.push_back("filler" + std::to_string(pick_noise(rng)));
                }
            } else {
                for (int t = 0; t < cfg.tokens_per_negative; ++t) {
                    tokens.push_back("filler" + std::to_string(pick_noise(rng)));
                }
            }

            SentenceRecord sent;
            sent.text = join_tokens(tokens);
            sent.tokens = std::move(tokens);
            sent.raw_section = detail::synthetic_section_title(cat);
            sent.section_category = cat;
            sent.position = i;
            sent.oracle_label = positive[static_cast<std::size_t>(i)] ? 1 : 0;
            doc.sentences.push_back(std::move(sent));
        }

        doc.summary_text = join_tokens(summary_tokens);
        doc.summary_tokens = std::move(summary_tokens);
        corpus.push_back(std::move(doc));
    }
    return corpus;
}

}  // namespace extsumm
