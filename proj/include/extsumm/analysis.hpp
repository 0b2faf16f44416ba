#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "extsumm/csv.hpp"
#include "extsumm/document.hpp"
#include "extsumm/inference.hpp"
#include "extsumm/rouge.hpp"

namespace extsumm {

enum class BinLabel { Improved, Tied, Declined };

inline const char* to_string(BinLabel b) {
    switch (b) {
        case BinLabel::Improved: return "IMPROVED";
        case BinLabel::Tied: return "TIED";
        case BinLabel::Declined: return "DECLINED";
    }
    return "TIED";
}

// The tie boundary is decided after rounding rg_diff to 4 decimals, so scores
// that agree to that precision land in TIED rather than straddling ±1e-16.
inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

inline BinLabel bin_label(double rg_diff) {
    const double r = round4(rg_diff);
    if (r > 0.0) return BinLabel::Improved;
    if (r < 0.0) return BinLabel::Declined;
    return BinLabel::Tied;
}

struct DocComparison {
    std::string doc_id;
    RougeSuite rouge_base;
    RougeSuite rouge_model;
    double f1_base = 0.0;
    double f1_model = 0.0;
    double rg_diff = 0.0;  // mean over RG-1/2/L of (model - base) F1
    double f_diff = 0.0;   // f1_model - f1_base
    int summary_len_tokens = 0;

    BinLabel bin() const { return bin_label(rg_diff); }
};

// Selection F1 of chosen positions against the oracle's positive labels.
inline double selection_f1(std::span<const int> selected, std::span<const int> oracle_labels) {
    int positives = 0;
    for (int y : oracle_labels) positives += y == 1 ? 1 : 0;
    int hits = 0;
    for (int pos : selected) {
        if (pos < 0 || static_cast<std::size_t>(pos) >= oracle_labels.size()) {
            throw LabelOutOfRange("selected position " + std::to_string(pos) +
                                  " outside label vector of size " +
                                  std::to_string(oracle_labels.size()));
        }
        hits += oracle_labels[static_cast<std::size_t>(pos)] == 1 ? 1 : 0;
    }
    if (selected.empty() || positives == 0) return 0.0;
    const double p = static_cast<double>(hits) / static_cast<double>(selected.size());
    const double r = static_cast<double>(hits) / static_cast<double>(positives);
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline DocComparison compare(const Document& doc, const PredRecord& base,
                             const PredRecord& model) {
    if (base.id != doc.id || model.id != doc.id) {
        throw DocMismatch("comparison inputs disagree on document id: doc='" + doc.id +
                          "' base='" + base.id + "' model='" + model.id + "'");
    }
    if (!doc.has_oracle_labels()) {
        throw MissingLabels("document '" + doc.id + "' lacks oracle labels");
    }
    const std::vector<int> labels = doc.oracle_label_vector();

    DocComparison cmp;
    cmp.doc_id = doc.id;
    cmp.rouge_base = rouge_suite(tokenize(base.summary), doc.summary_tokens);
    cmp.rouge_model = rouge_suite(tokenize(model.summary), doc.summary_tokens);
    cmp.f1_base = selection_f1(base.selected, labels);
    cmp.f1_model = selection_f1(model.selected, labels);
    cmp.rg_diff = ((cmp.rouge_model.rg1.f1 - cmp.rouge_base.rg1.f1) +
                   (cmp.rouge_model.rg2.f1 - cmp.rouge_base.rg2.f1) +
                   (cmp.rouge_model.rgl.f1 - cmp.rouge_base.rgl.f1)) /
                  3.0;
    cmp.f_diff = cmp.f1_model - cmp.f1_base;
    cmp.summary_len_tokens = static_cast<int>(doc.summary_tokens.size());
    return cmp;
}

struct BinRow {
    std::string name;
    int count = 0;
    double mean_rg_diff = 0.0;
    double mean_f_diff = 0.0;
};

struct BinSummary {
    BinRow improved{"IMPROVED"};
    BinRow tied{"TIED"};
    BinRow declined{"DECLINED"};
    BinRow total{"TOTAL"};

    std::vector<const BinRow*> rows() const { return {&improved, &tied, &declined, &total}; }
};

inline BinSummary bin_summary(const std::vector<DocComparison>& comparisons) {
    BinSummary s;
    auto row_for = [&](BinLabel b) -> BinRow& {
        switch (b) {
            case BinLabel::Improved: return s.improved;
            case BinLabel::Declined: return s.declined;
            default: return s.tied;
        }
    };
    for (const auto& c : comparisons) {
        BinRow& row = row_for(c.bin());
        ++row.count;
        row.mean_rg_diff += c.rg_diff;
        row.mean_f_diff += c.f_diff;
        ++s.total.count;
        s.total.mean_rg_diff += c.rg_diff;
        s.total.mean_f_diff += c.f_diff;
    }
    for (BinRow* row : {&s.improved, &s.tied, &s.declined, &s.total}) {
        if (row->count > 0) {
            row->mean_rg_diff /= row->count;
            row->mean_f_diff /= row->count;
        }
    }
    return s;
}

struct LengthBin {
    int index = 0;
    int count = 0;
    int min_len = 0;
    int max_len = 0;
    double base_rg1 = 0.0, base_rg2 = 0.0, base_rgl = 0.0;
    double model_rg1 = 0.0, model_rg2 = 0.0, model_rgl = 0.0;
};

// Equal-count bins over reference-summary length: sort ascending, split into
// contiguous runs whose sizes differ by at most one (the first n mod bins runs
// take the extra element).
inline std::vector<LengthBin> length_bins(const std::vector<DocComparison>& comparisons,
                                          int num_bins) {
    const int n = static_cast<int>(comparisons.size());
    if (num_bins < 1 || num_bins > n) {
        throw TooFewDocs("need 1 <= num_bins <= " + std::to_string(n) + ", got " +
                         std::to_string(num_bins));
    }
    std::vector<const DocComparison*> sorted;
    sorted.reserve(comparisons.size());
    for (const auto& c : comparisons) sorted.push_back(&c);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return a->summary_len_tokens < b->summary_len_tokens;
    });

    const int base_size = n / num_bins;
    const int remainder = n % num_bins;
    std::vector<LengthBin> bins;
    bins.reserve(static_cast<std::size_t>(num_bins));
    int start = 0;
    for (int b = 0; b < num_bins; ++b) {
        const int size = base_size + (b < remainder ? 1 : 0);
        LengthBin bin;
        bin.index = b;
        bin.count = size;
        bin.min_len = sorted[static_cast<std::size_t>(start)]->summary_len_tokens;
        bin.max_len = sorted[static_cast<std::size_t>(start + size - 1)]->summary_len_tokens;
        for (int i = start; i < start + size; ++i) {
            const auto* c = sorted[static_cast<std::size_t>(i)];
            bin.base_rg1 += c->rouge_base.rg1.f1;
            bin.base_rg2 += c->rouge_base.rg2.f1;
            bin.base_rgl += c->rouge_base.rgl.f1;
            bin.model_rg1 += c->rouge_model.rg1.f1;
            bin.model_rg2 += c->rouge_model.rg2.f1;
            bin.model_rgl += c->rouge_model.rgl.f1;
        }
        for (double* v : {&bin.base_rg1, &bin.base_rg2, &bin.base_rgl, &bin.model_rg1,
                          &bin.model_rg2, &bin.model_rgl}) {
            *v /= size;
        }
        bins.push_back(bin);
        start += size;
    }
    return bins;
}

struct HeatmapRecord {
    int position = 0;
    SectionCategory section = SectionCategory::Other;
    double prob = 0.0;
    bool is_selected = false;
    bool is_oracle = false;
};

// One record per sentence with extraction probability strictly above the
// threshold, in document order.
inline std::vector<HeatmapRecord> heatmap_export(const Document& doc,
                                                 const std::vector<double>& probs,
                                                 const std::vector<int>& selected,
                                                 const std::vector<int>& oracle_labels,
                                                 double threshold = 0.15) {
    const std::size_t n = doc.sentences.size();
    if (probs.size() != n || oracle_labels.size() != n) {
        throw LengthMismatch("heatmap inputs must align with " + std::to_string(n) +
                             " sentences");
    }
    std::unordered_set<int> sel(selected.begin(), selected.end());
    for (int pos : selected) {
        if (pos < 0 || static_cast<std::size_t>(pos) >= n) {
            throw LengthMismatch("selected position " + std::to_string(pos) + " out of range");
        }
    }
    std::vector<HeatmapRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(probs[i] > threshold)) continue;
        HeatmapRecord rec;
        rec.position = static_cast<int>(i);
        rec.section = doc.sentences[i].section_category;
        rec.prob = probs[i];
        rec.is_selected = sel.count(static_cast<int>(i)) > 0;
        rec.is_oracle = oracle_labels[i] == 1;
        out.push_back(rec);
    }
    return out;
}

// ----- CSV emission -----

inline void write_comparisons_csv(const std::string& path,
                                  const std::vector<DocComparison>& comparisons) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "doc_id,base_rg1_f,base_rg2_f,base_rgl_f,model_rg1_f,model_rg2_f,model_rgl_f,"
           "f1_base,f1_model,rg_diff,f_diff,summary_len_tokens,bin\n";
    for (const auto& c : comparisons) {
        out << csv::format_row({c.doc_id, csv::fmt(c.rouge_base.rg1.f1),
                                csv::fmt(c.rouge_base.rg2.f1), csv::fmt(c.rouge_base.rgl.f1),
                                csv::fmt(c.rouge_model.rg1.f1), csv::fmt(c.rouge_model.rg2.f1),
                                csv::fmt(c.rouge_model.rgl.f1), csv::fmt(c.f1_base),
                                csv::fmt(c.f1_model), csv::fmt(c.rg_diff), csv::fmt(c.f_diff),
                                csv::fmt(c.summary_len_tokens), to_string(c.bin())});
    }
}

inline void write_bins_csv(const std::string& path, const BinSummary& summary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "bin,count,mean_rg_diff,mean_f_diff\n";
    for (const BinRow* row : summary.rows()) {
        out << csv::format_row({row->name, csv::fmt(row->count), csv::fmt(row->mean_rg_diff),
                                csv::fmt(row->mean_f_diff)});
    }
}

inline void write_length_bins_csv(const std::string& path, const std::vector<LengthBin>& bins) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "bin_index,count,min_len,max_len,base_rg1_f,base_rg2_f,base_rgl_f,"
           "model_rg1_f,model_rg2_f,model_rgl_f\n";
    for (const auto& b : bins) {
        out << csv::format_row({csv::fmt(b.index), csv::fmt(b.count), csv::fmt(b.min_len),
                                csv::fmt(b.max_len), csv::fmt(b.base_rg1), csv::fmt(b.base_rg2),
                                csv::fmt(b.base_rgl), csv::fmt(b.model_rg1),
                                csv::fmt(b.model_rg2), csv::fmt(b.model_rgl)});
    }
}

inline void write_heatmap_csv(const std::string& path,
                              const std::vector<HeatmapRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "position,section,prob,is_selected,is_oracle\n";
    for (const auto& r : records) {
        out << csv::format_row({csv::fmt(r.position), to_string(r.section), csv::fmt(r.prob),
                                r.is_selected ? "1" : "0", r.is_oracle ? "1" : "0"});
    }
}

}  // namespace extsumm
