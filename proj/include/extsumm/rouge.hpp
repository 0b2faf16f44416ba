#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "extsumm/errors.hpp"

namespace extsumm {

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const RougeScore&) const = default;
};

struct RougeSuite {
    RougeScore rg1;
    RougeScore rg2;
    RougeScore rgl;
};

namespace detail {

inline RougeScore make_score(double overlap, double n_cand, double n_ref) {
    RougeScore s;
    if (n_cand > 0) s.precision = overlap / n_cand;
    if (n_ref > 0) s.recall = overlap / n_ref;
    if (s.precision + s.recall > 0) {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    }
    return s;
}

// Clipped overlap: sum over distinct n-grams of min(count in candidate,
// count in reference). Walking the candidate and crediting a window only
// while its running count is still covered by the reference count gives the
// same sum without building the min explicitly.
template <class Key, class MakeKey>
inline long clipped_overlap(std::span<const int> cand, std::span<const int> ref, int n,
                            MakeKey make_key) {
    std::unordered_map<Key, int> ref_counts;
    ref_counts.reserve(ref.size());
    for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[make_key(ref, i)];
    std::unordered_map<Key, int> cand_counts;
    cand_counts.reserve(cand.size());
    long overlap = 0;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
        Key k = make_key(cand, i);
        int c = ++cand_counts[k];
        auto it = ref_counts.find(k);
        if (it != ref_counts.end() && c <= it->second) ++overlap;
    }
    return overlap;
}

inline std::vector<int> intern_tokens(std::span<const std::string> tokens,
                                      std::unordered_map<std::string_view, int>& table) {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto [it, inserted] = table.emplace(t, static_cast<int>(table.size()));
        ids.push_back(it->second);
    }
    return ids;
}

}  // namespace detail

// ROUGE-N on already-interned token ids.
inline RougeScore rouge_n_ids(std::span<const int> cand, std::span<const int> ref, int n) {
    if (n < 1) throw InvalidN("rouge_n requires n >= 1, got " + std::to_string(n));
    const auto un = static_cast<std::size_t>(n);
    const long nc = cand.size() >= un ? static_cast<long>(cand.size() - un + 1) : 0;
    const long nr = ref.size() >= un ? static_cast<long>(ref.size() - un + 1) : 0;
    if (nc == 0 || nr == 0) return {};

    long overlap = 0;
    if (n == 1) {
        overlap = detail::clipped_overlap<int>(cand, ref, n,
                                               [](std::span<const int> s, std::size_t i) { return s[i]; });
    } else if (n == 2) {
        overlap = detail::clipped_overlap<std::uint64_t>(
            cand, ref, n, [](std::span<const int> s, std::size_t i) {
                return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s[i])) << 32) |
                       static_cast<std::uint32_t>(s[i + 1]);
            });
    } else {
        overlap = detail::clipped_overlap<std::string>(
            cand, ref, n, [n](std::span<const int> s, std::size_t i) {
                std::string key(static_cast<std::size_t>(n) * sizeof(int), '\0');
                std::memcpy(key.data(), s.data() + i, key.size());
                return key;
            });
    }
    return detail::make_score(static_cast<double>(overlap), static_cast<double>(nc),
                              static_cast<double>(nr));
}

inline std::size_t lcs_length_ids(std::span<const int> a, std::span<const int> b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// ROUGE-L over single flat sequences (no summary-level union LCS).
inline RougeScore rouge_l_ids(std::span<const int> cand, std::span<const int> ref) {
    if (cand.empty() || ref.empty()) return {};
    const auto lcs = static_cast<double>(lcs_length_ids(cand, ref));
    return detail::make_score(lcs, static_cast<double>(cand.size()),
                              static_cast<double>(ref.size()));
}

inline RougeSuite rouge_suite_ids(std::span<const int> cand, std::span<const int> ref) {
    return {rouge_n_ids(cand, ref, 1), rouge_n_ids(cand, ref, 2), rouge_l_ids(cand, ref)};
}

inline RougeScore rouge_n(std::span<const std::string> cand, std::span<const std::string> ref,
                          int n) {
    std::unordered_map<std::string_view, int> table;
    auto c = detail::intern_tokens(cand, table);
    auto r = detail::intern_tokens(ref, table);
    return rouge_n_ids(c, r, n);
}

inline RougeScore rouge_l(std::span<const std::string> cand, std::span<const std::string> ref) {
    std::unordered_map<std::string_view, int> table;
    auto c = detail::intern_tokens(cand, table);
    auto r = detail::intern_tokens(ref, table);
    return rouge_l_ids(c, r);
}

inline RougeSuite rouge_suite(std::span<const std::string> cand,
                              std::span<const std::string> ref) {
    std::unordered_map<std::string_view, int> table;
    auto c = detail::intern_tokens(cand, table);
    auto r = detail::intern_tokens(ref, table);
    return rouge_suite_ids(c, r);
}

}  // namespace extsumm
