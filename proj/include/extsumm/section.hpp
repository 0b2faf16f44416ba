#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "extsumm/errors.hpp"
#include "extsumm/tokenize.hpp"
#include "json.hpp"

namespace extsumm {

// Canonical discourse roles a sentence's section heading can map to.
// Closed set; unknown headings fall back to Other.
enum class SectionCategory : int {
    Introduction = 0,
    Background = 1,
    Method = 2,
    Experiment = 3,
    Result = 4,
    Conclusion = 5,
    Other = 6,
};

inline constexpr int kNumSections = 7;

inline const char* to_string(SectionCategory c) {
    switch (c) {
        case SectionCategory::Introduction: return "INTRODUCTION";
        case SectionCategory::Background: return "BACKGROUND";
        case SectionCategory::Method: return "METHOD";
        case SectionCategory::Experiment: return "EXPERIMENT";
        case SectionCategory::Result: return "RESULT";
        case SectionCategory::Conclusion: return "CONCLUSION";
        case SectionCategory::Other: return "OTHER";
    }
    return "OTHER";
}

inline std::optional<SectionCategory> section_from_string(std::string_view name) {
    for (int i = 0; i < kNumSections; ++i) {
        auto c = static_cast<SectionCategory>(i);
        if (name == to_string(c)) return c;
    }
    return std::nullopt;
}

// Keyword lists per category; matching walks categories in enum order, so
// earlier categories win when a heading matches several lists
// ("Experimental Results" lands on Experiment, not Result).
using SectionKeywordMap = std::array<std::vector<std::string>, kNumSections>;

inline const SectionKeywordMap& default_section_keywords() {
    static const SectionKeywordMap map = {{
        /* Introduction */ {"introduction", "motivation", "overview"},
        /* Background */ {"background", "related work", "preliminar", "prior work", "literature review"},
        /* Method */ {"method", "approach", "model", "architecture", "algorithm", "proposed"},
        /* Experiment */ {"experiment", "evaluation", "setup", "ablation", "dataset"},
        /* Result */ {"result", "discussion", "finding", "analysis", "performance"},
        /* Conclusion */ {"conclusion", "concluding", "future work", "summary"},
        /* Other */ {},
    }};
    return map;
}

// Case-insensitive substring match of a raw heading against the keyword map.
// Total and deterministic: any input maps to exactly one of the 7 categories.
inline SectionCategory canonicalize_section(std::string_view raw_title,
                                            const SectionKeywordMap& keywords = default_section_keywords()) {
    std::string lowered(raw_title);
    for (char& c : lowered) c = detail::ascii_lower(c);
    for (int i = 0; i < kNumSections; ++i) {
        for (const std::string& kw : keywords[static_cast<std::size_t>(i)]) {
            if (!kw.empty() && lowered.find(kw) != std::string::npos) {
                return static_cast<SectionCategory>(i);
            }
        }
    }
    return SectionCategory::Other;
}

// Loads a user keyword map from a JSON object of the form
// {"INTRODUCTION": ["intro", ...], ...}. Categories left out keep no
// keywords; unknown category names are rejected.
inline SectionKeywordMap load_section_keywords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open section keyword map: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("invalid section keyword map " + path + ": " + e.what());
    }
    if (!j.is_object()) throw MalformedRecord("section keyword map must be a JSON object: " + path);
    SectionKeywordMap map{};
    for (const auto& [key, val] : j.items()) {
        auto cat = section_from_string(key);
        if (!cat) throw MalformedRecord("unknown section category '" + key + "' in " + path);
        if (!val.is_array()) throw MalformedRecord("keyword list for '" + key + "' must be an array in " + path);
        for (const auto& kw : val) {
            if (!kw.is_string()) throw MalformedRecord("keywords must be strings in " + path);
            std::string k = kw.get<std::string>();
            for (char& c : k) c = detail::ascii_lower(c);
            map[static_cast<std::size_t>(*cat)].push_back(std::move(k));
        }
    }
    return map;
}

}  // namespace extsumm
