#pragma once

#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "extsumm/errors.hpp"
#include "extsumm/section.hpp"
#include "extsumm/tokenize.hpp"
#include "json.hpp"

namespace extsumm {

struct SentenceRecord {
    std::string text;
    std::vector<std::string> tokens;  // tokenize(text), cached at parse time
    std::string raw_section;
    SectionCategory section_category = SectionCategory::Other;
    int position = 0;
    std::optional<int> oracle_label;  // 0/1 once a labeler has run

    bool operator==(const SentenceRecord&) const = default;
};

struct Document {
    std::string id;
    std::vector<SentenceRecord> sentences;
    std::string summary_text;
    std::vector<std::string> summary_tokens;
    std::string dataset;  // optional corpus tag ("arxiv-long", ...), empty if unset

    bool operator==(const Document&) const = default;

    std::size_t num_doc_tokens() const {
        std::size_t n = 0;
        for (const auto& s : sentences) n += s.tokens.size();
        return n;
    }

    bool has_oracle_labels() const {
        if (sentences.empty()) return false;
        for (const auto& s : sentences)
            if (!s.oracle_label) return false;
        return true;
    }

    std::vector<int> oracle_label_vector() const {
        std::vector<int> v;
        v.reserve(sentences.size());
        for (const auto& s : sentences) v.push_back(s.oracle_label.value_or(0));
        return v;
    }
};

using Corpus = std::vector<Document>;

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* name,
                                           const std::string& doc_id) {
    auto it = j.find(name);
    if (it == j.end()) {
        throw MalformedRecord("record" + (doc_id.empty() ? "" : " '" + doc_id + "'") +
                              " is missing field '" + name + "'");
    }
    return *it;
}

}  // namespace detail

// Parses one raw corpus record:
//   {"id": str, "sentences": [{"text": str, "section": str}], "summary": str}
// Optional fields are carried through when present: "dataset" (record level),
// "oracle_labels" (record level, aligned with sentences) and
// "section_category" (sentence level; recomputed from "section" when absent).
inline Document parse_document(const nlohmann::json& raw,
                               const SectionKeywordMap& keywords = default_section_keywords()) {
    if (!raw.is_object()) throw MalformedRecord("record is not a JSON object");

    std::string id;
    {
        const auto& jid = detail::require_field(raw, "id", "");
        if (!jid.is_string()) throw MalformedRecord("field 'id' must be a string");
        id = jid.get<std::string>();
    }

    const auto& jsent = detail::require_field(raw, "sentences", id);
    if (!jsent.is_array())
        throw MalformedRecord("record '" + id + "': field 'sentences' must be an array");
    const auto& jsummary = detail::require_field(raw, "summary", id);
    if (!jsummary.is_string())
        throw MalformedRecord("record '" + id + "': field 'summary' must be a string");

    if (jsent.empty()) throw EmptyDocument("record '" + id + "' has no sentences");

    Document doc;
    doc.id = std::move(id);
    doc.summary_text = jsummary.get<std::string>();
    doc.summary_tokens = tokenize(doc.summary_text);
    if (auto it = raw.find("dataset"); it != raw.end()) {
        if (!it->is_string())
            throw MalformedRecord("record '" + doc.id + "': field 'dataset' must be a string");
        doc.dataset = it->get<std::string>();
    }

    doc.sentences.reserve(jsent.size());
    int pos = 0;
    for (const auto& js : jsent) {
        if (!js.is_object())
            throw MalformedRecord("record '" + doc.id + "': sentence entries must be objects");
        SentenceRecord s;
        {
            const auto& jtext = detail::require_field(js, "text", doc.id);
            if (!jtext.is_string())
                throw MalformedRecord("record '" + doc.id + "': sentence 'text' must be a string");
            s.text = jtext.get<std::string>();
        }
        {
            const auto& jsec = detail::require_field(js, "section", doc.id);
            if (!jsec.is_string())
                throw MalformedRecord("record '" + doc.id + "': sentence 'section' must be a string");
            s.raw_section = jsec.get<std::string>();
        }
        s.tokens = tokenize(s.text);
        s.position = pos++;
        if (auto it = js.find("section_category"); it != js.end() && it->is_string()) {
            auto cat = section_from_string(it->get<std::string>());
            if (!cat) {
                throw MalformedRecord("record '" + doc.id + "': unknown section_category '" +
                                      it->get<std::string>() + "'");
            }
            s.section_category = *cat;
        } else {
            s.section_category = canonicalize_section(s.raw_section, keywords);
        }
        doc.sentences.push_back(std::move(s));
    }

    if (auto it = raw.find("oracle_labels"); it != raw.end()) {
        if (!it->is_array() || it->size() != doc.sentences.size()) {
            throw MalformedRecord("record '" + doc.id +
                                  "': 'oracle_labels' must align with sentences");
        }
        for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
            const auto& jl = (*it)[i];
            if (!jl.is_number_integer() || (jl.get<int>() != 0 && jl.get<int>() != 1)) {
                throw MalformedRecord("record '" + doc.id + "': oracle labels must be 0 or 1");
            }
            doc.sentences[i].oracle_label = jl.get<int>();
        }
    }
    return doc;
}

inline Document parse_document_line(const std::string& line, std::size_t line_no,
                                    const SectionKeywordMap& keywords = default_section_keywords()) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    try {
        return parse_document(j, keywords);
    } catch (const EmptyDocument&) {
        throw;
    } catch (const MalformedRecord& e) {
        throw MalformedRecord("line " + std::to_string(line_no) + ": " + e.what());
    }
}

inline nlohmann::json to_json(const Document& doc) {
    nlohmann::json jsent = nlohmann::json::array();
    for (const auto& s : doc.sentences) {
        jsent.push_back({{"text", s.text},
                         {"section", s.raw_section},
                         {"section_category", to_string(s.section_category)}});
    }
    nlohmann::json j{{"id", doc.id}, {"sentences", std::move(jsent)}, {"summary", doc.summary_text}};
    if (!doc.dataset.empty()) j["dataset"] = doc.dataset;
    if (doc.has_oracle_labels()) {
        nlohmann::json labels = nlohmann::json::array();
        for (const auto& s : doc.sentences) labels.push_back(*s.oracle_label);
        j["oracle_labels"] = std::move(labels);
    }
    return j;
}

inline std::string serialize_document(const Document& doc) { return to_json(doc).dump(); }

// Streams a JSONL file document by document; blank lines are skipped.
inline void for_each_jsonl(std::istream& in,
                           const std::function<void(Document&&, std::size_t line_no)>& fn,
                           const SectionKeywordMap& keywords = default_section_keywords()) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        fn(parse_document_line(line, line_no, keywords), line_no);
    }
}

inline Corpus read_jsonl(const std::string& path,
                         const SectionKeywordMap& keywords = default_section_keywords()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    Corpus corpus;
    for_each_jsonl(in, [&](Document&& d, std::size_t) { corpus.push_back(std::move(d)); }, keywords);
    return corpus;
}

inline void write_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    for (const auto& doc : corpus) out << serialize_document(doc) << '\n';
}

}  // namespace extsumm
