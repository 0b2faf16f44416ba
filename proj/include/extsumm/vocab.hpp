#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "extsumm/document.hpp"
#include "extsumm/errors.hpp"

namespace extsumm {

inline constexpr const char* kUnkToken = "<unk>";

// Token table with id 0 reserved for <unk>. Built deterministically: tokens
// ranked by frequency (descending), ties by first appearance in the corpus.
class Vocabulary {
  public:
    Vocabulary() { add(kUnkToken); }

    static Vocabulary build(const Corpus& corpus, std::size_t max_size) {
        if (max_size < 1) throw VocabOverflow("vocabulary size must be >= 1");
        struct Entry {
            std::int64_t count = 0;
            std::int64_t first_seen = 0;
        };
        std::unordered_map<std::string, Entry> counts;
        std::int64_t tick = 0;
        auto see = [&](const std::vector<std::string>& tokens) {
            for (const auto& t : tokens) {
                auto [it, inserted] = counts.try_emplace(t);
                if (inserted) it->second.first_seen = tick;
                ++it->second.count;
                ++tick;
            }
        };
        for (const auto& doc : corpus) {
            for (const auto& s : doc.sentences) see(s.tokens);
            see(doc.summary_tokens);
        }

        std::vector<std::pair<std::string, Entry>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second.count != b.second.count) return a.second.count > b.second.count;
            return a.second.first_seen < b.second.first_seen;
        });

        Vocabulary vocab;
        for (const auto& [token, entry] : ranked) {
            if (vocab.size() >= max_size) break;
            if (token != kUnkToken) vocab.add(token);
        }
        return vocab;
    }

    static Vocabulary from_tokens(const std::vector<std::string>& tokens) {
        if (tokens.empty() || tokens.front() != kUnkToken) {
            throw MalformedRecord("vocabulary list must start with <unk>");
        }
        Vocabulary vocab;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            if (vocab.index_.count(tokens[i])) {
                throw MalformedRecord("duplicate vocabulary token '" + tokens[i] + "'");
            }
            vocab.add(tokens[i]);
        }
        return vocab;
    }

    int id(const std::string& token) const {
        auto it = index_.find(token);
        return it == index_.end() ? 0 : it->second;
    }

    std::vector<int> encode(const std::vector<std::string>& tokens) const {
        std::vector<int> out;
        out.reserve(tokens.size());
        for (const auto& t : tokens) out.push_back(id(t));
        return out;
    }

    const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

  private:
    void add(const std::string& token) {
        index_.emplace(token, static_cast<int>(tokens_.size()));
        tokens_.push_back(token);
    }

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace extsumm
