#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace extsumm {

namespace detail {

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ascii_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return (u >= '!' && u <= '/') || (u >= ':' && u <= '@') ||
           (u >= '[' && u <= '`') || (u >= '{' && u <= '~');
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
}

}  // namespace detail

// Lowercased whitespace tokenization. Leading and trailing ASCII punctuation
// of each whitespace chunk is peeled off into single-character tokens;
// interior punctuation ("multi-task", "0.5") stays attached. Locale-free and
// byte-oriented: non-ASCII bytes pass through untouched, so the result is
// deterministic for any UTF-8 input. Total: empty input gives an empty list.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && detail::is_ascii_space(text[i])) ++i;
        std::size_t j = i;
        while (j < n && !detail::is_ascii_space(text[j])) ++j;
        if (i == j) break;
        std::string_view chunk = text.substr(i, j - i);

        std::size_t b = 0;
        std::size_t e = chunk.size();
        while (b < e && detail::is_ascii_punct(chunk[b])) ++b;
        while (e > b && detail::is_ascii_punct(chunk[e - 1])) --e;

        for (std::size_t k = 0; k < b; ++k) out.emplace_back(1, chunk[k]);
        if (b < e) {
            std::string core(chunk.substr(b, e - b));
            for (char& c : core) c = detail::ascii_lower(c);
            out.push_back(std::move(core));
        }
        for (std::size_t k = e; k < chunk.size(); ++k) out.emplace_back(1, chunk[k]);
        i = j;
    }
    return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) s += ' ';
        s += tokens[i];
    }
    return s;
}

}  // namespace extsumm
