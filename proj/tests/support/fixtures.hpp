#pragma once

// Hand-derived expected values shared by the unit tests and the acceptance
// gate. ROUGE triples were computed independently by hand / reference
// arithmetic and frozen here; they are inputs to the tests, not outputs of the
// implementation under test.

#include <string>
#include <vector>

namespace fixtures {

inline std::vector<std::string> toks(const std::string& spaced) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : spaced) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct RougeCase {
    const char* name;
    int n;  // 1, 2, 3 for ROUGE-N; 0 means ROUGE-L
    const char* candidate;
    const char* reference;
    double precision;
    double recall;
    double f1;
};

inline const std::vector<RougeCase>& rouge_cases() {
    static const std::vector<RougeCase> cases = {
        // ROUGE-1
        {"r1 identity", 1, "a b c", "a b c", 1.0, 1.0, 1.0},
        {"r1 cat sat", 1, "the cat sat", "the cat", 2.0 / 3.0, 1.0, 0.8},
        {"r1 disjoint", 1, "a b c", "d e f", 0.0, 0.0, 0.0},
        {"r1 clipped both ways", 1, "a a b", "a b b", 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0},
        {"r1 single vs repeats", 1, "a", "a a a", 1.0, 1.0 / 3.0, 0.5},
        {"r1 empty candidate", 1, "", "a b", 0.0, 0.0, 0.0},
        {"r1 both empty", 1, "", "", 0.0, 0.0, 0.0},
        {"r1 candidate repeats", 1, "a b a b", "a b", 0.5, 1.0, 2.0 / 3.0},
        {"r1 reference single", 1, "a a a", "a", 1.0 / 3.0, 1.0, 0.5},
        {"r1 punctuation token", 1, "the cat sat .", "the cat .", 0.75, 1.0,
         0.8571428571428571},
        // ROUGE-2
        {"r2 one shared bigram", 2, "a b c", "a b d", 0.5, 0.5, 0.5},
        {"r2 identity", 2, "a b c d", "a b c d", 1.0, 1.0, 1.0},
        {"r2 reversed", 2, "a b", "b a", 0.0, 0.0, 0.0},
        {"r2 too short", 2, "a", "a", 0.0, 0.0, 0.0},
        {"r2 clipped repeat", 2, "a b a b", "a b a", 2.0 / 3.0, 1.0, 0.8},
        {"r2 punctuation", 2, "the cat sat .", "the cat .", 1.0 / 3.0, 0.5, 0.4},
        {"r2 prefix", 2, "a b c", "a b c d", 1.0, 2.0 / 3.0, 0.8},
        // ROUGE-3
        {"r3 shifted window", 3, "a b c d", "b c d e", 0.5, 0.5, 0.5},
        {"r3 candidate too short", 3, "a b", "a b c", 0.0, 0.0, 0.0},
        // ROUGE-L (n = 0)
        {"rl identity", 0, "a b c", "a b c", 1.0, 1.0, 1.0},
        {"rl swap tail", 0, "a c b", "a b c", 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0},
        {"rl disjoint", 0, "a b", "c d", 0.0, 0.0, 0.0},
        {"rl interleaved", 0, "a b c d e", "a x c y e", 0.6, 0.6, 0.6},
        {"rl single common", 0, "b", "a b c", 1.0, 1.0 / 3.0, 0.5},
        {"rl reversal", 0, "a b c d", "d c b a", 0.25, 0.25, 0.25},
        {"rl padded candidate", 0, "x a b y", "a b", 0.5, 1.0, 2.0 / 3.0},
        {"rl empty candidate", 0, "", "a b", 0.0, 0.0, 0.0},
        {"rl skip letters", 0, "a b c d e f", "a b x c d y f", 5.0 / 6.0, 5.0 / 7.0,
         0.76923076923076927},
    };
    return cases;
}

// Hand-traced trigram-blocking walks. Sentences listed in document order with
// their probabilities; expected selections are ascending positions.
struct BlockingCase {
    const char* name;
    std::vector<const char*> sentences;
    std::vector<double> probs;
    int top_k;
    std::vector<int> expected_selected;
};

inline const std::vector<BlockingCase>& blocking_cases() {
    static const std::vector<BlockingCase> cases = {
        // s1 repeats "a b c" from the top-ranked s0, so the walk skips to s2.
        {"skip shared trigram",
         {"a b c d", "a b c e", "x y z w"},
         {0.9, 0.8, 0.7},
         2,
         {0, 2}},
        // Two-token candidate has no trigram, so it can never be blocked.
        {"short candidate passes", {"a b c", "a b"}, {0.9, 0.8}, 2, {0, 1}},
        // A shared bigram ("c d") without a shared trigram does not block.
        {"bigram does not block", {"a b c d", "c d x y"}, {0.9, 0.8}, 2, {0, 1}},
        // Blocking checks every accepted sentence, not just the latest one.
        {"blocked by earlier pick",
         {"a b c d", "p q r s", "b c d e"},
         {0.9, 0.8, 0.7},
         3,
         {0, 1}},
        // After a skip the walk continues down the ranking until k accepted.
        {"skip then continue",
         {"m n o p", "n o p q", "u v w x", "g h i j"},
         {0.9, 0.85, 0.8, 0.75},
         2,
         {0, 2}},
    };
    return cases;
}

}  // namespace fixtures
