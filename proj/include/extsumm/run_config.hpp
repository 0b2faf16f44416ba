#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "extsumm/errors.hpp"
#include "extsumm/oracle.hpp"

namespace extsumm {

// Per-dataset constants: oracle budget and the extended-summary length filter.
struct DatasetPreset {
    std::string name;
    int oracle_k = 15;
    int min_summary_tokens = 0;
    int top_k = 15;
};

inline std::optional<DatasetPreset> dataset_preset(const std::string& name) {
    if (name == "longsumm") return DatasetPreset{name, 30, 0, 30};
    if (name == "arxiv-long") return DatasetPreset{name, 15, 350, 15};
    if (name == "pubmed-long") return DatasetPreset{name, 25, 350, 25};
    if (name == "custom") return DatasetPreset{name, 15, 0, 15};
    return std::nullopt;
}

// Flat key/value config file (extsumm.toml). Supports `key = value` lines,
// quoted strings, numbers, booleans, # comments, and [section] prefixes that
// turn later keys into section.key. Resolution order everywhere in the CLI is
// flag > environment > file > built-in default.
class RunConfig {
  public:
    static RunConfig load(const std::string& path) {
        RunConfig cfg;
        std::ifstream in(path);
        if (!in) return cfg;  // absent config file is not an error
        std::string line;
        std::string prefix;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            strip_comment(line);
            trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                prefix = line.substr(1, line.size() - 2);
                trim(prefix);
                if (!prefix.empty()) prefix += '.';
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw MalformedRecord(path + ":" + std::to_string(lineno) +
                                      ": expected key = value");
            }
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            trim(key);
            trim(value);
            if (key.empty()) {
                throw MalformedRecord(path + ":" + std::to_string(lineno) + ": empty key");
            }
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
                value = value.substr(1, value.size() - 2);
            }
            cfg.values_[prefix + key] = value;
        }
        return cfg;
    }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<int> get_int(const std::string& key) const {
        auto v = get(key);
        if (!v) return std::nullopt;
        try {
            return std::stoi(*v);
        } catch (const std::exception&) {
            throw MalformedRecord("config key '" + key + "' is not an integer: " + *v);
        }
    }

    std::optional<double> get_double(const std::string& key) const {
        auto v = get(key);
        if (!v) return std::nullopt;
        try {
            return std::stod(*v);
        } catch (const std::exception&) {
            throw MalformedRecord("config key '" + key + "' is not a number: " + *v);
        }
    }

    std::optional<bool> get_bool(const std::string& key) const {
        auto v = get(key);
        if (!v) return std::nullopt;
        if (*v == "true" || *v == "on" || *v == "1") return true;
        if (*v == "false" || *v == "off" || *v == "0") return false;
        throw MalformedRecord("config key '" + key + "' is not a boolean: " + *v);
    }

    bool empty() const { return values_.empty(); }

  private:
    static void strip_comment(std::string& s) {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') quoted = !quoted;
            if (s[i] == '#' && !quoted) {
                s.resize(i);
                return;
            }
        }
    }

    static void trim(std::string& s) {
        const auto first = s.find_first_not_of(" \t\r");
        const auto last = s.find_last_not_of(" \t\r");
        s = first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    }

    std::map<std::string, std::string> values_;
};

inline std::optional<std::string> env_value(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

inline std::string resolve_data_dir(const std::optional<std::string>& flag,
                                    const RunConfig& cfg) {
    if (flag) return *flag;
    if (auto env = env_value("EXTSUMM_DATA_DIR")) return *env;
    if (auto file = cfg.get("data_dir")) return *file;
    return ".";
}

}  // namespace extsumm
