#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "extsumm/corpus.hpp"
#include "extsumm/inference.hpp"
#include "extsumm/model.hpp"
#include "extsumm/rouge.hpp"
#include "extsumm/vocab.hpp"
#include "json.hpp"

namespace extsumm {

inline constexpr const char* kCheckpointFormat = "extsumm-checkpoint-v1";

struct TrainConfig {
    double lr = 2e-3;
    int batch_docs = 8;
    int max_steps = 2000;
    int val_interval = 200;
    double grad_clip_norm = 1.0;  // <= 0 disables clipping
    std::uint64_t seed = 42;
    int val_top_k = 3;
    std::string out_dir = "run";

    void validate() const {
        if (lr <= 0.0) throw std::invalid_argument("lr must be positive");
        if (batch_docs < 1) throw std::invalid_argument("batch_docs must be >= 1");
        if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
        if (val_interval < 1) throw std::invalid_argument("val_interval must be >= 1");
    }
};

struct CheckpointRecord {
    std::int64_t step = 0;
    std::string path;
    double val_metric = 0.0;
};

class Adam {
  public:
    Adam(const ModelConfig& cfg, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8)
        : lr_(lr),
          beta1_(beta1),
          beta2_(beta2),
          eps_(eps),
          m_(Parameters::zeros(cfg)),
          v_(Parameters::zeros(cfg)) {}

    void step(Parameters& params, const Parameters& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        auto ps = params.tensors();
        auto gs = grads.tensors();
        auto ms = m_.tensors();
        auto vs = v_.tensors();
        for (std::size_t i = 0; i < ps.size(); ++i) {
            Eigen::MatrixXd& p = *ps[i].second;
            const Eigen::MatrixXd& g = *gs[i].second;
            Eigen::MatrixXd& m = *ms[i].second;
            Eigen::MatrixXd& v = *vs[i].second;
            m = beta1_ * m + (1.0 - beta1_) * g;
            v = (beta2_ * v.array() + (1.0 - beta2_) * g.array().square()).matrix();
            p.array() -= lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps_);
        }
    }

    std::int64_t steps_taken() const { return t_; }

  private:
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    Parameters m_, v_;
};

// Global-norm clipping across the whole parameter set; returns the pre-clip norm.
inline double clip_gradients(Parameters& grads, double max_norm) {
    double sq = 0.0;
    auto ts = grads.tensors();
    for (auto& [name, t] : ts) sq += t->squaredNorm();
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (auto& [name, t] : ts) *t *= scale;
    }
    return norm;
}

inline nlohmann::json model_config_to_json(const ModelConfig& cfg) {
    return nlohmann::json{{"vocab_size", cfg.vocab_size},
                          {"d_model", cfg.d_model},
                          {"num_heads", cfg.num_heads},
                          {"num_layers", cfg.num_layers},
                          {"max_sentences", cfg.max_sentences},
                          {"num_sections", cfg.num_sections},
                          {"dropout", cfg.dropout},
                          {"alpha", cfg.alpha}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.vocab_size = j.at("vocab_size").get<int>();
    cfg.d_model = j.at("d_model").get<int>();
    cfg.num_heads = j.at("num_heads").get<int>();
    cfg.num_layers = j.at("num_layers").get<int>();
    cfg.max_sentences = j.at("max_sentences").get<int>();
    cfg.num_sections = j.at("num_sections").get<int>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.validate();
    return cfg;
}

inline void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                            const Parameters& params, const Vocabulary& vocab,
                            std::int64_t step) {
    if (static_cast<std::size_t>(cfg.vocab_size) != vocab.size()) {
        throw MalformedRecord("config vocab_size disagrees with vocabulary size");
    }
    nlohmann::json tensors = nlohmann::json::object();
    for (const auto& [name, t] : params.tensors()) {
        std::vector<double> data;
        data.reserve(static_cast<std::size_t>(t->size()));
        for (Eigen::Index r = 0; r < t->rows(); ++r) {
            for (Eigen::Index c = 0; c < t->cols(); ++c) data.push_back((*t)(r, c));
        }
        tensors[name] = {{"rows", t->rows()}, {"cols", t->cols()}, {"data", std::move(data)}};
    }
    nlohmann::json j{{"format", kCheckpointFormat},
                     {"step", step},
                     {"config", model_config_to_json(cfg)},
                     {"vocab", vocab.tokens()},
                     {"tensors", std::move(tensors)}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out << j.dump() << '\n';
    if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

struct Checkpoint {
    ModelConfig config;
    Parameters params;
    Vocabulary vocab;
    std::int64_t step = 0;

    Model make_model() const { return Model(config, params); }
};

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("checkpoint '" + path + "': " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kCheckpointFormat) {
            throw MalformedRecord("checkpoint '" + path + "' has unknown format tag");
        }
        Checkpoint ckpt;
        ckpt.config = model_config_from_json(j.at("config"));
        ckpt.vocab = Vocabulary::from_tokens(j.at("vocab").get<std::vector<std::string>>());
        if (ckpt.vocab.size() != static_cast<std::size_t>(ckpt.config.vocab_size)) {
            throw MalformedRecord("checkpoint vocabulary size mismatch");
        }
        ckpt.step = j.at("step").get<std::int64_t>();
        ckpt.params = Parameters::zeros(ckpt.config);
        const auto& tensors = j.at("tensors");
        for (auto& [name, t] : ckpt.params.tensors()) {
            const auto& tj = tensors.at(name);
            if (tj.at("rows").get<Eigen::Index>() != t->rows() ||
                tj.at("cols").get<Eigen::Index>() != t->cols()) {
                throw MalformedRecord("tensor '" + name + "' has unexpected shape");
            }
            const auto data = tj.at("data").get<std::vector<double>>();
            if (data.size() != static_cast<std::size_t>(t->size())) {
                throw MalformedRecord("tensor '" + name + "' has wrong element count");
            }
            std::size_t idx = 0;
            for (Eigen::Index r = 0; r < t->rows(); ++r) {
                for (Eigen::Index c = 0; c < t->cols(); ++c) (*t)(r, c) = data[idx++];
            }
        }
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("checkpoint '" + path + "': " + e.what());
    }
}

// Mean over validation docs of (ROUGE-2 F1 + ROUGE-L F1)/2, scoring top-k
// extraction without trigram blocking against the reference summary.
inline double validate(const Model& model, const Vocabulary& vocab, const Corpus& val,
                       int top_k) {
    if (val.empty()) throw EmptyValidationSet("validation corpus is empty");
    double sum = 0.0;
    for (const auto& doc : val) {
        const auto res = extract_summary(doc, model, vocab, top_k, false);
        const RougeScore r2 = rouge_n(res.summary_tokens, doc.summary_tokens, 2);
        const RougeScore rl = rouge_l(res.summary_tokens, doc.summary_tokens);
        sum += 0.5 * (r2.f1 + rl.f1);
    }
    return sum / static_cast<double>(val.size());
}

inline double validate(const Checkpoint& ckpt, const Corpus& val, int top_k) {
    const Model model = ckpt.make_model();
    return validate(model, ckpt.vocab, val, top_k);
}

inline CheckpointRecord select_best(const std::vector<CheckpointRecord>& records) {
    if (records.empty()) throw NoCheckpoints("no checkpoint records to select from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].val_metric > records[best].val_metric ||
            (records[i].val_metric == records[best].val_metric &&
             records[i].step < records[best].step)) {
            best = i;
        }
    }
    return records[best];
}

struct TrainResult {
    std::vector<CheckpointRecord> checkpoints;
    CheckpointRecord best;
    std::string best_path;     // model_best.json copy
    std::string metrics_path;  // metrics.csv
};

namespace detail {

struct EncodedTrainDoc {
    std::vector<std::vector<int>> ids;
    std::vector<int> select_labels;
    std::vector<int> section_labels;
};

inline EncodedTrainDoc encode_train_doc(const Document& doc, const Vocabulary& vocab,
                                        int max_sentences) {
    EncodedTrainDoc enc;
    enc.ids = encode_sentences(doc, vocab, max_sentences);
    const std::size_t n = enc.ids.size();
    enc.select_labels.reserve(n);
    enc.section_labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        enc.select_labels.push_back(*doc.sentences[i].oracle_label);
        enc.section_labels.push_back(static_cast<int>(doc.sentences[i].section_category));
    }
    return enc;
}

}  // namespace detail

inline TrainResult train(const Corpus& train_corpus, const Corpus& val_corpus,
                         const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                         const Vocabulary& vocab) {
    model_cfg.validate();
    train_cfg.validate();
    if (train_corpus.empty()) throw TooFewDocs("training corpus is empty");
    if (val_corpus.empty()) throw EmptyValidationSet("validation corpus is empty");
    for (const auto& doc : train_corpus) {
        if (!doc.has_oracle_labels()) {
            throw MissingLabels("training document '" + doc.id + "' lacks oracle labels");
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(train_cfg.out_dir);

    std::vector<detail::EncodedTrainDoc> encoded;
    encoded.reserve(train_corpus.size());
    for (const auto& doc : train_corpus) {
        encoded.push_back(detail::encode_train_doc(doc, vocab, model_cfg.max_sentences));
    }

    Model model(model_cfg, train_cfg.seed);
    Adam optimizer(model_cfg, train_cfg.lr);
    std::mt19937_64 rng(train_cfg.seed);
    const double alpha = model_cfg.alpha;

    const auto batch_indices_eval = [&]() {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < encoded.size() && i < static_cast<std::size_t>(train_cfg.batch_docs); ++i) {
            idx.push_back(i);
        }
        return idx;
    };

    // Combined loss over a batch in eval mode (used for the step-0 metrics row).
    const auto eval_batch_loss = [&](const std::vector<std::size_t>& batch) {
        double sel_sum = 0.0, sec_sum = 0.0;
        int n_total = 0;
        for (std::size_t di : batch) {
            const auto& d = encoded[di];
            const Forward f = model.forward(d.ids, false, nullptr);
            const DocLossSums sums = loss_sums(f, d.select_labels, d.section_labels);
            sel_sum += sums.select_sum;
            sec_sum += sums.section_sum;
            n_total += sums.num_sentences;
        }
        const double inv_n = 1.0 / static_cast<double>(n_total);
        return alpha * sel_sum * inv_n + (1.0 - alpha) * sec_sum * inv_n;
    };

    TrainResult result;
    struct MetricsRow {
        std::int64_t step;
        double train_loss;
        double val_metric;
    };
    std::vector<MetricsRow> metrics;

    const auto checkpoint_at = [&](std::int64_t step, double train_loss) {
        const double vm = validate(model, vocab, val_corpus, train_cfg.val_top_k);
        const std::string path =
            (fs::path(train_cfg.out_dir) / ("checkpoint_" + std::to_string(step) + ".json"))
                .string();
        save_checkpoint(path, model.config, model.params, vocab, step);
        result.checkpoints.push_back({step, path, vm});
        metrics.push_back({step, train_loss, vm});
    };

    checkpoint_at(0, eval_batch_loss(batch_indices_eval()));

    std::vector<std::size_t> order(encoded.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = order.size();  // forces an initial shuffle

    double window_loss = 0.0;
    int window_count = 0;

    for (int step = 1; step <= train_cfg.max_steps; ++step) {
        std::vector<std::size_t> batch;
        batch.reserve(static_cast<std::size_t>(train_cfg.batch_docs));
        for (int b = 0; b < train_cfg.batch_docs; ++b) {
            if (cursor == order.size()) {
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            batch.push_back(order[cursor++]);
        }

        std::vector<Forward> caches;
        caches.reserve(batch.size());
        double sel_sum = 0.0, sec_sum = 0.0;
        int n_total = 0;
        for (std::size_t di : batch) {
            const auto& d = encoded[di];
            caches.push_back(model.forward(d.ids, true, &rng));
            const DocLossSums sums = loss_sums(caches.back(), d.select_labels, d.section_labels);
            sel_sum += sums.select_sum;
            sec_sum += sums.section_sum;
            n_total += sums.num_sentences;
        }
        const double inv_n = 1.0 / static_cast<double>(n_total);
        const double batch_loss = alpha * sel_sum * inv_n + (1.0 - alpha) * sec_sum * inv_n;

        Parameters grads = Parameters::zeros(model_cfg);
        for (std::size_t bi = 0; bi < batch.size(); ++bi) {
            const auto& d = encoded[batch[bi]];
            backward(model, caches[bi], d.select_labels, d.section_labels, alpha, inv_n, grads);
        }
        clip_gradients(grads, train_cfg.grad_clip_norm);
        optimizer.step(model.params, grads);

        window_loss += batch_loss;
        ++window_count;
        if (step % train_cfg.val_interval == 0) {
            checkpoint_at(step, window_loss / window_count);
            window_loss = 0.0;
            window_count = 0;
        }
    }

    result.metrics_path = (fs::path(train_cfg.out_dir) / "metrics.csv").string();
    {
        std::ofstream out(result.metrics_path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + result.metrics_path + "'");
        out << "step,train_loss,val_metric\n";
        char buf[128];
        for (const auto& row : metrics) {
            std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f\n",
                          static_cast<long long>(row.step), row.train_loss, row.val_metric);
            out << buf;
        }
    }

    result.best = select_best(result.checkpoints);
    result.best_path = (fs::path(train_cfg.out_dir) / "model_best.json").string();
    fs::copy_file(result.best.path, result.best_path, fs::copy_options::overwrite_existing);
    {
        nlohmann::json bj{{"step", result.best.step},
                          {"path", result.best.path},
                          {"val_metric", result.best.val_metric}};
        std::ofstream out((fs::path(train_cfg.out_dir) / "best.json").string(),
                          std::ios::binary);
        out << bj.dump() << '\n';
    }

    return result;
}

}  // namespace extsumm
