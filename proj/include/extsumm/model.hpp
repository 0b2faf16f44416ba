#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "extsumm/errors.hpp"
#include "extsumm/section.hpp"

namespace extsumm {

inline constexpr double kProbEps = 1e-12;  // sigmoid output clamp
inline constexpr double kLayerNormEps = 1e-5;

struct ModelConfig {
    int vocab_size = 0;  // includes <unk>
    int d_model = 64;
    int num_heads = 4;
    int num_layers = 2;
    int max_sentences = 128;
    int num_sections = kNumSections;
    double dropout = 0.1;
    double alpha = 0.5;  // weight on the selection loss

    void validate() const {
        if (vocab_size < 1) throw std::invalid_argument("vocab_size must be >= 1");
        if (d_model < 1 || num_heads < 1 || num_layers < 1 || max_sentences < 1 ||
            num_sections < 1) {
            throw std::invalid_argument("model dimensions must be positive");
        }
        if (d_model % num_heads != 0) {
            throw std::invalid_argument("d_model must be divisible by num_heads");
        }
        if (dropout < 0.0 || dropout >= 1.0) {
            throw std::invalid_argument("dropout must be in [0, 1)");
        }
        if (alpha < 0.0 || alpha > 1.0) {
            throw AlphaOutOfRange("alpha must be in [0, 1], got " + std::to_string(alpha));
        }
    }

    int head_dim() const { return d_model / num_heads; }
};

struct Parameters {
    struct Layer {
        Eigen::MatrixXd wq, wk, wv, wo;  // d x d
        Eigen::MatrixXd bq, bk, bv, bo;  // 1 x d
        Eigen::MatrixXd ln_gain, ln_bias;  // 1 x d
    };

    Eigen::MatrixXd tok_embed;  // vocab x d
    Eigen::MatrixXd pos_embed;  // max_sentences x d
    std::vector<Layer> layers;
    Eigen::MatrixXd sel_w;  // d x 1
    Eigen::MatrixXd sel_b;  // 1 x 1
    Eigen::MatrixXd sec_w;  // num_sections x d
    Eigen::MatrixXd sec_b;  // 1 x num_sections

    static Parameters zeros(const ModelConfig& cfg) {
        Parameters p;
        p.tok_embed = Eigen::MatrixXd::Zero(cfg.vocab_size, cfg.d_model);
        p.pos_embed = Eigen::MatrixXd::Zero(cfg.max_sentences, cfg.d_model);
        p.layers.resize(static_cast<std::size_t>(cfg.num_layers));
        for (auto& l : p.layers) {
            l.wq = l.wk = l.wv = l.wo = Eigen::MatrixXd::Zero(cfg.d_model, cfg.d_model);
            l.bq = l.bk = l.bv = l.bo = Eigen::MatrixXd::Zero(1, cfg.d_model);
            l.ln_gain = l.ln_bias = Eigen::MatrixXd::Zero(1, cfg.d_model);
        }
        p.sel_w = Eigen::MatrixXd::Zero(cfg.d_model, 1);
        p.sel_b = Eigen::MatrixXd::Zero(1, 1);
        p.sec_w = Eigen::MatrixXd::Zero(cfg.num_sections, cfg.d_model);
        p.sec_b = Eigen::MatrixXd::Zero(1, cfg.num_sections);
        return p;
    }

    // Output heads start at zero: selection begins at probability 0.5 and the
    // section head predicts uniformly until its own loss term moves it, which
    // keeps an alpha=1 run's section accuracy at chance by construction.
    static Parameters init(const ModelConfig& cfg, std::uint64_t seed) {
        Parameters p = zeros(cfg);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> embed_dist(0.0, 0.1);
        std::normal_distribution<double> weight_dist(0.0, 0.02);
        auto fill = [&rng](Eigen::MatrixXd& m, std::normal_distribution<double>& dist) {
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
            }
        };
        fill(p.tok_embed, embed_dist);
        fill(p.pos_embed, embed_dist);
        for (auto& l : p.layers) {
            fill(l.wq, weight_dist);
            fill(l.wk, weight_dist);
            fill(l.wv, weight_dist);
            fill(l.wo, weight_dist);
            l.ln_gain.setOnes();
        }
        return p;
    }

    // Every tensor drawn from N(0, std); used by gradient checks to probe a
    // generic point in parameter space (zero-initialized heads would silence
    // the encoder path).
    static Parameters random(const ModelConfig& cfg, std::uint64_t seed, double stddev = 0.5) {
        Parameters p = zeros(cfg);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, stddev);
        for (auto& [name, t] : p.tensors()) {
            for (Eigen::Index r = 0; r < t->rows(); ++r) {
                for (Eigen::Index c = 0; c < t->cols(); ++c) (*t)(r, c) = dist(rng);
            }
        }
        return p;
    }

    // Stable name -> tensor listing shared by the optimizer, the gradient
    // checker and checkpoint serialization.
    std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors() {
        std::vector<std::pair<std::string, Eigen::MatrixXd*>> out;
        out.emplace_back("tok_embed", &tok_embed);
        out.emplace_back("pos_embed", &pos_embed);
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const std::string prefix = "layers." + std::to_string(i) + ".";
            auto& l = layers[i];
            out.emplace_back(prefix + "wq", &l.wq);
            out.emplace_back(prefix + "wk", &l.wk);
            out.emplace_back(prefix + "wv", &l.wv);
            out.emplace_back(prefix + "wo", &l.wo);
            out.emplace_back(prefix + "bq", &l.bq);
            out.emplace_back(prefix + "bk", &l.bk);
            out.emplace_back(prefix + "bv", &l.bv);
            out.emplace_back(prefix + "bo", &l.bo);
            out.emplace_back(prefix + "ln_gain", &l.ln_gain);
            out.emplace_back(prefix + "ln_bias", &l.ln_bias);
        }
        out.emplace_back("sel_w", &sel_w);
        out.emplace_back("sel_b", &sel_b);
        out.emplace_back("sec_w", &sec_w);
        out.emplace_back("sec_b", &sec_b);
        return out;
    }

    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const {
        auto mutable_list = const_cast<Parameters*>(this)->tensors();
        std::vector<std::pair<std::string, const Eigen::MatrixXd*>> out;
        out.reserve(mutable_list.size());
        for (auto& [name, ptr] : mutable_list) out.emplace_back(name, ptr);
        return out;
    }

    std::size_t count_params() const {
        std::size_t n = 0;
        for (const auto& [name, t] : tensors()) n += static_cast<std::size_t>(t->size());
        return n;
    }
};

namespace detail {

inline void softmax_rows(Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double mx = m.row(r).maxCoeff();
        m.row(r) = (m.row(r).array() - mx).exp().matrix();
        m.row(r) /= m.row(r).sum();
    }
}

// d(softmax)/d(logits) applied to upstream grads, row-wise:
// dS_ij = A_ij * (dA_ij - sum_k A_ik dA_ik)
inline Eigen::MatrixXd softmax_rows_backward(const Eigen::MatrixXd& probs,
                                             const Eigen::MatrixXd& dprobs) {
    const Eigen::VectorXd rowdot = (probs.array() * dprobs.array()).rowwise().sum().matrix();
    return (probs.array() * (dprobs.array().colwise() - rowdot.array())).matrix();
}

}  // namespace detail

// All intermediates needed by the exact backward pass.
struct Forward {
    struct LayerCache {
        Eigen::MatrixXd xin;                // n x d
        Eigen::MatrixXd q, k, v;            // n x d
        std::vector<Eigen::MatrixXd> attn;  // per head, n x n row-softmaxed
        Eigen::MatrixXd concat;             // n x d
        Eigen::MatrixXd attn_out;           // n x d
        Eigen::MatrixXd drop;               // mask, empty when dropout inactive
        Eigen::VectorXd inv_std;            // n
        Eigen::MatrixXd xhat;               // n x d
    };

    std::vector<std::vector<int>> token_ids;
    Eigen::MatrixXd x0;     // n x d, pre-dropout sentence inputs
    Eigen::MatrixXd drop0;  // mask, empty when dropout inactive
    std::vector<LayerCache> layers;
    Eigen::MatrixXd enc;  // n x d

    Eigen::VectorXd sel_logits;  // n
    Eigen::VectorXd sel_raw;     // n, unclamped sigmoid
    Eigen::VectorXd probs;       // n, clamped to [eps, 1-eps]
    Eigen::MatrixXd sec_logits;  // n x S
    Eigen::MatrixXd sec_probs;   // n x S

    Eigen::Index num_sentences() const { return probs.size(); }

    std::vector<int> section_argmax() const {
        std::vector<int> out(static_cast<std::size_t>(sec_probs.rows()));
        for (Eigen::Index r = 0; r < sec_probs.rows(); ++r) {
            Eigen::Index best = 0;
            sec_probs.row(r).maxCoeff(&best);
            out[static_cast<std::size_t>(r)] = static_cast<int>(best);
        }
        return out;
    }
};

struct Model {
    ModelConfig config;
    Parameters params;

    Model(ModelConfig cfg, std::uint64_t seed) : config(cfg), params() {
        config.validate();
        params = Parameters::init(config, seed);
    }

    Model(ModelConfig cfg, Parameters p) : config(cfg), params(std::move(p)) {
        config.validate();
    }

    // Sentence representation: mean of token embeddings plus the sentence
    // position embedding. Sentences with no tokens fall back to position only.
    Eigen::MatrixXd sentence_inputs(const std::vector<std::vector<int>>& sentences) const {
        const auto n = static_cast<Eigen::Index>(sentences.size());
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, config.d_model);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& toks = sentences[static_cast<std::size_t>(i)];
            if (!toks.empty()) {
                for (int t : toks) {
                    if (t < 0 || t >= config.vocab_size) {
                        throw VocabOverflow("token id " + std::to_string(t) +
                                            " outside vocabulary of size " +
                                            std::to_string(config.vocab_size));
                    }
                    x.row(i) += params.tok_embed.row(t);
                }
                x.row(i) /= static_cast<double>(toks.size());
            }
            x.row(i) += params.pos_embed.row(i);
        }
        return x;
    }

    Forward forward(const std::vector<std::vector<int>>& sentences, bool train = false,
                    std::mt19937_64* rng = nullptr) const {
        if (sentences.empty()) throw EmptyDocument("forward pass needs at least one sentence");
        if (sentences.size() > static_cast<std::size_t>(config.max_sentences)) {
            throw TooLarge("got " + std::to_string(sentences.size()) +
                           " sentences, encoder budget is " +
                           std::to_string(config.max_sentences));
        }
        const bool use_dropout = train && config.dropout > 0.0;
        if (use_dropout && rng == nullptr) {
            throw std::invalid_argument("dropout requires an rng in training mode");
        }

        const auto n = static_cast<Eigen::Index>(sentences.size());
        const int heads = config.num_heads;
        const int dh = config.head_dim();
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        auto make_mask = [&](Eigen::Index rows, Eigen::Index cols) {
            Eigen::MatrixXd mask(rows, cols);
            std::bernoulli_distribution keep(1.0 - config.dropout);
            const double inv_keep = 1.0 / (1.0 - config.dropout);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) mask(r, c) = keep(*rng) ? inv_keep : 0.0;
            }
            return mask;
        };

        Forward f;
        f.token_ids = sentences;
        f.x0 = sentence_inputs(sentences);

        Eigen::MatrixXd x = f.x0;
        if (use_dropout) {
            f.drop0 = make_mask(n, config.d_model);
            x = x.cwiseProduct(f.drop0);
        }

        f.layers.resize(static_cast<std::size_t>(config.num_layers));
        for (std::size_t li = 0; li < f.layers.size(); ++li) {
            auto& lc = f.layers[li];
            const auto& lp = params.layers[li];
            lc.xin = x;
            lc.q = (x * lp.wq).rowwise() + lp.bq.row(0);
            lc.k = (x * lp.wk).rowwise() + lp.bk.row(0);
            lc.v = (x * lp.wv).rowwise() + lp.bv.row(0);

            lc.concat.resize(n, config.d_model);
            lc.attn.resize(static_cast<std::size_t>(heads));
            for (int h = 0; h < heads; ++h) {
                auto qh = lc.q.middleCols(h * dh, dh);
                auto kh = lc.k.middleCols(h * dh, dh);
                auto vh = lc.v.middleCols(h * dh, dh);
                Eigen::MatrixXd scores = qh * kh.transpose() * scale;
                detail::softmax_rows(scores);
                lc.attn[static_cast<std::size_t>(h)] = scores;
                lc.concat.middleCols(h * dh, dh) = scores * vh;
            }

            lc.attn_out = (lc.concat * lp.wo).rowwise() + lp.bo.row(0);
            Eigen::MatrixXd dropped = lc.attn_out;
            if (use_dropout) {
                lc.drop = make_mask(n, config.d_model);
                dropped = dropped.cwiseProduct(lc.drop);
            }
            const Eigen::MatrixXd res = lc.xin + dropped;

            // LayerNorm over the feature dimension, biased variance.
            lc.inv_std.resize(n);
            lc.xhat.resize(n, config.d_model);
            for (Eigen::Index r = 0; r < n; ++r) {
                const double mean = res.row(r).mean();
                const double var = (res.row(r).array() - mean).square().mean();
                lc.inv_std(r) = 1.0 / std::sqrt(var + kLayerNormEps);
                lc.xhat.row(r) = ((res.row(r).array() - mean) * lc.inv_std(r)).matrix();
            }
            x = (lc.xhat.array().rowwise() * lp.ln_gain.row(0).array()).matrix().rowwise() +
                lp.ln_bias.row(0);
        }
        f.enc = x;

        f.sel_logits = ((f.enc * params.sel_w).col(0).array() + params.sel_b(0, 0)).matrix();
        f.sel_raw.resize(n);
        f.probs.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = 1.0 / (1.0 + std::exp(-f.sel_logits(i)));
            f.sel_raw(i) = s;
            f.probs(i) = std::min(std::max(s, kProbEps), 1.0 - kProbEps);
        }

        f.sec_logits = (f.enc * params.sec_w.transpose()).rowwise() + params.sec_b.row(0);
        f.sec_probs = f.sec_logits;
        detail::softmax_rows(f.sec_probs);
        return f;
    }
};

// Unnormalized per-document loss sums; the trainer divides by the number of
// sentence predictions in the whole batch.
struct DocLossSums {
    double select_sum = 0.0;
    double section_sum = 0.0;
    int num_sentences = 0;
};

inline void check_labels(const Forward& fwd, std::span<const int> select_labels,
                         std::span<const int> section_labels, int num_sections) {
    const auto n = static_cast<std::size_t>(fwd.num_sentences());
    if (select_labels.size() != n || section_labels.size() != n) {
        throw LengthMismatch("labels must match sentence count " + std::to_string(n));
    }
    for (int y : select_labels) {
        if (y != 0 && y != 1) throw LabelOutOfRange("selection label must be 0 or 1");
    }
    for (int y : section_labels) {
        if (y < 0 || y >= num_sections) {
            throw LabelOutOfRange("section label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(num_sections) + ")");
        }
    }
}

inline DocLossSums loss_sums(const Forward& fwd, std::span<const int> select_labels,
                             std::span<const int> section_labels) {
    check_labels(fwd, select_labels, section_labels,
                 static_cast<int>(fwd.sec_probs.cols()));
    DocLossSums sums;
    sums.num_sentences = static_cast<int>(fwd.num_sentences());
    for (Eigen::Index i = 0; i < fwd.num_sentences(); ++i) {
        const double s = fwd.probs(i);
        const int y = select_labels[static_cast<std::size_t>(i)];
        sums.select_sum -= y == 1 ? std::log(s) : std::log(1.0 - s);
        const int c = section_labels[static_cast<std::size_t>(i)];
        sums.section_sum -= std::log(fwd.sec_probs(i, c));
    }
    return sums;
}

inline double combined_loss(const DocLossSums& sums, int batch_sentences, double alpha) {
    const double inv_n = 1.0 / static_cast<double>(batch_sentences);
    return alpha * sums.select_sum * inv_n + (1.0 - alpha) * sums.section_sum * inv_n;
}

// Accumulates exact gradients of the combined loss into `grads` (which must be
// zero-initialized by the caller for a fresh batch). `inv_n` is 1/N where N is
// the total number of sentence predictions in the batch, so summing calls over
// the batch's documents reproduces the batched loss gradient.
inline void backward(const Model& model, const Forward& fwd, std::span<const int> select_labels,
                     std::span<const int> section_labels, double alpha, double inv_n,
                     Parameters& grads) {
    check_labels(fwd, select_labels, section_labels, model.config.num_sections);
    const auto n = fwd.num_sentences();
    const int heads = model.config.num_heads;
    const int dh = model.config.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    // Selection head. The sigmoid clamp zeroes the gradient outside
    // [eps, 1-eps]; inside, d(loss)/d(logit) collapses to alpha*(p - y)/N.
    Eigen::VectorXd d_sel_logits = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (fwd.sel_raw(i) < kProbEps || fwd.sel_raw(i) > 1.0 - kProbEps) continue;
        const int y = select_labels[static_cast<std::size_t>(i)];
        d_sel_logits(i) = alpha * inv_n * (fwd.probs(i) - static_cast<double>(y));
    }
    grads.sel_w += fwd.enc.transpose() * d_sel_logits;
    grads.sel_b(0, 0) += d_sel_logits.sum();
    Eigen::MatrixXd d_enc = d_sel_logits * model.params.sel_w.transpose();

    // Section head: d(loss)/d(logits) = (1-alpha)*(p - onehot)/N per row.
    Eigen::MatrixXd d_sec_logits = fwd.sec_probs;
    for (Eigen::Index i = 0; i < n; ++i) {
        d_sec_logits(i, section_labels[static_cast<std::size_t>(i)]) -= 1.0;
    }
    d_sec_logits *= (1.0 - alpha) * inv_n;
    grads.sec_w += d_sec_logits.transpose() * fwd.enc;
    grads.sec_b += d_sec_logits.colwise().sum();
    d_enc += d_sec_logits * model.params.sec_w;

    // Encoder layers in reverse.
    Eigen::MatrixXd dx = std::move(d_enc);
    for (int li = model.config.num_layers - 1; li >= 0; --li) {
        const auto& lc = fwd.layers[static_cast<std::size_t>(li)];
        const auto& lp = model.params.layers[static_cast<std::size_t>(li)];
        auto& lg = grads.layers[static_cast<std::size_t>(li)];

        // LayerNorm backward.
        lg.ln_gain += (dx.array() * lc.xhat.array()).colwise().sum().matrix();
        lg.ln_bias += dx.colwise().sum();
        Eigen::MatrixXd dxhat =
            (dx.array().rowwise() * lp.ln_gain.row(0).array()).matrix();
        Eigen::MatrixXd dres(n, model.config.d_model);
        for (Eigen::Index r = 0; r < n; ++r) {
            const double mean_d = dxhat.row(r).mean();
            const double mean_dx = (dxhat.row(r).array() * lc.xhat.row(r).array()).mean();
            dres.row(r) = (lc.inv_std(r) *
                           (dxhat.row(r).array() - mean_d - lc.xhat.row(r).array() * mean_dx))
                              .matrix();
        }

        // Residual: res = xin + dropout(attn_out).
        Eigen::MatrixXd dxin = dres;
        Eigen::MatrixXd d_attn_out =
            lc.drop.size() > 0 ? dres.cwiseProduct(lc.drop).eval() : dres;

        lg.wo += lc.concat.transpose() * d_attn_out;
        lg.bo += d_attn_out.colwise().sum();
        Eigen::MatrixXd d_concat = d_attn_out * lp.wo.transpose();

        Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(n, model.config.d_model);
        Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(n, model.config.d_model);
        Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(n, model.config.d_model);
        for (int h = 0; h < heads; ++h) {
            const auto& a = lc.attn[static_cast<std::size_t>(h)];
            auto qh = lc.q.middleCols(h * dh, dh);
            auto kh = lc.k.middleCols(h * dh, dh);
            auto vh = lc.v.middleCols(h * dh, dh);
            auto dch = d_concat.middleCols(h * dh, dh);

            Eigen::MatrixXd da = dch * vh.transpose();
            dv.middleCols(h * dh, dh) = a.transpose() * dch;
            Eigen::MatrixXd dscores = detail::softmax_rows_backward(a, da);
            dq.middleCols(h * dh, dh) = dscores * kh * scale;
            dk.middleCols(h * dh, dh) = dscores.transpose() * qh * scale;
        }

        lg.wq += lc.xin.transpose() * dq;
        lg.bq += dq.colwise().sum();
        lg.wk += lc.xin.transpose() * dk;
        lg.bk += dk.colwise().sum();
        lg.wv += lc.xin.transpose() * dv;
        lg.bv += dv.colwise().sum();
        dxin += dq * lp.wq.transpose() + dk * lp.wk.transpose() + dv * lp.wv.transpose();
        dx = std::move(dxin);
    }

    // Input dropout, then the embedding means.
    if (fwd.drop0.size() > 0) dx = dx.cwiseProduct(fwd.drop0);
    for (Eigen::Index i = 0; i < n; ++i) {
        grads.pos_embed.row(i) += dx.row(i);
        const auto& toks = fwd.token_ids[static_cast<std::size_t>(i)];
        if (toks.empty()) continue;
        const double inv = 1.0 / static_cast<double>(toks.size());
        for (int t : toks) grads.tok_embed.row(t) += dx.row(i) * inv;
    }
}

// Central-difference gradient check over every parameter element. Returns the
// worst relative error and the tensor it occurred in.
struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst_tensor;
};

inline GradCheckResult grad_check(Model& model, const std::vector<std::vector<int>>& sentences,
                                  std::span<const int> select_labels,
                                  std::span<const int> section_labels, double alpha,
                                  double h = 1e-5) {
    const auto loss_at = [&]() {
        Forward f = model.forward(sentences, false, nullptr);
        return combined_loss(loss_sums(f, select_labels, section_labels),
                             static_cast<int>(sentences.size()), alpha);
    };

    Parameters grads = Parameters::zeros(model.config);
    Forward f = model.forward(sentences, false, nullptr);
    backward(model, f, select_labels, section_labels, alpha,
             1.0 / static_cast<double>(sentences.size()), grads);

    GradCheckResult result;
    auto analytic = grads.tensors();
    auto live = model.params.tensors();
    for (std::size_t t = 0; t < live.size(); ++t) {
        Eigen::MatrixXd& tensor = *live[t].second;
        const Eigen::MatrixXd& grad = *analytic[t].second;
        for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
                const double saved = tensor(r, c);
                tensor(r, c) = saved + h;
                const double up = loss_at();
                tensor(r, c) = saved - h;
                const double down = loss_at();
                tensor(r, c) = saved;
                const double numeric = (up - down) / (2.0 * h);
                const double a = grad(r, c);
                if (std::abs(a - numeric) < 1e-8) continue;  // below fd noise floor
                const double rel =
                    std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8);
                if (rel > result.max_rel_err) {
                    result.max_rel_err = rel;
                    result.worst_tensor = live[t].first;
                }
            }
        }
    }
    return result;
}

}  // namespace extsumm
