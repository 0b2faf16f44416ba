// extsumm: multi-task extractive summarization pipeline for long documents.
// One binary, subcommand per pipeline stage. Exit codes: 0 success, 1 usage or
// validation error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "extsumm/extsumm.hpp"

namespace fs = std::filesystem;
using namespace extsumm;

namespace {

constexpr std::size_t kChunkDocs = 256;  // streaming batch for parallel stages

// flag > env > file > built-in default. Flags parsed by CLI11 win; these
// helpers only fill values the user did not pass, first from "<sub>.<key>"
// then from a bare "<key>" in the config file.
template <typename T, typename Getter>
void cfg_fill(const RunConfig& cfg, CLI::Option* opt, const std::string& sub,
              const std::string& key, T& var, Getter getter) {
    if (opt != nullptr && opt->count() > 0) return;
    if (auto v = (cfg.*getter)(sub + "." + key)) {
        var = *v;
        return;
    }
    if (auto v = (cfg.*getter)(key)) var = *v;
}

void cfg_int(const RunConfig& cfg, CLI::Option* opt, const std::string& sub,
             const std::string& key, int& var) {
    cfg_fill(cfg, opt, sub, key, var, &RunConfig::get_int);
}

void cfg_double(const RunConfig& cfg, CLI::Option* opt, const std::string& sub,
                const std::string& key, double& var) {
    cfg_fill(cfg, opt, sub, key, var, &RunConfig::get_double);
}

void cfg_str(const RunConfig& cfg, CLI::Option* opt, const std::string& sub,
             const std::string& key, std::string& var) {
    cfg_fill(cfg, opt, sub, key, var, &RunConfig::get);
}

std::string resolve_path(const std::string& path, const std::string& data_dir) {
    if (path.empty() || fs::path(path).is_absolute() || fs::exists(path)) return path;
    const fs::path joined = fs::path(data_dir) / path;
    if (fs::exists(joined)) return joined.string();
    return path;
}

bool parse_on_off(const std::string& v) { return v == "on"; }

std::string sanitize_for_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    return out.empty() ? "doc" : out;
}

// Streams a JSONL corpus in chunks: `work(doc) -> output line` runs across
// --jobs threads, lines are written in input order. Returns documents written.
std::size_t stream_transform(const std::string& in_path, const std::string& out_path, int jobs,
                             const std::function<std::string(const Document&)>& work) {
    std::ifstream in(in_path);
    if (!in) throw IoError("cannot open input file: " + in_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + out_path);

    std::size_t written = 0;
    std::vector<Document> chunk;
    chunk.reserve(kChunkDocs);
    const auto flush = [&]() {
        std::vector<std::string> lines(chunk.size());
        parallel_for(chunk.size(), jobs,
                     [&](std::size_t i) { lines[i] = work(chunk[i]); });
        for (const auto& line : lines) out << line << '\n';
        written += chunk.size();
        chunk.clear();
    };
    for_each_jsonl(in, [&](Document&& d, std::size_t) {
        chunk.push_back(std::move(d));
        if (chunk.size() >= kChunkDocs) flush();
    });
    flush();
    if (!out) throw IoError("failed writing output file: " + out_path);
    return written;
}

// ---- subcommand argument bundles ----

struct IngestArgs {
    std::string input, output, dataset, section_keywords;
    int min_summary_tokens = -1;  // -1: take dataset preset (or keep everything)
    CLI::Option *opt_min = nullptr, *opt_dataset = nullptr;
};

struct StatsArgs {
    std::string input;
};

struct LabelArgs {
    std::string input, output, dataset;
    int k = -1;
    std::string gain_metric = "rg12";
    std::string diversity = "on";
    int jobs = 1;
    CLI::Option *opt_k = nullptr, *opt_metric = nullptr, *opt_diversity = nullptr,
                *opt_jobs = nullptr, *opt_dataset = nullptr;
};

struct TrainArgs {
    std::string train_path, val_path, out_dir = "run", dataset;
    double alpha = 0.5, lr = 2e-3, dropout = 0.1, grad_clip = 1.0;
    int top_k = -1, batch_docs = 8, max_steps = 2000, val_interval = 200;
    int d_model = 64, num_heads = 4, num_layers = 2, max_sentences = 128;
    int vocab_size = 20000;
    std::uint64_t seed = 42;
    CLI::Option *opt_alpha = nullptr, *opt_lr = nullptr, *opt_dropout = nullptr,
                *opt_clip = nullptr, *opt_top_k = nullptr, *opt_batch = nullptr,
                *opt_steps = nullptr, *opt_interval = nullptr, *opt_d = nullptr,
                *opt_heads = nullptr, *opt_layers = nullptr, *opt_max_sent = nullptr,
                *opt_vocab = nullptr, *opt_seed = nullptr, *opt_dataset = nullptr;
};

struct PredictArgs {
    std::string model_path, input, output, dataset;
    int top_k = -1;
    std::string blocking = "off";
    double threshold = -1.0;  // <0: top-k mode
    int jobs = 1;
    CLI::Option *opt_top_k = nullptr, *opt_blocking = nullptr, *opt_threshold = nullptr,
                *opt_jobs = nullptr, *opt_dataset = nullptr;
};

struct EvaluateArgs {
    std::string pred, refs, out;
    int jobs = 1;
    CLI::Option* opt_jobs = nullptr;
};

struct AnalyzeArgs {
    std::string base, model, refs, labels, out_dir = "analysis";
    int bins = 5;
    double heatmap_threshold = 0.15;
    std::vector<std::string> heatmap_docs;
    CLI::Option *opt_bins = nullptr, *opt_threshold = nullptr;
};

struct PlotArgs {
    std::string kind, input, output, title;
};

struct GenArgs {
    std::string output;
    int num_docs = 100, sentences_per_doc = 12, num_sections = kNumSections;
    std::uint64_t seed = 7;
};

// ---- subcommand implementations ----

int run_ingest(const IngestArgs& a, const RunConfig& cfg, const std::string& data_dir) {
    IngestArgs args = a;
    cfg_str(cfg, args.opt_dataset, "ingest", "dataset", args.dataset);
    cfg_int(cfg, args.opt_min, "ingest", "min_summary_tokens", args.min_summary_tokens);
    if (!args.dataset.empty() && !dataset_preset(args.dataset)) {
        throw std::invalid_argument("unknown dataset '" + args.dataset + "'");
    }
    int min_tokens = args.min_summary_tokens;
    if (min_tokens < 0) {
        const auto preset = args.dataset.empty() ? std::nullopt : dataset_preset(args.dataset);
        min_tokens = preset ? preset->min_summary_tokens : 0;
    }
    const SectionKeywordMap keywords = args.section_keywords.empty()
                                           ? default_section_keywords()
                                           : load_section_keywords(resolve_path(
                                                 args.section_keywords, data_dir));

    std::ifstream in(resolve_path(args.input, data_dir));
    if (!in) throw IoError("cannot open input file: " + args.input);
    std::ofstream out(args.output, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + args.output);

    std::size_t seen = 0, kept = 0;
    for_each_jsonl(
        in,
        [&](Document&& doc, std::size_t) {
            ++seen;
            if (doc.summary_tokens.size() < static_cast<std::size_t>(min_tokens)) return;
            if (doc.dataset.empty()) doc.dataset = args.dataset;
            out << serialize_document(doc) << '\n';
            ++kept;
        },
        keywords);
    if (!out) throw IoError("failed writing output file: " + args.output);
    std::printf("ingested %zu documents, kept %zu (min summary tokens: %d)\n", seen, kept,
                min_tokens);
    return 0;
}

int run_stats(const StatsArgs& args, const std::string& data_dir) {
    std::ifstream in(resolve_path(args.input, data_dir));
    if (!in) throw IoError("cannot open input file: " + args.input);
    std::size_t docs = 0, doc_tokens = 0, summary_tokens = 0;
    for_each_jsonl(in, [&](Document&& d, std::size_t) {
        ++docs;
        doc_tokens += d.num_doc_tokens();
        summary_tokens += d.summary_tokens.size();
    });
    const double den = docs > 0 ? static_cast<double>(docs) : 1.0;
    std::printf("documents: %zu\n", docs);
    std::printf("avg_doc_tokens: %.6f\n", static_cast<double>(doc_tokens) / den);
    std::printf("avg_summary_tokens: %.6f\n", static_cast<double>(summary_tokens) / den);
    return 0;
}

int run_label(const LabelArgs& a, const RunConfig& cfg, const std::string& data_dir) {
    LabelArgs args = a;
    cfg_str(cfg, args.opt_dataset, "label-oracle", "dataset", args.dataset);
    cfg_int(cfg, args.opt_k, "label-oracle", "k", args.k);
    cfg_str(cfg, args.opt_metric, "label-oracle", "gain_metric", args.gain_metric);
    cfg_str(cfg, args.opt_diversity, "label-oracle", "diversity", args.diversity);
    cfg_int(cfg, args.opt_jobs, "label-oracle", "jobs", args.jobs);
    if (!args.dataset.empty() && !dataset_preset(args.dataset)) {
        throw std::invalid_argument("unknown dataset '" + args.dataset + "'");
    }

    OracleConfig oracle_cfg;
    if (args.k >= 0) {
        oracle_cfg.k = args.k;
    } else {
        const auto preset = args.dataset.empty() ? std::nullopt : dataset_preset(args.dataset);
        oracle_cfg.k = preset ? preset->oracle_k : 15;
    }
    oracle_cfg.gain_metric =
        args.gain_metric == "rg12l" ? GainMetric::MeanRg12L : GainMetric::MeanRg12;
    oracle_cfg.diversity = parse_on_off(args.diversity);
    oracle_cfg.validate();

    const std::size_t docs =
        stream_transform(resolve_path(args.input, data_dir), args.output, args.jobs,
                         [&](const Document& doc) {
                             Document labeled = doc;
                             apply_oracle_labels(labeled, greedy_oracle(doc, oracle_cfg));
                             return serialize_document(labeled);
                         });
    std::printf("labeled %zu documents (k=%d, metric=%s, diversity=%s)\n", docs, oracle_cfg.k,
                args.gain_metric.c_str(), args.diversity.c_str());
    return 0;
}

int run_train(const TrainArgs& a, const RunConfig& cfg, const std::string& data_dir) {
    TrainArgs args = a;
    cfg_str(cfg, args.opt_dataset, "train", "dataset", args.dataset);
    cfg_double(cfg, args.opt_alpha, "train", "alpha", args.alpha);
    cfg_double(cfg, args.opt_lr, "train", "lr", args.lr);
    cfg_double(cfg, args.opt_dropout, "train", "dropout", args.dropout);
    cfg_double(cfg, args.opt_clip, "train", "grad_clip", args.grad_clip);
    cfg_int(cfg, args.opt_top_k, "train", "top_k", args.top_k);
    cfg_int(cfg, args.opt_batch, "train", "batch_docs", args.batch_docs);
    cfg_int(cfg, args.opt_steps, "train", "max_steps", args.max_steps);
    cfg_int(cfg, args.opt_interval, "train", "val_interval", args.val_interval);
    cfg_int(cfg, args.opt_d, "train", "d_model", args.d_model);
    cfg_int(cfg, args.opt_heads, "train", "num_heads", args.num_heads);
    cfg_int(cfg, args.opt_layers, "train", "num_layers", args.num_layers);
    cfg_int(cfg, args.opt_max_sent, "train", "max_sentences", args.max_sentences);
    cfg_int(cfg, args.opt_vocab, "train", "vocab_size", args.vocab_size);
    if (args.opt_seed->count() == 0) {
        if (auto v = cfg.get_int("train.seed")) args.seed = static_cast<std::uint64_t>(*v);
        else if (auto g = cfg.get_int("seed")) args.seed = static_cast<std::uint64_t>(*g);
    }
    if (args.top_k < 0) {
        const auto preset = args.dataset.empty() ? std::nullopt : dataset_preset(args.dataset);
        args.top_k = preset ? preset->top_k : 15;
    }

    const Corpus train_corpus = read_jsonl(resolve_path(args.train_path, data_dir));
    const Corpus val_corpus = read_jsonl(resolve_path(args.val_path, data_dir));

    const Vocabulary vocab =
        Vocabulary::build(train_corpus, static_cast<std::size_t>(args.vocab_size));

    ModelConfig model_cfg;
    model_cfg.vocab_size = static_cast<int>(vocab.size());
    model_cfg.d_model = args.d_model;
    model_cfg.num_heads = args.num_heads;
    model_cfg.num_layers = args.num_layers;
    model_cfg.max_sentences = args.max_sentences;
    model_cfg.dropout = args.dropout;
    model_cfg.alpha = args.alpha;
    model_cfg.validate();

    TrainConfig train_cfg;
    train_cfg.lr = args.lr;
    train_cfg.batch_docs = args.batch_docs;
    train_cfg.max_steps = args.max_steps;
    train_cfg.val_interval = args.val_interval;
    train_cfg.grad_clip_norm = args.grad_clip;
    train_cfg.seed = args.seed;
    train_cfg.val_top_k = args.top_k;
    train_cfg.out_dir = args.out_dir;
    train_cfg.validate();

    const TrainResult result = train(train_corpus, val_corpus, model_cfg, train_cfg, vocab);
    std::printf("checkpoints: %zu (metrics: %s)\n", result.checkpoints.size(),
                result.metrics_path.c_str());
    std::printf("best step: %lld  val_metric: %.6f\n",
                static_cast<long long>(result.best.step), result.best.val_metric);
    std::printf("best model: %s\n", result.best_path.c_str());
    return 0;
}

int run_predict(const PredictArgs& a, const RunConfig& cfg, const std::string& data_dir) {
    PredictArgs args = a;
    cfg_str(cfg, args.opt_dataset, "predict", "dataset", args.dataset);
    cfg_int(cfg, args.opt_top_k, "predict", "top_k", args.top_k);
    cfg_str(cfg, args.opt_blocking, "predict", "trigram_blocking", args.blocking);
    cfg_double(cfg, args.opt_threshold, "predict", "threshold", args.threshold);
    cfg_int(cfg, args.opt_jobs, "predict", "jobs", args.jobs);
    if (args.top_k < 0) {
        const auto preset = args.dataset.empty() ? std::nullopt : dataset_preset(args.dataset);
        args.top_k = preset ? preset->top_k : 15;
    }
    const bool blocking = parse_on_off(args.blocking);
    const bool threshold_mode = args.opt_threshold->count() > 0 || args.threshold >= 0.0;

    const Checkpoint ckpt = load_checkpoint(resolve_path(args.model_path, data_dir));
    const Model model = ckpt.make_model();

    stream_transform(resolve_path(args.input, data_dir), args.output, args.jobs,
                     [&](const Document& doc) {
                         const ExtractionResult res =
                             threshold_mode
                                 ? extract_summary_threshold(doc, model, ckpt.vocab,
                                                             args.threshold)
                                 : extract_summary(doc, model, ckpt.vocab, args.top_k,
                                                   blocking);
                         return to_json(to_pred_record(res)).dump();
                     });
    std::printf("predictions written to %s (top_k=%d, trigram_blocking=%s)\n",
                args.output.c_str(), args.top_k, blocking ? "on" : "off");
    return 0;
}

int run_evaluate(const EvaluateArgs& a, const RunConfig& cfg, const std::string& data_dir) {
    EvaluateArgs args = a;
    cfg_int(cfg, args.opt_jobs, "evaluate", "jobs", args.jobs);

    // Reference summaries by id; sentences are not needed for scoring.
    std::map<std::string, std::vector<std::string>> refs;
    {
        std::ifstream in(resolve_path(args.refs, data_dir));
        if (!in) throw IoError("cannot open refs file: " + args.refs);
        for_each_jsonl(in, [&](Document&& d, std::size_t) {
            refs[d.id] = std::move(d.summary_tokens);
        });
    }

    const std::vector<PredRecord> preds = read_predictions(resolve_path(args.pred, data_dir));
    std::vector<RougeSuite> suites(preds.size());
    parallel_for(preds.size(), args.jobs, [&](std::size_t i) {
        const auto it = refs.find(preds[i].id);
        if (it == refs.end()) {
            throw DocMismatch("prediction for unknown document '" + preds[i].id + "'");
        }
        suites[i] = rouge_suite(tokenize(preds[i].summary), it->second);
    });

    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + args.out);
    out << "doc_id,rg1_p,rg1_r,rg1_f,rg2_p,rg2_r,rg2_f,rgl_p,rgl_r,rgl_f\n";
    double m1 = 0.0, m2 = 0.0, ml = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto& s = suites[i];
        out << csv::format_row({preds[i].id, csv::fmt(s.rg1.precision), csv::fmt(s.rg1.recall),
                                csv::fmt(s.rg1.f1), csv::fmt(s.rg2.precision),
                                csv::fmt(s.rg2.recall), csv::fmt(s.rg2.f1),
                                csv::fmt(s.rgl.precision), csv::fmt(s.rgl.recall),
                                csv::fmt(s.rgl.f1)});
        m1 += s.rg1.f1;
        m2 += s.rg2.f1;
        ml += s.rgl.f1;
    }
    if (!out) throw IoError("failed writing output file: " + args.out);
    const double den = preds.empty() ? 1.0 : static_cast<double>(preds.size());
    std::printf("documents: %zu\n", preds.size());
    std::printf("mean RG-1 F1: %.4f  RG-2 F1: %.4f  RG-L F1: %.4f\n", m1 / den, m2 / den,
                ml / den);
    return 0;
}

int run_analyze(const AnalyzeArgs& a, const RunConfig& cfg, const std::string& data_dir) {
    AnalyzeArgs args = a;
    cfg_int(cfg, args.opt_bins, "analyze", "bins", args.bins);
    cfg_double(cfg, args.opt_threshold, "analyze", "heatmap_threshold",
               args.heatmap_threshold);
    if (args.labels.empty()) args.labels = args.refs;

    const Corpus labeled = read_jsonl(resolve_path(args.labels, data_dir));
    std::map<std::string, PredRecord> base_by_id, model_by_id;
    for (auto& rec : read_predictions(resolve_path(args.base, data_dir))) {
        base_by_id[rec.id] = std::move(rec);
    }
    for (auto& rec : read_predictions(resolve_path(args.model, data_dir))) {
        model_by_id[rec.id] = std::move(rec);
    }

    std::vector<DocComparison> comparisons;
    comparisons.reserve(labeled.size());
    for (const auto& doc : labeled) {
        const auto bit = base_by_id.find(doc.id);
        const auto mit = model_by_id.find(doc.id);
        if (bit == base_by_id.end() || mit == model_by_id.end()) {
            throw DocMismatch("missing prediction for document '" + doc.id + "'");
        }
        comparisons.push_back(compare(doc, bit->second, mit->second));
    }

    fs::create_directories(args.out_dir);
    write_comparisons_csv((fs::path(args.out_dir) / "comparisons.csv").string(), comparisons);

    const BinSummary bins = bin_summary(comparisons);
    write_bins_csv((fs::path(args.out_dir) / "bins.csv").string(), bins);

    write_length_bins_csv((fs::path(args.out_dir) / "length_bins.csv").string(),
                          length_bins(comparisons, args.bins));

    std::vector<std::string> heatmap_ids = args.heatmap_docs;
    if (heatmap_ids.empty() && !labeled.empty()) heatmap_ids.push_back(labeled.front().id);
    for (const auto& id : heatmap_ids) {
        const auto doc_it =
            std::find_if(labeled.begin(), labeled.end(),
                         [&](const Document& d) { return d.id == id; });
        const auto mit = model_by_id.find(id);
        if (doc_it == labeled.end() || mit == model_by_id.end()) {
            throw DocMismatch("heatmap document '" + id + "' not found in inputs");
        }
        const auto records =
            heatmap_export(*doc_it, mit->second.probs, mit->second.selected,
                           doc_it->oracle_label_vector(), args.heatmap_threshold);
        write_heatmap_csv((fs::path(args.out_dir) /
                           ("heatmap_" + sanitize_for_filename(id) + ".csv"))
                              .string(),
                          records);
    }

    for (const BinRow* row : bins.rows()) {
        std::printf("%-9s count=%-5d mean_rg_diff=%+.4f mean_f_diff=%+.4f\n", row->name.c_str(),
                    row->count, row->mean_rg_diff, row->mean_f_diff);
    }
    std::printf("analysis written to %s\n", args.out_dir.c_str());
    return 0;
}

int run_plot(const PlotArgs& args, const std::string& data_dir) {
    const auto rows = csv::read_file(resolve_path(args.input, data_dir));
    if (rows.size() < 2) throw MalformedRecord("'" + args.input + "' has no data rows");
    std::string svg;

    if (args.kind == "length-bins") {
        std::vector<std::string> groups;
        svg::BarSeries series[6] = {{"base RG-1", "#bdbdbd"}, {"base RG-2", "#8d8d8d"},
                                    {"base RG-L", "#5e5e5e"}, {"model RG-1", "#90caf9"},
                                    {"model RG-2", "#42a5f5"}, {"model RG-L", "#1565c0"}};
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 10) throw MalformedRecord("length_bins row has too few columns");
            groups.push_back(r[2] + "-" + r[3] + " tok");
            for (int s = 0; s < 6; ++s) {
                series[s].values.push_back(std::stod(r[static_cast<std::size_t>(4 + s)]));
            }
        }
        svg = svg::render_grouped_bars(groups,
                                       {series[0], series[1], series[2], series[3], series[4],
                                        series[5]},
                                       args.title.empty() ? "ROUGE F1 by summary length bin"
                                                          : args.title,
                                       "mean F1");
    } else if (args.kind == "bins") {
        std::vector<std::string> groups;
        svg::BarSeries counts{"documents", "#42a5f5"};
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 2) throw MalformedRecord("bins row has too few columns");
            if (r[0] == "TOTAL") continue;
            groups.push_back(r[0]);
            counts.values.push_back(std::stod(r[1]));
        }
        svg = svg::render_grouped_bars(
            groups, {counts},
            args.title.empty() ? "Improved / Tied / Declined" : args.title, "documents");
    } else if (args.kind == "heatmap") {
        std::vector<svg::HeatCell> cells;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 5) throw MalformedRecord("heatmap row has too few columns");
            svg::HeatCell cell;
            cell.position = std::stoi(r[0]);
            cell.section = r[1];
            cell.prob = std::stod(r[2]);
            cell.is_selected = r[3] == "1";
            cell.is_oracle = r[4] == "1";
            cells.push_back(cell);
        }
        svg = svg::render_heatmap(cells, args.title.empty() ? "extraction probability"
                                                            : args.title);
    } else {
        throw std::invalid_argument("unknown plot kind '" + args.kind + "'");
    }

    std::ofstream out(args.output, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + args.output);
    out << svg;
    if (!out) throw IoError("failed writing output file: " + args.output);
    std::printf("plot written to %s\n", args.output.c_str());
    return 0;
}

int run_gen(const GenArgs& args) {
    SyntheticConfig cfg;
    cfg.num_docs = args.num_docs;
    cfg.sentences_per_doc = args.sentences_per_doc;
    cfg.num_sections = args.num_sections;
    cfg.seed = args.seed;
    const Corpus corpus = gen_synthetic(cfg);
    write_jsonl(corpus, args.output);
    std::printf("wrote %zu synthetic documents to %s (seed %llu)\n", corpus.size(),
                args.output.c_str(), static_cast<unsigned long long>(args.seed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-task extractive summarization for long documents"};
    app.require_subcommand(1);

    std::string config_path = "extsumm.toml";
    app.add_option("--config", config_path, "key = value config file")
        ->capture_default_str();
    std::string data_dir_flag;
    CLI::Option* opt_data_dir =
        app.add_option("--data-dir", data_dir_flag,
                       "root for relative data paths (env EXTSUMM_DATA_DIR)");

    const auto dataset_values = CLI::IsMember({"longsumm", "arxiv-long", "pubmed-long",
                                               "custom"});
    const auto on_off = CLI::IsMember({"on", "off"});

    IngestArgs ingest;
    auto* sub_ingest =
        app.add_subcommand("ingest", "tokenize, canonicalize sections, filter, retag");
    sub_ingest->add_option("--input", ingest.input, "raw corpus JSONL")->required();
    sub_ingest->add_option("--output", ingest.output, "processed JSONL")->required();
    ingest.opt_dataset =
        sub_ingest->add_option("--dataset", ingest.dataset, "dataset preset tag")
            ->check(dataset_values);
    ingest.opt_min = sub_ingest->add_option("--min-summary-tokens", ingest.min_summary_tokens,
                                            "keep docs with at least this many summary tokens");
    sub_ingest->add_option("--section-keywords", ingest.section_keywords,
                           "JSON file overriding section keyword lists");

    StatsArgs stats;
    auto* sub_stats = app.add_subcommand("stats", "corpus statistics");
    sub_stats->add_option("--input", stats.input, "corpus JSONL")->required();

    LabelArgs label;
    auto* sub_label = app.add_subcommand("label-oracle", "greedy oracle labels");
    sub_label->add_option("--input", label.input, "corpus JSONL")->required();
    sub_label->add_option("--output", label.output, "labeled JSONL")->required();
    label.opt_k = sub_label->add_option("--k", label.k, "max sentences selected per document");
    label.opt_metric = sub_label
                           ->add_option("--gain-metric", label.gain_metric,
                                        "oracle gain metric")
                           ->check(CLI::IsMember({"rg12", "rg12l"}));
    label.opt_diversity = sub_label
                              ->add_option("--diversity", label.diversity,
                                           "restrict each pick to least-covered sections")
                              ->check(on_off);
    label.opt_dataset = sub_label->add_option("--dataset", label.dataset, "dataset preset tag")
                            ->check(dataset_values);
    label.opt_jobs = sub_label->add_option("--jobs", label.jobs, "worker threads");

    TrainArgs train_args;
    auto* sub_train = app.add_subcommand("train", "train the selection + section model");
    sub_train->add_option("--train", train_args.train_path, "labeled training JSONL")
        ->required();
    sub_train->add_option("--val", train_args.val_path, "validation JSONL")->required();
    sub_train->add_option("--out", train_args.out_dir, "output directory")
        ->capture_default_str();
    train_args.opt_dataset =
        sub_train->add_option("--dataset", train_args.dataset, "dataset preset tag")
            ->check(dataset_values);
    train_args.opt_alpha =
        sub_train->add_option("--alpha", train_args.alpha, "selection-loss weight in [0,1]");
    train_args.opt_top_k =
        sub_train->add_option("--top-k", train_args.top_k, "validation extraction budget");
    train_args.opt_seed = sub_train->add_option("--seed", train_args.seed, "run seed");
    train_args.opt_lr = sub_train->add_option("--lr", train_args.lr, "learning rate");
    train_args.opt_batch =
        sub_train->add_option("--batch-docs", train_args.batch_docs, "documents per step");
    train_args.opt_steps =
        sub_train->add_option("--max-steps", train_args.max_steps, "optimizer steps");
    train_args.opt_interval = sub_train->add_option(
        "--val-interval", train_args.val_interval, "steps between validations");
    train_args.opt_clip =
        sub_train->add_option("--grad-clip", train_args.grad_clip, "global grad-norm clip");
    train_args.opt_d = sub_train->add_option("--d-model", train_args.d_model, "model width");
    train_args.opt_heads =
        sub_train->add_option("--num-heads", train_args.num_heads, "attention heads");
    train_args.opt_layers =
        sub_train->add_option("--num-layers", train_args.num_layers, "context layers");
    train_args.opt_max_sent = sub_train->add_option(
        "--max-sentences", train_args.max_sentences, "encoder sentence budget");
    train_args.opt_vocab =
        sub_train->add_option("--vocab-size", train_args.vocab_size, "vocabulary cap");
    train_args.opt_dropout =
        sub_train->add_option("--dropout", train_args.dropout, "dropout rate");

    PredictArgs predict;
    auto* sub_predict = app.add_subcommand("predict", "extract summaries with a checkpoint");
    sub_predict->add_option("--model", predict.model_path, "checkpoint JSON")->required();
    sub_predict->add_option("--input", predict.input, "corpus JSONL")->required();
    sub_predict->add_option("--out", predict.output, "predictions JSONL")->required();
    predict.opt_dataset =
        sub_predict->add_option("--dataset", predict.dataset, "dataset preset tag")
            ->check(dataset_values);
    predict.opt_top_k =
        sub_predict->add_option("--top-k", predict.top_k, "extraction budget");
    predict.opt_blocking = sub_predict
                               ->add_option("--trigram-blocking", predict.blocking,
                                            "skip candidates repeating a selected trigram")
                               ->check(on_off);
    predict.opt_threshold = sub_predict->add_option(
        "--threshold", predict.threshold, "select by probability threshold instead of top-k");
    predict.opt_jobs = sub_predict->add_option("--jobs", predict.jobs, "worker threads");

    EvaluateArgs evaluate;
    auto* sub_eval = app.add_subcommand("evaluate", "ROUGE-1/2/L of predictions");
    sub_eval->add_option("--pred", evaluate.pred, "predictions JSONL")->required();
    sub_eval->add_option("--refs", evaluate.refs, "reference corpus JSONL")->required();
    sub_eval->add_option("--out", evaluate.out, "per-document CSV")->required();
    evaluate.opt_jobs = sub_eval->add_option("--jobs", evaluate.jobs, "worker threads");

    AnalyzeArgs analyze;
    auto* sub_analyze = app.add_subcommand("analyze", "model-vs-base comparison suite");
    sub_analyze->add_option("--base", analyze.base, "baseline predictions JSONL")->required();
    sub_analyze->add_option("--model", analyze.model, "model predictions JSONL")->required();
    sub_analyze->add_option("--refs", analyze.refs, "reference corpus JSONL")->required();
    sub_analyze->add_option("--labels", analyze.labels,
                            "oracle-labeled corpus JSONL (default: --refs)");
    sub_analyze->add_option("--out", analyze.out_dir, "output directory")
        ->capture_default_str();
    analyze.opt_bins =
        sub_analyze->add_option("--bins", analyze.bins, "equal-count length bins");
    analyze.opt_threshold = sub_analyze->add_option(
        "--heatmap-threshold", analyze.heatmap_threshold, "minimum probability exported");
    sub_analyze->add_option("--heatmap-doc", analyze.heatmap_docs,
                            "document id(s) to export heatmaps for (default: first)");

    PlotArgs plot;
    auto* sub_plot = app.add_subcommand("plot", "render analysis CSVs as SVG");
    sub_plot->add_option("--kind", plot.kind, "length-bins | bins | heatmap")
        ->required()
        ->check(CLI::IsMember({"length-bins", "bins", "heatmap"}));
    sub_plot->add_option("--input", plot.input, "CSV produced by analyze")->required();
    sub_plot->add_option("--out", plot.output, "SVG output path")->required();
    sub_plot->add_option("--title", plot.title, "chart title");

    GenArgs gen;
    auto* sub_gen = app.add_subcommand("gen-synthetic", "deterministic test corpus");
    sub_gen->add_option("--out", gen.output, "output JSONL")->required();
    sub_gen->add_option("--num-docs", gen.num_docs, "documents")->capture_default_str();
    sub_gen->add_option("--sentences-per-doc", gen.sentences_per_doc, "sentences per document")
        ->capture_default_str();
    sub_gen->add_option("--num-sections", gen.num_sections, "section categories in use")
        ->capture_default_str();
    sub_gen->add_option("--seed", gen.seed, "generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const RunConfig cfg = RunConfig::load(config_path);
        std::optional<std::string> ddflag;
        if (opt_data_dir->count() > 0) ddflag = data_dir_flag;
        const std::string data_dir = resolve_data_dir(ddflag, cfg);

        if (sub_ingest->parsed()) return run_ingest(ingest, cfg, data_dir);
        if (sub_stats->parsed()) return run_stats(stats, data_dir);
        if (sub_label->parsed()) return run_label(label, cfg, data_dir);
        if (sub_train->parsed()) return run_train(train_args, cfg, data_dir);
        if (sub_predict->parsed()) return run_predict(predict, cfg, data_dir);
        if (sub_eval->parsed()) return run_evaluate(evaluate, cfg, data_dir);
        if (sub_analyze->parsed()) return run_analyze(analyze, cfg, data_dir);
        if (sub_plot->parsed()) return run_plot(plot, data_dir);
        if (sub_gen->parsed()) return run_gen(gen);
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
