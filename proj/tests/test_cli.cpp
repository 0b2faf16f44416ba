// End-to-end checks of the command line binary. Each test shells out to the
// real executable (path injected via EXTSUMM_CLI_PATH) and inspects exit
// codes, stdout/stderr text, and the files it writes.
#include "catch2/catch_amalgamated.hpp"

#include <sys/wait.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "extsumm/extsumm.hpp"
#include "support/temp_dir.hpp"

namespace fs = std::filesystem;
using namespace extsumm;

namespace {

struct CliResult {
    int code = -1;
    std::string output;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the binary with stdout+stderr captured. `env_prefix` lets tests set
// EXTSUMM_DATA_DIR; by default the variable is scrubbed so ambient state
// cannot leak in.
CliResult run_cli(const std::string& args, const testsupport::TempDir& dir,
                  const std::string& env_prefix = "env -u EXTSUMM_DATA_DIR") {
    static std::atomic<int> counter{0};
    const std::string capture = dir.file("cli-capture-" + std::to_string(counter++) + ".txt");
    const std::string cmd = env_prefix + " \"" + std::string(EXTSUMM_CLI_PATH) + "\" " + args +
                            " > \"" + capture + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    CliResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.output = slurp(capture);
    return res;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    for (const auto& line : lines) out << line << '\n';
    REQUIRE(out.good());
}

Corpus small_synthetic(int num_docs, int sentences_per_doc, std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.num_docs = num_docs;
    cfg.sentences_per_doc = sentences_per_doc;
    cfg.seed = seed;
    return gen_synthetic(cfg);
}

const std::vector<std::string> kRawCorpus = {
    R"({"id":"a","sentences":[{"text":"Alpha beta gamma.","section":"1 Introduction"},{"text":"Delta epsilon.","section":"3 Methods"}],"summary":"alpha beta gamma delta epsilon"})",
    R"({"id":"b","sentences":[{"text":"Zeta eta.","section":"Conclusion"}],"summary":"zeta eta"})",
};

}  // namespace

TEST_CASE("usage errors exit 1 and help exits 0") {
    testsupport::TempDir dir("cli-usage");

    CHECK(run_cli("", dir).code == 1);
    CHECK(run_cli("frobnicate", dir).code == 1);

    const CliResult help = run_cli("--help", dir);
    CHECK(help.code == 0);
    CHECK(contains(help.output, "ingest"));
    CHECK(contains(help.output, "gen-synthetic"));
    CHECK(run_cli("stats --help", dir).code == 0);

    // Validation failures map to exit 1 as well.
    CHECK(run_cli("label-oracle --input x.jsonl --output y.jsonl --k 0", dir).code == 1);
    CHECK(run_cli("plot --kind scatter --input a.csv --out b.svg", dir).code == 1);
    CHECK(run_cli("gen-synthetic --out " + dir.file("g.jsonl") + " --num-docs 0", dir).code ==
          1);
    CHECK(run_cli("predict --model m.json --input i.jsonl --out o.jsonl --trigram-blocking "
                  "sometimes",
                  dir)
              .code == 1);
}

TEST_CASE("data errors exit 2") {
    testsupport::TempDir dir("cli-data-errors");

    const CliResult missing = run_cli("stats --input " + dir.file("nope.jsonl"), dir);
    CHECK(missing.code == 2);
    CHECK(contains(missing.output, "error:"));

    const std::string malformed = dir.file("malformed.jsonl");
    write_lines(malformed, {R"({"id":"x"})"});
    const CliResult bad = run_cli("stats --input " + malformed, dir);
    CHECK(bad.code == 2);
    CHECK(contains(bad.output, "missing field"));

    // A prediction that references an unknown document id.
    const std::string refs = dir.file("refs.jsonl");
    write_lines(refs, kRawCorpus);
    const std::string preds = dir.file("preds.jsonl");
    PredRecord stray;
    stray.id = "zzz";
    stray.summary = "alpha";
    write_predictions(preds, {stray});
    const CliResult mismatch = run_cli(
        "evaluate --pred " + preds + " --refs " + refs + " --out " + dir.file("eval.csv"), dir);
    CHECK(mismatch.code == 2);
    CHECK(contains(mismatch.output, "zzz"));
}

TEST_CASE("gen-synthetic is deterministic and pre-labeled") {
    testsupport::TempDir dir("cli-gen");
    const std::string args = " --num-docs 6 --sentences-per-doc 8 --seed 5";

    const CliResult first = run_cli("gen-synthetic --out " + dir.file("a.jsonl") + args, dir);
    REQUIRE(first.code == 0);
    CHECK(contains(first.output, "wrote 6 synthetic documents"));
    REQUIRE(run_cli("gen-synthetic --out " + dir.file("b.jsonl") + args, dir).code == 0);
    REQUIRE(run_cli("gen-synthetic --out " + dir.file("c.jsonl") +
                        " --num-docs 6 --sentences-per-doc 8 --seed 6",
                    dir)
                .code == 0);

    CHECK(slurp(dir.file("a.jsonl")) == slurp(dir.file("b.jsonl")));
    CHECK(slurp(dir.file("a.jsonl")) != slurp(dir.file("c.jsonl")));

    const Corpus docs = read_jsonl(dir.file("a.jsonl"));
    REQUIRE(docs.size() == 6);
    for (const auto& doc : docs) {
        CHECK(doc.dataset == "synthetic");
        CHECK(doc.has_oracle_labels());
    }
}

TEST_CASE("stats reports counts and handles an empty corpus") {
    testsupport::TempDir dir("cli-stats");

    const std::string empty = dir.file("empty.jsonl");
    write_lines(empty, {});
    const CliResult none = run_cli("stats --input " + empty, dir);
    CHECK(none.code == 0);
    CHECK(contains(none.output, "documents: 0"));
    CHECK(contains(none.output, "avg_doc_tokens: 0.000000"));
    CHECK(contains(none.output, "avg_summary_tokens: 0.000000"));

    const Corpus docs = small_synthetic(6, 8, 5);
    const std::string corpus = dir.file("syn.jsonl");
    write_jsonl(docs, corpus);

    std::size_t doc_tokens = 0, summary_tokens = 0;
    for (const auto& doc : docs) {
        doc_tokens += doc.num_doc_tokens();
        summary_tokens += doc.summary_tokens.size();
    }
    const CliResult out = run_cli("stats --input " + corpus, dir);
    CHECK(out.code == 0);
    CHECK(contains(out.output, "documents: 6"));
    CHECK(contains(out.output,
                   "avg_doc_tokens: " + csv::fmt(static_cast<double>(doc_tokens) / 6.0)));
    CHECK(contains(out.output, "avg_summary_tokens: " +
                                   csv::fmt(static_cast<double>(summary_tokens) / 6.0)));
}

TEST_CASE("ingest filters short summaries and tags the dataset") {
    testsupport::TempDir dir("cli-ingest");
    const std::string raw = dir.file("raw.jsonl");
    write_lines(raw, kRawCorpus);

    const std::string processed = dir.file("processed.jsonl");
    const CliResult res = run_cli("ingest --input " + raw + " --output " + processed +
                                      " --min-summary-tokens 3 --dataset custom",
                                  dir);
    REQUIRE(res.code == 0);
    CHECK(contains(res.output, "ingested 2 documents, kept 1 (min summary tokens: 3)"));

    const Corpus kept = read_jsonl(processed);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].id == "a");
    CHECK(kept[0].dataset == "custom");
    CHECK(kept[0].sentences[0].section_category == SectionCategory::Introduction);
    CHECK(kept[0].sentences[1].section_category == SectionCategory::Method);

    // Without an explicit threshold the dataset preset supplies one.
    const CliResult preset = run_cli(
        "ingest --input " + raw + " --output " + dir.file("p2.jsonl") + " --dataset arxiv-long",
        dir);
    REQUIRE(preset.code == 0);
    CHECK(contains(preset.output, "kept 0 (min summary tokens: 350)"));
}

TEST_CASE("label-oracle writes labels and honors config precedence") {
    testsupport::TempDir dir("cli-label");
    const std::string corpus = dir.file("syn.jsonl");
    write_jsonl(small_synthetic(6, 8, 5), corpus);

    const std::string labeled = dir.file("labeled.jsonl");
    const CliResult res = run_cli("label-oracle --input " + corpus + " --output " + labeled +
                                      " --k 2 --diversity off",
                                  dir);
    REQUIRE(res.code == 0);
    CHECK(contains(res.output, "labeled 6 documents (k=2, metric=rg12, diversity=off)"));
    const Corpus docs = read_jsonl(labeled);
    REQUIRE(docs.size() == 6);
    for (const auto& doc : docs) {
        REQUIRE(doc.has_oracle_labels());
        int picked = 0;
        for (const auto& s : doc.sentences) picked += *s.oracle_label;
        CHECK(picked >= 1);
        CHECK(picked <= 2);
    }

    // A config file can supply --k; the command line still wins when given.
    const std::string cfg = dir.file("extsumm.toml");
    write_lines(cfg, {"[label-oracle]", "k = 0"});
    CHECK(run_cli("--config " + cfg + " label-oracle --input " + corpus + " --output " +
                      dir.file("l2.jsonl"),
                  dir)
              .code == 1);
    const CliResult flag_wins = run_cli("--config " + cfg + " label-oracle --input " + corpus +
                                            " --output " + dir.file("l3.jsonl") + " --k 2",
                                        dir);
    CHECK(flag_wins.code == 0);
    CHECK(contains(flag_wins.output, "k=2"));
}

TEST_CASE("relative inputs resolve through flag, environment, then config") {
    testsupport::TempDir dir("cli-datadir");
    const std::string data = dir.file("data");
    fs::create_directories(data);
    write_jsonl(small_synthetic(4, 8, 9), data + "/corpus.jsonl");

    // No hint: the relative path cannot be found.
    CHECK(run_cli("stats --input corpus.jsonl", dir).code == 2);

    const CliResult via_flag = run_cli("--data-dir " + data + " stats --input corpus.jsonl",
                                       dir);
    CHECK(via_flag.code == 0);
    CHECK(contains(via_flag.output, "documents: 4"));

    CHECK(run_cli("stats --input corpus.jsonl", dir, "env EXTSUMM_DATA_DIR=" + data).code == 0);

    // Flag beats environment; a bad flag is not rescued by a good environment.
    CHECK(run_cli("--data-dir " + data + " stats --input corpus.jsonl", dir,
                  "env EXTSUMM_DATA_DIR=" + dir.file("nope"))
              .code == 0);
    CHECK(run_cli("--data-dir " + dir.file("nope") + " stats --input corpus.jsonl", dir,
                  "env EXTSUMM_DATA_DIR=" + data)
              .code == 2);

    // Config file supplies data_dir; environment still outranks it.
    const std::string cfg = dir.file("cfg.toml");
    write_lines(cfg, {"data_dir = \"" + data + "\""});
    CHECK(run_cli("--config " + cfg + " stats --input corpus.jsonl", dir).code == 0);
    const std::string bad_cfg = dir.file("bad.toml");
    write_lines(bad_cfg, {"data_dir = \"" + dir.file("nope") + "\""});
    CHECK(run_cli("--config " + bad_cfg + " stats --input corpus.jsonl", dir,
                  "env EXTSUMM_DATA_DIR=" + data)
              .code == 0);
}

TEST_CASE("full pipeline on a synthetic corpus") {
    testsupport::TempDir dir("cli-pipeline");
    const Corpus all = small_synthetic(30, 8, 11);
    const Corpus train_docs(all.begin(), all.begin() + 24);
    const Corpus val_docs(all.begin() + 24, all.end());
    const std::string train_path = dir.file("train.jsonl");
    const std::string val_path = dir.file("val.jsonl");
    write_jsonl(train_docs, train_path);
    write_jsonl(val_docs, val_path);

    const std::string run_dir = dir.file("run");
    const CliResult trained = run_cli(
        "train --train " + train_path + " --val " + val_path + " --out " + run_dir +
            " --d-model 16 --num-heads 2 --num-layers 1 --max-sentences 16 --vocab-size 500"
            " --max-steps 6 --val-interval 3 --batch-docs 4 --top-k 2 --seed 3 --lr 0.01"
            " --dropout 0.1",
        dir);
    REQUIRE(trained.code == 0);
    CHECK(contains(trained.output, "checkpoints: 3"));
    CHECK(contains(trained.output, "best model:"));
    REQUIRE(fs::exists(run_dir + "/model_best.json"));
    REQUIRE(fs::exists(run_dir + "/best.json"));
    const std::string metrics = slurp(run_dir + "/metrics.csv");
    CHECK(metrics.rfind("step,train_loss,val_metric\n", 0) == 0);

    const std::string model = run_dir + "/model_best.json";
    const std::string preds = dir.file("preds.jsonl");
    const CliResult predicted = run_cli(
        "predict --model " + model + " --input " + val_path + " --out " + preds + " --top-k 2",
        dir);
    REQUIRE(predicted.code == 0);
    CHECK(contains(predicted.output, "(top_k=2, trigram_blocking=off)"));
    const std::vector<PredRecord> records = read_predictions(preds);
    REQUIRE(records.size() == val_docs.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].id == val_docs[i].id);
        CHECK(records[i].selected.size() == 2);
        CHECK(records[i].probs.size() == 8);
    }

    // Dataset preset fills top_k when the flag is absent.
    const CliResult preset = run_cli("predict --model " + model + " --input " + val_path +
                                         " --out " + dir.file("p15.jsonl") +
                                         " --dataset custom",
                                     dir);
    REQUIRE(preset.code == 0);
    CHECK(contains(preset.output, "(top_k=15,"));

    // Threshold mode selects every sentence at 0.0.
    const std::string preds_thr = dir.file("preds-thr.jsonl");
    REQUIRE(run_cli("predict --model " + model + " --input " + val_path + " --out " +
                        preds_thr + " --threshold 0.0",
                    dir)
                .code == 0);
    for (const auto& rec : read_predictions(preds_thr)) {
        CHECK(rec.selected.size() == 8);
    }

    const std::string eval_csv = dir.file("eval.csv");
    const CliResult evaluated = run_cli(
        "evaluate --pred " + preds + " --refs " + val_path + " --out " + eval_csv, dir);
    REQUIRE(evaluated.code == 0);
    CHECK(contains(evaluated.output, "documents: 6"));
    CHECK(contains(evaluated.output, "mean RG-1 F1:"));
    const auto eval_rows = csv::read_file(eval_csv);
    REQUIRE(eval_rows.size() == 7);
    CHECK(eval_rows[0][0] == "doc_id");
    CHECK(eval_rows[0].size() == 10);

    // Comparing a run against itself must land every document in TIED.
    const std::string analysis = dir.file("analysis");
    const CliResult analyzed = run_cli("analyze --base " + preds + " --model " + preds +
                                           " --refs " + val_path + " --out " + analysis +
                                           " --bins 2",
                                       dir);
    REQUIRE(analyzed.code == 0);
    CHECK(contains(analyzed.output, "TIED"));
    CHECK(contains(analyzed.output, "count=6"));
    REQUIRE(fs::exists(analysis + "/comparisons.csv"));
    REQUIRE(fs::exists(analysis + "/bins.csv"));
    REQUIRE(fs::exists(analysis + "/length_bins.csv"));
    const std::string first_heatmap = analysis + "/heatmap_" + val_docs.front().id + ".csv";
    REQUIRE(fs::exists(first_heatmap));

    // Explicit heatmap ids replace the first-document default.
    const std::string analysis2 = dir.file("analysis2");
    REQUIRE(run_cli("analyze --base " + preds + " --model " + preds + " --refs " + val_path +
                        " --out " + analysis2 + " --bins 2 --heatmap-doc " + val_docs[2].id,
                    dir)
                .code == 0);
    CHECK(fs::exists(analysis2 + "/heatmap_" + val_docs[2].id + ".csv"));
    CHECK(!fs::exists(analysis2 + "/heatmap_" + val_docs.front().id + ".csv"));

    for (const auto& [kind, input] :
         std::vector<std::pair<std::string, std::string>>{
             {"bins", analysis + "/bins.csv"},
             {"length-bins", analysis + "/length_bins.csv"},
             {"heatmap", first_heatmap}}) {
        const std::string svg_path = dir.file(kind + ".svg");
        const CliResult plotted = run_cli(
            "plot --kind " + kind + " --input " + input + " --out " + svg_path, dir);
        REQUIRE(plotted.code == 0);
        CHECK(slurp(svg_path).rfind("<svg", 0) == 0);
    }
}
