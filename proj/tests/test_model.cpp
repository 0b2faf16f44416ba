#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "extsumm/model.hpp"

using namespace extsumm;

namespace {

// Independently derived closed forms for the zero-parameter model.
constexpr double kLn2 = 0.6931471805599453;               // -ln(0.5)
constexpr double kLn7 = 1.9459101490553132;               // -ln(1/7)
constexpr double kNegLnSigmoid1 = 0.3132616875182228;     // -ln(sigmoid(1))
constexpr double kNegLnOneMinusSigmoid1 = 1.3132616875182228;
constexpr double kNegLnSoftmax1 = 1.1654221804855953;     // -ln(e/(e+6))
constexpr double kNegLnSoftmaxRest = 2.1654221804855953;  // -ln(1/(e+6))

ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.vocab_size = 13;
    cfg.d_model = 8;
    cfg.num_heads = 2;
    cfg.num_layers = 2;
    cfg.max_sentences = 6;
    cfg.num_sections = kNumSections;
    cfg.dropout = 0.1;
    cfg.alpha = 0.5;
    return cfg;
}

std::vector<std::vector<int>> tiny_doc() {
    return {{1, 2, 3}, {4, 5}, {6, 7, 8, 1}};
}

double zero_model_loss(double alpha, const std::vector<int>& select,
                       const std::vector<int>& section) {
    ModelConfig cfg = tiny_config();
    cfg.alpha = alpha;
    Model model(cfg, Parameters::zeros(cfg));
    auto doc = tiny_doc();
    Forward f = model.forward(doc);
    return combined_loss(loss_sums(f, select, section), static_cast<int>(doc.size()), alpha);
}

}  // namespace

TEST_CASE("config validation") {
    ModelConfig cfg = tiny_config();
    CHECK_NOTHROW(cfg.validate());

    cfg.d_model = 9;  // not divisible by 2 heads
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = tiny_config();
    cfg.vocab_size = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = tiny_config();
    cfg.dropout = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.dropout = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = tiny_config();
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(cfg.validate(), AlphaOutOfRange);
    cfg.alpha = -0.5;
    CHECK_THROWS_AS(cfg.validate(), AlphaOutOfRange);
    cfg.alpha = 0.0;
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha = 1.0;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("forward produces well-formed distributions") {
    ModelConfig cfg = tiny_config();
    Model model(cfg, 42);
    auto doc = tiny_doc();
    Forward f = model.forward(doc);

    REQUIRE(f.num_sentences() == 3);
    REQUIRE(f.sec_probs.rows() == 3);
    REQUIRE(f.sec_probs.cols() == kNumSections);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(f.probs(i) > 0.0);
        CHECK(f.probs(i) < 1.0);
        CHECK(f.sec_probs.row(i).sum() == Catch::Approx(1.0).margin(1e-12));
        CHECK(f.sec_probs.row(i).minCoeff() > 0.0);
    }
    CHECK(f.section_argmax().size() == 3);
}

TEST_CASE("zero parameters give exactly chance outputs") {
    ModelConfig cfg = tiny_config();
    Model model(cfg, Parameters::zeros(cfg));
    Forward f = model.forward(tiny_doc());
    for (Eigen::Index i = 0; i < f.num_sentences(); ++i) {
        CHECK(f.probs(i) == 0.5);
        for (Eigen::Index c = 0; c < kNumSections; ++c) {
            CHECK(f.sec_probs(i, c) == Catch::Approx(1.0 / 7.0).margin(1e-15));
        }
    }
    // Uniform rows argmax to the first index.
    CHECK(f.section_argmax() == std::vector<int>{0, 0, 0});
}

TEST_CASE("combined loss matches closed forms at the alpha edges") {
    const std::vector<int> select = {1, 0, 1};
    const std::vector<int> section = {0, 3, 6};
    CHECK(zero_model_loss(1.0, select, section) == Catch::Approx(kLn2).margin(1e-12));
    CHECK(zero_model_loss(0.0, select, section) == Catch::Approx(kLn7).margin(1e-12));
    CHECK(zero_model_loss(0.5, select, section) ==
          Catch::Approx(0.5 * (kLn2 + kLn7)).margin(1e-12));
    CHECK(zero_model_loss(0.3, select, section) ==
          Catch::Approx(0.3 * kLn2 + 0.7 * kLn7).margin(1e-12));
}

TEST_CASE("selection bias shifts the loss by the sigmoid closed form") {
    ModelConfig cfg = tiny_config();
    cfg.alpha = 1.0;
    Parameters p = Parameters::zeros(cfg);
    p.sel_b(0, 0) = 1.0;
    Model model(cfg, std::move(p));
    auto doc = tiny_doc();
    Forward f = model.forward(doc);
    CHECK(f.probs(0) == Catch::Approx(0.7310585786300049).margin(1e-15));

    DocLossSums pos = loss_sums(f, std::vector<int>{1, 1, 1}, std::vector<int>{0, 0, 0});
    CHECK(combined_loss(pos, 3, 1.0) == Catch::Approx(kNegLnSigmoid1).margin(1e-12));
    DocLossSums neg = loss_sums(f, std::vector<int>{0, 0, 0}, std::vector<int>{0, 0, 0});
    CHECK(combined_loss(neg, 3, 1.0) == Catch::Approx(kNegLnOneMinusSigmoid1).margin(1e-12));
}

TEST_CASE("section bias shifts the loss by the softmax closed form") {
    ModelConfig cfg = tiny_config();
    cfg.alpha = 0.0;
    Parameters p = Parameters::zeros(cfg);
    p.sec_b(0, 0) = 1.0;  // logits [1, 0, 0, 0, 0, 0, 0]
    Model model(cfg, std::move(p));
    auto doc = tiny_doc();
    Forward f = model.forward(doc);

    DocLossSums hit = loss_sums(f, std::vector<int>{0, 0, 0}, std::vector<int>{0, 0, 0});
    CHECK(combined_loss(hit, 3, 0.0) == Catch::Approx(kNegLnSoftmax1).margin(1e-12));
    DocLossSums miss = loss_sums(f, std::vector<int>{0, 0, 0}, std::vector<int>{4, 4, 4});
    CHECK(combined_loss(miss, 3, 0.0) == Catch::Approx(kNegLnSoftmaxRest).margin(1e-12));
}

TEST_CASE("analytic gradients match central differences") {
    auto doc = tiny_doc();
    const std::vector<int> select = {1, 0, 1};
    const std::vector<int> section = {2, 0, 5};
    for (std::uint64_t seed : {7ull, 19ull, 23ull}) {
        ModelConfig cfg = tiny_config();
        Model model(cfg, Parameters::random(cfg, seed));
        GradCheckResult res = grad_check(model, doc, select, section, cfg.alpha);
        INFO("seed " << seed << " worst tensor " << res.worst_tensor);
        CHECK(res.max_rel_err < 1e-4);
    }
}

TEST_CASE("gradients stay exact at the alpha edges") {
    auto doc = tiny_doc();
    const std::vector<int> select = {0, 1, 0};
    const std::vector<int> section = {6, 1, 3};
    for (double alpha : {0.0, 1.0}) {
        ModelConfig cfg = tiny_config();
        cfg.alpha = alpha;
        Model model(cfg, Parameters::random(cfg, 31));
        GradCheckResult res = grad_check(model, doc, select, section, alpha);
        INFO("alpha " << alpha << " worst tensor " << res.worst_tensor);
        CHECK(res.max_rel_err < 1e-4);
    }
}

TEST_CASE("saturated sigmoid clamps the probability and kills its gradient") {
    ModelConfig cfg = tiny_config();
    Parameters p = Parameters::zeros(cfg);
    p.sel_b(0, 0) = 40.0;  // sigmoid(40) rounds past 1 - 1e-12
    Model model(cfg, std::move(p));
    auto doc = tiny_doc();
    Forward f = model.forward(doc);
    for (Eigen::Index i = 0; i < f.num_sentences(); ++i) {
        CHECK(f.probs(i) == 1.0 - kProbEps);
    }

    Parameters grads = Parameters::zeros(cfg);
    backward(model, f, std::vector<int>{0, 0, 0}, std::vector<int>{0, 0, 0}, 1.0,
             1.0 / 3.0, grads);
    CHECK(grads.sel_b(0, 0) == 0.0);
    CHECK(grads.sel_w.norm() == 0.0);
}

TEST_CASE("label validation rejects bad shapes and values") {
    ModelConfig cfg = tiny_config();
    Model model(cfg, 1);
    Forward f = model.forward(tiny_doc());
    CHECK_THROWS_AS(loss_sums(f, std::vector<int>{1, 0}, std::vector<int>{0, 0, 0}),
                    LengthMismatch);
    CHECK_THROWS_AS(loss_sums(f, std::vector<int>{1, 0, 2}, std::vector<int>{0, 0, 0}),
                    LabelOutOfRange);
    CHECK_THROWS_AS(loss_sums(f, std::vector<int>{1, 0, 1}, std::vector<int>{0, 0, 7}),
                    LabelOutOfRange);
    CHECK_THROWS_AS(loss_sums(f, std::vector<int>{1, 0, 1}, std::vector<int>{0, -1, 0}),
                    LabelOutOfRange);
}

TEST_CASE("forward guards its domain") {
    ModelConfig cfg = tiny_config();
    Model model(cfg, 5);
    CHECK_THROWS_AS(model.forward({}), EmptyDocument);

    std::vector<std::vector<int>> too_many(7, std::vector<int>{1});
    CHECK_THROWS_AS(model.forward(too_many), TooLarge);

    CHECK_THROWS_AS(model.forward({{99}}), VocabOverflow);
    CHECK_THROWS_AS(model.forward({{-1}}), VocabOverflow);

    // Training mode with dropout needs an rng.
    CHECK_THROWS_AS(model.forward(tiny_doc(), true, nullptr), std::invalid_argument);
}

TEST_CASE("dropout is deterministic under a fixed rng and off at eval") {
    ModelConfig cfg = tiny_config();
    cfg.dropout = 0.5;
    Model model(cfg, 9);
    auto doc = tiny_doc();

    std::mt19937_64 rng_a(123);
    std::mt19937_64 rng_b(123);
    Forward a = model.forward(doc, true, &rng_a);
    Forward b = model.forward(doc, true, &rng_b);
    CHECK((a.probs - b.probs).norm() == 0.0);
    CHECK((a.enc - b.enc).norm() == 0.0);

    Forward eval1 = model.forward(doc);
    Forward eval2 = model.forward(doc);
    CHECK((eval1.enc - eval2.enc).norm() == 0.0);
    CHECK(eval1.drop0.size() == 0);

    std::mt19937_64 rng_c(999);
    Forward trained = model.forward(doc, true, &rng_c);
    // With dropout masks applied the encoding almost surely changes.
    CHECK((trained.enc - eval1.enc).norm() > 0.0);
}

TEST_CASE("empty-token sentences fall back to the position embedding") {
    ModelConfig cfg = tiny_config();
    Model model(cfg, 17);
    Forward f = model.forward({{1, 2}, {}});
    CHECK(f.num_sentences() == 2);
    CHECK((f.x0.row(1) - model.params.pos_embed.row(1)).norm() == 0.0);
}

TEST_CASE("parameter bookkeeping") {
    ModelConfig cfg = tiny_config();
    Parameters p = Parameters::init(cfg, 3);
    // 2 embeds + 10 per layer * 2 layers + 4 head tensors.
    CHECK(p.tensors().size() == 26);
    const std::size_t d = 8;
    const std::size_t expect = 13 * d + 6 * d          // embeddings
                               + 2 * (4 * d * d + 6 * d)  // layer weights and vectors
                               + d + 1 + 7 * d + 7;    // heads
    CHECK(p.count_params() == expect);

    // Heads start at zero, gains at one.
    CHECK(p.sel_w.norm() == 0.0);
    CHECK(p.sec_w.norm() == 0.0);
    CHECK((p.layers[0].ln_gain - Eigen::MatrixXd::Ones(1, 8)).norm() == 0.0);

    // Same seed, same parameters; different seed, different parameters.
    Parameters q = Parameters::init(cfg, 3);
    CHECK((p.tok_embed - q.tok_embed).norm() == 0.0);
    Parameters r = Parameters::init(cfg, 4);
    CHECK((p.tok_embed - r.tok_embed).norm() > 0.0);
}
