#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "molexp/policy/adam.hpp"
#include "molexp/policy/checkpoint.hpp"
#include "molexp/policy/model.hpp"
#include "molexp/policy/pretrain.hpp"
#include "molexp/policy/vocab.hpp"
#include "molexp/rng.hpp"
#include "molexp/smiles/smiles.hpp"

using namespace molexp;
using namespace molexp::policy;

namespace {

// Loss used by the gradient checks: sum_b coeff[b] * log pi(seq_b).
double weighted_ll_loss(const PolicyParams& params, const Batch& batch,
                        const std::vector<double>& coeff) {
    const auto ll = log_likelihoods(params, batch);
    double loss = 0.0;
    for (std::size_t b = 0; b < ll.size(); ++b) loss += coeff[b] * ll[b];
    return loss;
}

Batch ragged_test_batch(int vocab) {
    // Mixed lengths exercise the masking path.
    std::vector<std::vector<int>> seqs;
    Rng rng(3);
    for (int len : {3, 6, 1, 4}) {
        std::vector<int> ids;
        for (int t = 0; t < len - 1; ++t)
            ids.push_back(3 + static_cast<int>(rng.below(vocab - 3)));
        ids.push_back(Vocab::kEos);
        seqs.push_back(std::move(ids));
    }
    return Batch::from_sequences(std::move(seqs));
}

}  // namespace

TEST_CASE("vocab tokenization") {
    auto tokens = Vocab::split_tokens("CC(=O)Nc1ccc(O)cc1");
    CHECK(tokens.size() == 18);
    CHECK(Vocab::split_tokens("ClCCBr") == std::vector<std::string>{"Cl", "C", "C", "Br"});
    CHECK(Vocab::split_tokens("C[NH3+]C") == std::vector<std::string>{"C", "[NH3+]", "C"});
    CHECK_THROWS_AS(Vocab::split_tokens("CZC"), UnknownTokenError);

    Vocab vocab = Vocab::from_corpus({"CC(=O)Nc1ccc(O)cc1", "ClCCBr", "C[NH3+]C"});
    const auto ids = vocab.encode("CC(=O)N");
    CHECK(vocab.decode(ids) == "CC(=O)N");
    // Round trip: decode then re-encode gives the same ids.
    CHECK(vocab.encode(vocab.decode(ids)) == ids);
    CHECK_THROWS_AS(vocab.encode("FF"), UnknownTokenError);  // F never seen
}

TEST_CASE("uniform model log-likelihood is -T log V") {
    Rng rng(5);
    PolicyParams params = PolicyParams::init(tiny_model(8), rng);
    params.set_zero();  // all-zero weights give exactly uniform logits
    const std::vector<int> ids{3, 4, 5, Vocab::kEos};
    const double ll = log_likelihood(params, ids);
    CHECK(ll == doctest::Approx(-4.0 * std::log(8.0)).epsilon(1e-12));
    CHECK(perplexity(params, ids) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences on tiny model") {
    Rng rng(17);
    PolicyParams params = PolicyParams::init(tiny_model(8), rng);
    const Batch batch = ragged_test_batch(8);
    const std::vector<double> coeff{0.7, -0.3, 1.2, 0.05};

    PolicyParams grads = PolicyParams::zeros_like(params);
    const auto cache = forward_teacher(params, batch);
    backward_weighted_ll(params, batch, cache, coeff, grads);

    const double eps = 1e-4;
    auto p_refs = params.tensors();
    auto g_refs = grads.tensors();
    for (std::size_t i = 0; i < p_refs.size(); ++i) {
        Eigen::MatrixXd& tensor = *p_refs[i].tensor;
        const Eigen::MatrixXd& grad = *g_refs[i].tensor;
        // Check a deterministic subset of each tensor (full sweep runs in the
        // acceptance suite).
        for (Eigen::Index k = 0; k < tensor.size(); k += 3) {
            const double saved = tensor.data()[k];
            tensor.data()[k] = saved + eps;
            const double up = weighted_ll_loss(params, batch, coeff);
            tensor.data()[k] = saved - eps;
            const double down = weighted_ll_loss(params, batch, coeff);
            tensor.data()[k] = saved;
            const double fd = (up - down) / (2.0 * eps);
            const double an = grad.data()[k];
            const double tol = 1e-3 * std::max({std::abs(fd), std::abs(an), 1e-5});
            INFO(p_refs[i].name, " element ", k, " fd=", fd, " an=", an);
            CHECK(std::abs(fd - an) <= tol);
        }
    }
}

TEST_CASE("sampled trajectories are consistent with teacher forcing") {
    Rng init(23);
    PolicyParams params = PolicyParams::init(tiny_model(8), init);
    Rng rng(29);
    const auto samples = sample_batch(params, 16, 20, rng);
    for (const auto& s : samples) {
        REQUIRE(!s.ids.empty());
        // Cached sum equals the sum of per-step terms exactly (double acc).
        double sum = 0.0;
        for (double lp : s.step_logprobs) sum += lp;
        CHECK(std::abs(sum - s.sum_logprob) <= 1e-9);
        // And the teacher-forced pass reproduces it.
        CHECK(log_likelihood(params, s.ids) == doctest::Approx(s.sum_logprob).epsilon(1e-9));
    }

    // Same seed, same batch: byte-identical samples.
    Rng rng_a(31), rng_b(31);
    const auto a = sample_batch(params, 8, 20, rng_a);
    const auto b = sample_batch(params, 8, 20, rng_b);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ids == b[i].ids);
        CHECK(a[i].sum_logprob == b[i].sum_logprob);
    }

    // Argmax decode ignores the rng entirely.
    Rng rng_c(37), rng_d(999);
    const auto c = sample_batch(params, 4, 20, rng_c, 0.0);
    const auto d = sample_batch(params, 4, 20, rng_d, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i].ids == d[i].ids);
}

TEST_CASE("empirical next-token frequencies match the softmax") {
    // Hand-set distribution via head bias on a weight-free model.
    PolicyParams params;
    Rng rng(41);
    params = PolicyParams::init(tiny_model(5), rng);
    params.set_zero();
    params.head_b(0, 2) = 1.0;  // EOS
    params.head_b(0, 3) = 2.0;
    params.head_b(0, 4) = 0.5;

    Eigen::ArrayXd logits(5);
    logits << 0.0, 0.0, 1.0, 2.0, 0.5;
    Eigen::ArrayXd probs = (logits - logits.maxCoeff()).exp();
    probs /= probs.sum();

    Rng sampler(43);
    std::vector<long> counts(5, 0);
    const int draws = 50000;
    for (int i = 0; i < draws; i += 1000) {
        const auto batch = sample_batch(params, 1000, 1, sampler);
        for (const auto& s : batch) ++counts[s.ids[0]];
    }
    for (int v = 0; v < 5; ++v) {
        const double freq = static_cast<double>(counts[v]) / draws;
        CHECK(std::abs(freq - probs(v)) < 0.01);
    }
}

TEST_CASE("adam basics") {
    Rng rng(47);
    PolicyParams params = PolicyParams::init(tiny_model(8), rng);
    const PolicyParams before = params;

    Adam adam(params, {0.1, 0.9, 0.999, 1e-8, 0, 0.5});
    PolicyParams zero_grads = PolicyParams::zeros_like(params);
    adam.step(params, zero_grads);
    // Zero gradient with fresh moments leaves parameters untouched.
    CHECK(params.embedding == before.embedding);
    CHECK(params.head_w == before.head_w);
    CHECK(adam.steps_taken() == 1);
}

TEST_CASE("adam two-step trace matches the closed form") {
    Rng rng(53);
    PolicyParams params = PolicyParams::init(tiny_model(8), rng);
    const double p0 = params.head_w(0, 0);
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    Adam adam(params, {lr, b1, b2, eps, 0, 0.5});

    PolicyParams grads = PolicyParams::zeros_like(params);
    const double g1 = 0.5, g2 = -0.3;

    grads.head_w(0, 0) = g1;
    adam.step(params, grads);
    double m = (1 - b1) * g1;
    double v = (1 - b2) * g1 * g1;
    double p = p0 - lr * (m / (1 - b1)) / (std::sqrt(v / (1 - b2)) + eps);
    CHECK(params.head_w(0, 0) == doctest::Approx(p).epsilon(1e-10));

    grads.head_w(0, 0) = g2;
    adam.step(params, grads);
    m = b1 * m + (1 - b1) * g2;
    v = b2 * v + (1 - b2) * g2 * g2;
    p = p - lr * (m / (1 - b1 * b1)) / (std::sqrt(v / (1 - b2 * b2)) + eps);
    CHECK(params.head_w(0, 0) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("lr scheduler halves on schedule") {
    Rng rng(59);
    PolicyParams params = PolicyParams::init(tiny_model(8), rng);
    Adam adam(params, {1e-3, 0.9, 0.999, 1e-8, 500, 0.5});
    PolicyParams grads = PolicyParams::zeros_like(params);
    CHECK(adam.current_lr() == doctest::Approx(1e-3));
    for (int i = 0; i < 1000; ++i) adam.step(params, grads);
    CHECK(adam.current_lr() == doctest::Approx(1e-3 * 0.25));
}

TEST_CASE("noise perturbation scopes") {
    Rng rng(61);
    PolicyParams params = PolicyParams::init(tiny_model(8), rng);
    PolicyParams untouched = params;

    Rng noise_rng(62);
    perturb_with_noise(params, 0.0, NoiseScope::AllHiddenAndFinal, noise_rng);
    CHECK(params.head_w == untouched.head_w);
    CHECK(params.embedding == untouched.embedding);

    PolicyParams final_only = untouched;
    perturb_with_noise(final_only, 0.05, NoiseScope::FinalLayer, noise_rng);
    CHECK(final_only.head_w != untouched.head_w);
    CHECK(final_only.embedding == untouched.embedding);
    CHECK(final_only.layers[0].w_h == untouched.layers[0].w_h);

    PolicyParams all = untouched;
    perturb_with_noise(all, 0.05, NoiseScope::AllHiddenAndFinal, noise_rng);
    CHECK(all.head_w != untouched.head_w);
    CHECK(all.layers[0].w_h != untouched.layers[0].w_h);
    CHECK(all.embedding == untouched.embedding);  // embedding stays out of scope
}

TEST_CASE("checkpoint round trip") {
    Vocab vocab = Vocab::from_corpus({"CCO", "c1ccccc1"});
    Rng rng(67);
    PolicyParams params = PolicyParams::init(toy_model(vocab.size()), rng);
    Adam adam(params, {5e-4, 0.9, 0.999, 1e-8, 500, 0.5});
    PolicyParams grads = PolicyParams::zeros_like(params);
    grads.head_w.setConstant(0.01);
    adam.step(params, grads);

    const std::string path = (std::filesystem::temp_directory_path() / "molexp_ckpt_test.bin").string();
    save_checkpoint(path, vocab, params, &adam);
    Checkpoint loaded = load_checkpoint(path);
    std::filesystem::remove(path);

    CHECK(loaded.vocab == vocab);
    CHECK(loaded.params.config == params.config);
    CHECK(loaded.params.embedding == params.embedding);
    CHECK(loaded.params.head_w == params.head_w);
    CHECK(loaded.params.layers[1].w_h == params.layers[1].w_h);
    REQUIRE(loaded.optimizer.has_value());
    CHECK(loaded.optimizer->steps_taken() == 1);
    CHECK(loaded.optimizer->options().lr == 5e-4);
    CHECK(loaded.optimizer->moment1().head_w == adam.moment1().head_w);
}

TEST_CASE("pretraining improves the loss and starts near log V") {
    // Small synthetic corpus keeps this fast; the bundled corpus regression
    // lives in the slow suite.
    std::vector<std::string> corpus;
    for (const char* s : {"CCO", "CCC", "CCN", "CCCO", "CC(C)O", "CCCC", "OCCO",
                          "CC(C)C", "CCOC", "CNC", "CCCN", "COC"})
        for (int i = 0; i < 4; ++i) corpus.push_back(s);

    PretrainConfig cfg;
    cfg.preset = ModelPreset::Tiny;
    cfg.epochs = 5;
    cfg.batch_size = 16;
    cfg.lr = 5e-3;
    cfg.scheduler_steps = 0;
    cfg.validity_sample = 0;
    cfg.seed = 7;

    // Fresh parameters start at the uniform-prediction loss.
    Vocab vocab = Vocab::from_corpus(corpus);
    Rng rng(derive_seed(cfg.seed, seed_tag::model_init));
    PolicyParams fresh = PolicyParams::init(make_model_config(cfg.preset, vocab.size()), rng);
    std::vector<std::vector<int>> seqs;
    for (const auto& s : corpus) {
        auto ids = vocab.encode(s);
        ids.push_back(Vocab::kEos);
        seqs.push_back(std::move(ids));
    }
    const Batch batch = Batch::from_sequences(seqs);
    const auto ll = log_likelihoods(fresh, batch);
    double nll = 0.0;
    long tokens = 0;
    for (std::size_t b = 0; b < ll.size(); ++b) {
        nll -= ll[b];
        tokens += static_cast<long>(batch.ids[b].size());
    }
    CHECK(nll / tokens == doctest::Approx(std::log(vocab.size())).epsilon(0.05));

    const auto result = pretrain(corpus, cfg);
    REQUIRE(result.history.size() == 5);
    for (std::size_t e = 1; e < result.history.size(); ++e)
        CHECK(result.history[e].loss_per_token < result.history[e - 1].loss_per_token);
}
