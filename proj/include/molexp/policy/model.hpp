#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "molexp/rng.hpp"
#include "molexp/policy/vocab.hpp"

namespace molexp::policy {

struct ModelConfig {
    int vocab = 0;
    int embedding = 256;
    int hidden = 512;
    int layers = 3;

    bool operator==(const ModelConfig&) const = default;
};

ModelConfig paper_model(int vocab);  // embedding 256, 3x GRU 512
ModelConfig toy_model(int vocab);    // embedding 64, 2x GRU 128
ModelConfig tiny_model(int vocab);   // embedding 4, 1x GRU 8 (tests)

struct GruLayer {
    Eigen::MatrixXd w_x;  // [in, 3H], gate order z|r|n
    Eigen::MatrixXd w_h;  // [H, 3H]
    Eigen::MatrixXd b_x;  // [1, 3H]
    Eigen::MatrixXd b_h;  // [1, 3H]
};

struct TensorRef {
    std::string name;
    Eigen::MatrixXd* tensor;
};

// Embedding -> stacked GRU -> linear head. Doubles throughout; the gradient
// holder reuses this struct (zeroed) so layouts always mirror.
struct PolicyParams {
    ModelConfig config;
    Eigen::MatrixXd embedding;  // [V, E]
    std::vector<GruLayer> layers;
    Eigen::MatrixXd head_w;  // [H, V]
    Eigen::MatrixXd head_b;  // [1, V]

    static PolicyParams init(const ModelConfig& config, Rng& rng);
    static PolicyParams zeros_like(const PolicyParams& other);

    std::vector<TensorRef> tensors();
    std::vector<TensorRef> tensors_gru_and_head();  // noise scope: hidden + final
    std::vector<TensorRef> tensors_head();          // noise scope: final layer only

    void set_zero();
    bool all_finite() const;
};

// Padded teacher-forcing batch; sequences exclude BOS and normally end with
// EOS (horizon-cut rollouts simply stop early).
struct Batch {
    std::vector<std::vector<int>> ids;
    int max_len = 0;

    static Batch from_sequences(std::vector<std::vector<int>> sequences);
    int size() const { return static_cast<int>(ids.size()); }
};

// Activations cached for backward. Row layout of the flat [B*T, .] arrays is
// time-major: row(t*B + b).
struct ForwardCache {
    int batch = 0;
    int steps = 0;
    Eigen::MatrixXd mask;  // [B*T, 1], 1.0 where a target token exists
    struct LayerCache {
        Eigen::MatrixXd input;   // [B*T, in]
        Eigen::MatrixXd z, r, n; // [B*T, H]
        Eigen::MatrixXd gh_n;    // recurrent pre-activation of candidate gate
        Eigen::MatrixXd h_prev;  // [B*T, H]
        Eigen::MatrixXd h;       // [B*T, H]
    };
    std::vector<LayerCache> layers;
    Eigen::MatrixXd logits;  // [B*T, V]
    std::vector<double> seq_logprob;              // per sequence, double-accumulated
    std::vector<std::vector<double>> step_logprob; // per sequence, per step
};

// Teacher-forced pass over the batch. `keep_activations` may be false when
// only log-likelihoods are needed.
ForwardCache forward_teacher(const PolicyParams& params, const Batch& batch,
                             bool keep_activations = true);

std::vector<double> log_likelihoods(const PolicyParams& params, const Batch& batch);
double log_likelihood(const PolicyParams& params, const std::vector<int>& ids);

// Accumulates into `grads` the gradient of sum_b coeff[b] * log pi(seq_b).
// Callers fold loss signs/normalization into the coefficients.
void backward_weighted_ll(const PolicyParams& params, const Batch& batch,
                          const ForwardCache& cache, const std::vector<double>& coeff,
                          PolicyParams& grads);

// Accumulates the gradient of a scalar loss given dloss/dlogits (masked rows
// must be zero).
void backward_from_dlogits(const PolicyParams& params, const Batch& batch,
                           const ForwardCache& cache, const Eigen::MatrixXd& dlogits,
                           PolicyParams& grads);

struct SampledSeq {
    std::vector<int> ids;  // ends with EOS unless horizon-cut
    std::vector<double> step_logprobs;
    double sum_logprob = 0.0;
    bool terminated = false;  // true iff EOS emitted
};

// Autoregressive batch sampling. temperature 0 = argmax decode; recorded
// log-probs are always the untempered model log-probs so cached sums agree
// with teacher-forced evaluation.
std::vector<SampledSeq> sample_batch(const PolicyParams& params, int batch, int horizon,
                                     Rng& rng, double temperature = 1.0);

// Per-state next-token distributions, one row per sequence prefix state;
// used by behavior embeddings. Row b = softmax over the final state of
// sequence b (after consuming all its tokens).
Eigen::MatrixXd next_token_distributions(const PolicyParams& params, const Batch& batch);

double perplexity(const PolicyParams& params, const std::vector<int>& ids);

// Adds lambda * N(0,1) noise to the scoped tensors.
enum class NoiseScope { FinalLayer, AllHiddenAndFinal };
void perturb_with_noise(PolicyParams& params, double lambda, NoiseScope scope, Rng& rng);

}  // namespace molexp::policy
