#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molexp/policy/adam.hpp"
#include "molexp/policy/model.hpp"
#include "molexp/policy/vocab.hpp"

namespace molexp::policy {

class CorpusError : public std::runtime_error {
public:
    explicit CorpusError(const std::string& message) : std::runtime_error(message) {}
};

// One SMILES per line, UTF-8; blank lines skipped.
std::vector<std::string> load_corpus(const std::string& path);

enum class ModelPreset { Toy, Paper, Tiny };
ModelConfig make_model_config(ModelPreset preset, int vocab);

struct PretrainConfig {
    ModelPreset preset = ModelPreset::Toy;
    int epochs = 10;
    int batch_size = 128;
    double lr = 1e-3;
    int scheduler_steps = 500;
    double scheduler_gamma = 0.5;
    int horizon = 128;          // sequences longer than this are skipped
    int validity_sample = 200;  // per-epoch sampled-validity estimate
    std::uint64_t seed = 0;
};

struct EpochStats {
    int epoch = 0;
    double loss_per_token = 0.0;
    double lr = 0.0;
    double validity = 0.0;
};

struct Pretrained {
    Vocab vocab;
    PolicyParams params;
    std::vector<EpochStats> history;
};

// Shuffled-minibatch NLL training with a fresh restricted randomization of
// each molecule every time it is drawn. Loss/validity per epoch are recorded
// and can be dumped with write_metrics.
Pretrained pretrain(const std::vector<std::string>& corpus, const PretrainConfig& config);

void write_metrics(const std::string& path, const std::vector<EpochStats>& history);

}  // namespace molexp::policy
