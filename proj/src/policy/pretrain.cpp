#include <cstdio>
#include <fstream>
#include <numeric>

#include "molexp/policy/pretrain.hpp"
#include "molexp/smiles/smiles.hpp"

namespace molexp::policy {

std::vector<std::string> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    if (out.empty()) throw CorpusError("corpus file is empty: " + path);
    return out;
}

ModelConfig make_model_config(ModelPreset preset, int vocab) {
    switch (preset) {
        case ModelPreset::Paper: return paper_model(vocab);
        case ModelPreset::Toy: return toy_model(vocab);
        case ModelPreset::Tiny: return tiny_model(vocab);
    }
    return toy_model(vocab);
}

Pretrained pretrain(const std::vector<std::string>& corpus, const PretrainConfig& config) {
    if (corpus.empty()) throw CorpusError("empty corpus");

    // Pre-parse once; every epoch draws a fresh randomized rewrite.
    std::vector<smiles::MolGraph> graphs;
    graphs.reserve(corpus.size());
    for (const auto& s : corpus) graphs.push_back(smiles::parse_smiles(s));

    Pretrained result;
    result.vocab = Vocab::from_corpus(corpus);
    const Vocab& vocab = result.vocab;

    Rng init_rng(derive_seed(config.seed, seed_tag::model_init));
    result.params = PolicyParams::init(make_model_config(config.preset, vocab.size()), init_rng);
    PolicyParams& params = result.params;

    Adam optimizer(params, {config.lr, 0.9, 0.999, 1e-8, config.scheduler_steps, config.scheduler_gamma});
    Rng train_rng(derive_seed(config.seed, seed_tag::pretrain));

    std::vector<std::size_t> order(graphs.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        train_rng.shuffle(order);
        double nll_sum = 0.0;
        long token_count = 0;
        const double epoch_lr = optimizer.current_lr();

        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            std::vector<std::vector<int>> seqs;
            seqs.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) {
                std::string sample;
                try {
                    sample = smiles::randomized_smiles(graphs[order[i]], train_rng);
                    vocab.encode(sample);
                } catch (const std::exception&) {
                    sample = corpus[order[i]];  // rare: rewrite used a token outside the vocabulary
                }
                auto ids = vocab.encode(sample);
                if (static_cast<int>(ids.size()) + 1 > config.horizon) continue;
                ids.push_back(Vocab::kEos);
                seqs.push_back(std::move(ids));
            }
            if (seqs.empty()) continue;

            const Batch batch = Batch::from_sequences(std::move(seqs));
            const auto cache = forward_teacher(params, batch);
            for (int b = 0; b < batch.size(); ++b) {
                nll_sum -= cache.seq_logprob[b];
                token_count += static_cast<long>(batch.ids[b].size());
            }

            // Loss: mean over the batch of per-sequence NLL.
            PolicyParams grads = PolicyParams::zeros_like(params);
            std::vector<double> coeff(batch.size(), -1.0 / static_cast<double>(batch.size()));
            backward_weighted_ll(params, batch, cache, coeff, grads);
            optimizer.step(params, grads);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.loss_per_token = token_count > 0 ? nll_sum / static_cast<double>(token_count) : 0.0;
        stats.lr = epoch_lr;

        if (config.validity_sample > 0) {
            Rng validity_rng(derive_seed(config.seed, seed_tag::pretrain, 1000 + epoch));
            const auto samples = sample_batch(params, config.validity_sample, config.horizon, validity_rng);
            int valid = 0;
            for (const auto& s : samples) {
                try {
                    smiles::parse_smiles(vocab.decode(s.ids));
                    ++valid;
                } catch (const smiles::ParseError&) {
                }
            }
            stats.validity = static_cast<double>(valid) / static_cast<double>(samples.size());
        }
        result.history.push_back(stats);
    }
    return result;
}

void write_metrics(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write metrics file: " + path);
    out << "epoch,loss_per_token,lr,validity\n";
    char buf[128];
    for (const auto& row : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.8f,%.4f\n", row.epoch, row.loss_per_token,
                      row.lr, row.validity);
        out << buf;
    }
}

}  // namespace molexp::policy
