#include <algorithm>
#include <cmath>

#include "molexp/policy/model.hpp"

namespace molexp::policy {

namespace {

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& x) { return 1.0 / (1.0 + (-x).exp()); }

}  // namespace

ModelConfig paper_model(int vocab) { return {vocab, 256, 512, 3}; }
ModelConfig toy_model(int vocab) { return {vocab, 64, 128, 2}; }
ModelConfig tiny_model(int vocab) { return {vocab, 4, 8, 1}; }

PolicyParams PolicyParams::init(const ModelConfig& config, Rng& rng) {
    PolicyParams p;
    p.config = config;
    const double bound = 1.0 / std::sqrt(static_cast<double>(config.hidden));
    auto uniform_fill = [&](Eigen::MatrixXd& m, int rows, int cols) {
        m.resize(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-bound, bound);
    };
    uniform_fill(p.embedding, config.vocab, config.embedding);
    p.layers.resize(config.layers);
    for (int l = 0; l < config.layers; ++l) {
        const int in = l == 0 ? config.embedding : config.hidden;
        uniform_fill(p.layers[l].w_x, in, 3 * config.hidden);
        uniform_fill(p.layers[l].w_h, config.hidden, 3 * config.hidden);
        p.layers[l].b_x = Eigen::MatrixXd::Zero(1, 3 * config.hidden);
        p.layers[l].b_h = Eigen::MatrixXd::Zero(1, 3 * config.hidden);
    }
    uniform_fill(p.head_w, config.hidden, config.vocab);
    p.head_b = Eigen::MatrixXd::Zero(1, config.vocab);
    return p;
}

PolicyParams PolicyParams::zeros_like(const PolicyParams& other) {
    PolicyParams p;
    p.config = other.config;
    p.embedding = Eigen::MatrixXd::Zero(other.embedding.rows(), other.embedding.cols());
    p.layers.resize(other.layers.size());
    for (std::size_t l = 0; l < other.layers.size(); ++l) {
        p.layers[l].w_x = Eigen::MatrixXd::Zero(other.layers[l].w_x.rows(), other.layers[l].w_x.cols());
        p.layers[l].w_h = Eigen::MatrixXd::Zero(other.layers[l].w_h.rows(), other.layers[l].w_h.cols());
        p.layers[l].b_x = Eigen::MatrixXd::Zero(1, other.layers[l].b_x.cols());
        p.layers[l].b_h = Eigen::MatrixXd::Zero(1, other.layers[l].b_h.cols());
    }
    p.head_w = Eigen::MatrixXd::Zero(other.head_w.rows(), other.head_w.cols());
    p.head_b = Eigen::MatrixXd::Zero(1, other.head_b.cols());
    return p;
}

std::vector<TensorRef> PolicyParams::tensors() {
    std::vector<TensorRef> refs{{"embedding", &embedding}};
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string prefix = "gru" + std::to_string(l) + ".";
        refs.push_back({prefix + "w_x", &layers[l].w_x});
        refs.push_back({prefix + "w_h", &layers[l].w_h});
        refs.push_back({prefix + "b_x", &layers[l].b_x});
        refs.push_back({prefix + "b_h", &layers[l].b_h});
    }
    refs.push_back({"head_w", &head_w});
    refs.push_back({"head_b", &head_b});
    return refs;
}

std::vector<TensorRef> PolicyParams::tensors_gru_and_head() {
    auto refs = tensors();
    refs.erase(std::remove_if(refs.begin(), refs.end(),
                              [](const TensorRef& r) { return r.name == "embedding"; }),
               refs.end());
    return refs;
}

std::vector<TensorRef> PolicyParams::tensors_head() {
    return {{"head_w", &head_w}, {"head_b", &head_b}};
}

void PolicyParams::set_zero() {
    for (auto& ref : tensors()) ref.tensor->setZero();
}

bool PolicyParams::all_finite() const {
    auto finite = [](const Eigen::MatrixXd& m) { return m.allFinite(); };
    if (!finite(embedding) || !finite(head_w) || !finite(head_b)) return false;
    for (const auto& l : layers)
        if (!finite(l.w_x) || !finite(l.w_h) || !finite(l.b_x) || !finite(l.b_h)) return false;
    return true;
}

Batch Batch::from_sequences(std::vector<std::vector<int>> sequences) {
    Batch b;
    b.ids = std::move(sequences);
    for (const auto& s : b.ids) b.max_len = std::max(b.max_len, static_cast<int>(s.size()));
    return b;
}

ForwardCache forward_teacher(const PolicyParams& params, const Batch& batch, bool keep_activations) {
    const auto& cfg = params.config;
    const int B = batch.size();
    const int T = batch.max_len;
    const int H = cfg.hidden;
    const int rows = B * T;

    ForwardCache cache;
    cache.batch = B;
    cache.steps = T;
    cache.mask = Eigen::MatrixXd::Zero(rows, 1);
    for (int b = 0; b < B; ++b)
        for (int t = 0; t < static_cast<int>(batch.ids[b].size()); ++t) cache.mask(t * B + b, 0) = 1.0;

    // Inputs: BOS then the sequence shifted right; padding rows use EOS and
    // are masked out everywhere downstream.
    Eigen::MatrixXd x(rows, cfg.embedding);
    for (int t = 0; t < T; ++t)
        for (int b = 0; b < B; ++b) {
            int token = Vocab::kEos;
            if (t == 0)
                token = Vocab::kBos;
            else if (t - 1 < static_cast<int>(batch.ids[b].size()))
                token = batch.ids[b][t - 1];
            x.row(t * B + b) = params.embedding.row(token);
        }

    cache.layers.resize(cfg.layers);
    for (int l = 0; l < cfg.layers; ++l) {
        const auto& layer = params.layers[l];
        auto& lc = cache.layers[l];
        lc.input = std::move(x);

        Eigen::MatrixXd gx = lc.input * layer.w_x;
        gx.rowwise() += layer.b_x.row(0);

        lc.z.resize(rows, H);
        lc.r.resize(rows, H);
        lc.n.resize(rows, H);
        lc.gh_n.resize(rows, H);
        lc.h_prev.resize(rows, H);
        lc.h.resize(rows, H);

        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(B, H);
        for (int t = 0; t < T; ++t) {
            const int r0 = t * B;
            Eigen::MatrixXd gh = h * layer.w_h;
            gh.rowwise() += layer.b_h.row(0);

            auto gx_block = gx.middleRows(r0, B);
            const Eigen::ArrayXXd z = sigmoid(gx_block.leftCols(H).array() + gh.leftCols(H).array());
            const Eigen::ArrayXXd r = sigmoid(gx_block.middleCols(H, H).array() + gh.middleCols(H, H).array());
            const Eigen::ArrayXXd ghn = gh.rightCols(H).array();
            const Eigen::ArrayXXd n = (gx_block.rightCols(H).array() + r * ghn).tanh();
            const Eigen::ArrayXXd h_new = (1.0 - z) * n + z * h.array();

            const auto m = cache.mask.middleRows(r0, B).array().replicate(1, H);
            lc.z.middleRows(r0, B) = z;
            lc.r.middleRows(r0, B) = r;
            lc.n.middleRows(r0, B) = n;
            lc.gh_n.middleRows(r0, B) = ghn;
            lc.h_prev.middleRows(r0, B) = h;
            h = (m * h_new + (1.0 - m) * h.array()).matrix();
            lc.h.middleRows(r0, B) = h;
        }
        x = lc.h;  // input for the next layer
    }

    cache.logits = x * params.head_w;
    cache.logits.rowwise() += params.head_b.row(0);

    cache.seq_logprob.assign(B, 0.0);
    cache.step_logprob.assign(B, {});
    for (int b = 0; b < B; ++b) cache.step_logprob[b].resize(batch.ids[b].size());
    for (int t = 0; t < T; ++t)
        for (int b = 0; b < B; ++b) {
            if (t >= static_cast<int>(batch.ids[b].size())) continue;
            const auto row = cache.logits.row(t * B + b);
            const double mx = row.maxCoeff();
            const double lse = mx + std::log((row.array() - mx).exp().sum());
            const double lp = row(batch.ids[b][t]) - lse;
            cache.step_logprob[b][t] = lp;
            cache.seq_logprob[b] += lp;
        }

    if (!keep_activations) {
        cache.layers.clear();
        cache.logits.resize(0, 0);
    }
    return cache;
}

std::vector<double> log_likelihoods(const PolicyParams& params, const Batch& batch) {
    return forward_teacher(params, batch, false).seq_logprob;
}

double log_likelihood(const PolicyParams& params, const std::vector<int>& ids) {
    return log_likelihoods(params, Batch::from_sequences({ids})).front();
}

double perplexity(const PolicyParams& params, const std::vector<int>& ids) {
    const double ll = log_likelihood(params, ids);
    return std::exp(-ll / static_cast<double>(ids.size()));
}

void backward_from_dlogits(const PolicyParams& params, const Batch& batch,
                           const ForwardCache& cache, const Eigen::MatrixXd& dlogits,
                           PolicyParams& grads) {
    const auto& cfg = params.config;
    const int B = cache.batch;
    const int T = cache.steps;
    const int H = cfg.hidden;
    const int rows = B * T;

    // Head.
    const auto& h_top = cache.layers.back().h;
    grads.head_w.noalias() += h_top.transpose() * dlogits;
    grads.head_b.row(0) += dlogits.colwise().sum();
    Eigen::MatrixXd dh_ext = dlogits * params.head_w.transpose();  // [B*T, H]

    for (int l = cfg.layers - 1; l >= 0; --l) {
        const auto& layer = params.layers[l];
        const auto& lc = cache.layers[l];
        auto& glayer = grads.layers[l];

        Eigen::MatrixXd dgx_all = Eigen::MatrixXd::Zero(rows, 3 * H);
        Eigen::MatrixXd dgh_all = Eigen::MatrixXd::Zero(rows, 3 * H);
        Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(B, H);

        for (int t = T - 1; t >= 0; --t) {
            const int r0 = t * B;
            dh += dh_ext.middleRows(r0, B);

            const auto z = lc.z.middleRows(r0, B).array();
            const auto r = lc.r.middleRows(r0, B).array();
            const auto n = lc.n.middleRows(r0, B).array();
            const auto ghn = lc.gh_n.middleRows(r0, B).array();
            const auto h_prev = lc.h_prev.middleRows(r0, B).array();
            const auto m = cache.mask.middleRows(r0, B).array().replicate(1, H);

            const Eigen::ArrayXXd dh_m = dh.array() * m;
            const Eigen::ArrayXXd dz = dh_m * (h_prev - n) * z * (1.0 - z);
            const Eigen::ArrayXXd dn_pre = dh_m * (1.0 - z) * (1.0 - n * n);
            const Eigen::ArrayXXd dr = dn_pre * ghn * r * (1.0 - r);

            auto dgx = dgx_all.middleRows(r0, B);
            auto dgh = dgh_all.middleRows(r0, B);
            dgx.leftCols(H) = dz;
            dgx.middleCols(H, H) = dr;
            dgx.rightCols(H) = dn_pre;
            dgh.leftCols(H) = dz;
            dgh.middleCols(H, H) = dr;
            dgh.rightCols(H) = dn_pre * r;

            // Through-time gradient: direct z-gated carry plus the recurrent
            // matmul; masked rows pass dh through unchanged.
            Eigen::MatrixXd dh_prev = dgh * layer.w_h.transpose();
            dh_prev.array() += dh_m * z;
            dh = (dh_prev.array() * m + dh.array() * (1.0 - m)).matrix();
        }

        glayer.w_h.noalias() += lc.h_prev.transpose() * dgh_all;
        glayer.b_h.row(0) += dgh_all.colwise().sum();
        glayer.w_x.noalias() += lc.input.transpose() * dgx_all;
        glayer.b_x.row(0) += dgx_all.colwise().sum();

        if (l > 0) {
            dh_ext = dgx_all * layer.w_x.transpose();
        } else {
            const Eigen::MatrixXd dx = dgx_all * layer.w_x.transpose();
            for (int t = 0; t < T; ++t)
                for (int b = 0; b < B; ++b) {
                    int token = Vocab::kEos;
                    if (t == 0)
                        token = Vocab::kBos;
                    else if (t - 1 < static_cast<int>(batch.ids[b].size()))
                        token = batch.ids[b][t - 1];
                    grads.embedding.row(token) += dx.row(t * B + b);
                }
        }
    }
}

void backward_weighted_ll(const PolicyParams& params, const Batch& batch,
                          const ForwardCache& cache, const std::vector<double>& coeff,
                          PolicyParams& grads) {
    const int B = cache.batch;
    const int T = cache.steps;
    Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(B * T, params.config.vocab);
    for (int t = 0; t < T; ++t)
        for (int b = 0; b < B; ++b) {
            if (t >= static_cast<int>(batch.ids[b].size())) continue;
            if (coeff[b] == 0.0) continue;
            const int row = t * B + b;
            const auto logits_row = cache.logits.row(row);
            const double mx = logits_row.maxCoeff();
            Eigen::ArrayXd p = (logits_row.array() - mx).exp();
            p /= p.sum();
            // d(c * log p[target]) / dlogits = c * (onehot - p)
            dlogits.row(row) = (-coeff[b] * p).matrix();
            dlogits(row, batch.ids[b][t]) += coeff[b];
        }
    backward_from_dlogits(params, batch, cache, dlogits, grads);
}

std::vector<SampledSeq> sample_batch(const PolicyParams& params, int batch, int horizon,
                                     Rng& rng, double temperature) {
    const auto& cfg = params.config;
    const int H = cfg.hidden;
    std::vector<SampledSeq> out(batch);
    if (batch == 0) return out;

    std::vector<Eigen::MatrixXd> hidden(cfg.layers, Eigen::MatrixXd::Zero(batch, H));
    std::vector<int> current(batch, Vocab::kBos);
    std::vector<bool> done(batch, false);
    int n_done = 0;

    Eigen::MatrixXd x(batch, cfg.embedding);
    for (int t = 0; t < horizon && n_done < batch; ++t) {
        for (int b = 0; b < batch; ++b) x.row(b) = params.embedding.row(current[b]);
        Eigen::MatrixXd input = x;
        for (int l = 0; l < cfg.layers; ++l) {
            const auto& layer = params.layers[l];
            Eigen::MatrixXd gx = input * layer.w_x;
            gx.rowwise() += layer.b_x.row(0);
            Eigen::MatrixXd gh = hidden[l] * layer.w_h;
            gh.rowwise() += layer.b_h.row(0);
            const Eigen::ArrayXXd z = sigmoid(gx.leftCols(H).array() + gh.leftCols(H).array());
            const Eigen::ArrayXXd r = sigmoid(gx.middleCols(H, H).array() + gh.middleCols(H, H).array());
            const Eigen::ArrayXXd n = (gx.rightCols(H).array() + r * gh.rightCols(H).array()).tanh();
            hidden[l] = ((1.0 - z) * n + z * hidden[l].array()).matrix();
            input = hidden[l];
        }
        Eigen::MatrixXd logits = input * params.head_w;
        logits.rowwise() += params.head_b.row(0);

        for (int b = 0; b < batch; ++b) {
            if (done[b]) continue;
            const auto row = logits.row(b);
            const double mx = row.maxCoeff();
            Eigen::ArrayXd p = (row.array() - mx).exp();
            const double norm = p.sum();

            int token;
            if (temperature == 0.0) {
                row.maxCoeff(&token);
            } else if (temperature == 1.0) {
                const double u = rng.uniform() * norm;
                double acc = 0.0;
                token = cfg.vocab - 1;
                for (int v = 0; v < cfg.vocab; ++v) {
                    acc += p(v);
                    if (u < acc) {
                        token = v;
                        break;
                    }
                }
            } else {
                Eigen::ArrayXd pt = ((row.array() - mx) / temperature).exp();
                const double u = rng.uniform() * pt.sum();
                double acc = 0.0;
                token = cfg.vocab - 1;
                for (int v = 0; v < cfg.vocab; ++v) {
                    acc += pt(v);
                    if (u < acc) {
                        token = v;
                        break;
                    }
                }
            }

            const double lp = row(token) - (mx + std::log(norm));
            out[b].ids.push_back(token);
            out[b].step_logprobs.push_back(lp);
            out[b].sum_logprob += lp;
            current[b] = token;
            if (token == Vocab::kEos) {
                done[b] = true;
                out[b].terminated = true;
                ++n_done;
            }
        }
    }
    return out;
}

Eigen::MatrixXd next_token_distributions(const PolicyParams& params, const Batch& batch) {
    const auto cache = forward_teacher(params, batch, true);
    const int B = cache.batch;
    Eigen::MatrixXd dists(B, params.config.vocab);
    for (int b = 0; b < B; ++b) {
        const int last = static_cast<int>(batch.ids[b].size()) - 1;
        const auto row = cache.logits.row(last * B + b);
        const double mx = row.maxCoeff();
        Eigen::ArrayXd p = (row.array() - mx).exp();
        dists.row(b) = (p / p.sum()).matrix();
    }
    return dists;
}

void perturb_with_noise(PolicyParams& params, double lambda, NoiseScope scope, Rng& rng) {
    if (lambda == 0.0) return;
    auto refs = scope == NoiseScope::FinalLayer ? params.tensors_head()
                                                : params.tensors_gru_and_head();
    for (auto& ref : refs) {
        Eigen::MatrixXd& m = *ref.tensor;
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) += lambda * rng.gaussian();
    }
}

}  // namespace molexp::policy
