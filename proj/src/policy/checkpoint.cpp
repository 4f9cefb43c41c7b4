#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "molexp/policy/checkpoint.hpp"

namespace molexp::policy {

namespace {

constexpr char kMagic[8] = {'M', 'X', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto n = read_u64(in);
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    write_u64(out, static_cast<std::uint64_t>(m.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_matrix(std::istream& in) {
    const auto rows = read_u64(in);
    const auto cols = read_u64(in);
    Eigen::MatrixXd m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    return m;
}

void write_params(std::ostream& out, const PolicyParams& params) {
    write_u64(out, static_cast<std::uint64_t>(params.config.vocab));
    write_u64(out, static_cast<std::uint64_t>(params.config.embedding));
    write_u64(out, static_cast<std::uint64_t>(params.config.hidden));
    write_u64(out, static_cast<std::uint64_t>(params.config.layers));
    auto refs = const_cast<PolicyParams&>(params).tensors();
    for (const auto& r : refs) write_matrix(out, *r.tensor);
}

PolicyParams read_params(std::istream& in) {
    PolicyParams p;
    p.config.vocab = static_cast<int>(read_u64(in));
    p.config.embedding = static_cast<int>(read_u64(in));
    p.config.hidden = static_cast<int>(read_u64(in));
    p.config.layers = static_cast<int>(read_u64(in));
    p.layers.resize(p.config.layers);
    for (auto& r : p.tensors()) *r.tensor = read_matrix(in);
    return p;
}

}  // namespace

void save_checkpoint(const std::string& path, const Vocab& vocab, const PolicyParams& params,
                     const Adam* optimizer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u64(out, static_cast<std::uint64_t>(vocab.size()));
    for (const auto& t : vocab.tokens()) write_string(out, t);
    write_params(out, params);
    write_u64(out, optimizer != nullptr ? 1 : 0);
    if (optimizer != nullptr) {
        write_u64(out, static_cast<std::uint64_t>(optimizer->steps_taken()));
        const auto& o = optimizer->options();
        out.write(reinterpret_cast<const char*>(&o.lr), sizeof(double));
        out.write(reinterpret_cast<const char*>(&o.beta1), sizeof(double));
        out.write(reinterpret_cast<const char*>(&o.beta2), sizeof(double));
        out.write(reinterpret_cast<const char*>(&o.eps), sizeof(double));
        write_u64(out, static_cast<std::uint64_t>(o.scheduler_steps));
        out.write(reinterpret_cast<const char*>(&o.gamma), sizeof(double));
        write_params(out, const_cast<Adam*>(optimizer)->moment1());
        write_params(out, const_cast<Adam*>(optimizer)->moment2());
    }
    if (!out) throw std::runtime_error("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("bad checkpoint magic in: " + path);
    const auto vocab_size = read_u64(in);
    std::vector<std::string> tokens;
    tokens.reserve(vocab_size);
    for (std::uint64_t i = 0; i < vocab_size; ++i) tokens.push_back(read_string(in));
    Checkpoint ckpt{Vocab(std::move(tokens)), read_params(in), std::nullopt};
    const bool has_opt = read_u64(in) != 0;
    if (has_opt) {
        const long steps = static_cast<long>(read_u64(in));
        Adam::Options o;
        in.read(reinterpret_cast<char*>(&o.lr), sizeof(double));
        in.read(reinterpret_cast<char*>(&o.beta1), sizeof(double));
        in.read(reinterpret_cast<char*>(&o.beta2), sizeof(double));
        in.read(reinterpret_cast<char*>(&o.eps), sizeof(double));
        o.scheduler_steps = static_cast<int>(read_u64(in));
        in.read(reinterpret_cast<char*>(&o.gamma), sizeof(double));
        Adam adam(ckpt.params, o);
        adam.moment1() = read_params(in);
        adam.moment2() = read_params(in);
        adam.restore(steps);
        ckpt.optimizer = std::move(adam);
    }
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return ckpt;
}

}  // namespace molexp::policy
