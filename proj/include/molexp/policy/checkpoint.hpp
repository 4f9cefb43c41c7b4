#pragma once

#include <optional>
#include <string>

#include "molexp/policy/adam.hpp"
#include "molexp/policy/model.hpp"
#include "molexp/policy/vocab.hpp"

namespace molexp::policy {

struct Checkpoint {
    Vocab vocab;
    PolicyParams params;
    std::optional<Adam> optimizer;
};

// Versioned little-endian binary dump: magic, vocab table, model dims,
// raw tensor data, optional optimizer state. Round-trips exactly.
void save_checkpoint(const std::string& path, const Vocab& vocab, const PolicyParams& params,
                     const Adam* optimizer = nullptr);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace molexp::policy
