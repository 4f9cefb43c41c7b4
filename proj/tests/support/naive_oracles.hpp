#pragma once

// Independent brute-force reference implementations used only by tests.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "molexp/smiles/smiles.hpp"

namespace test_oracle {

// Plain recursive edit distance; exponential, fine for strings <= 12 chars.
inline int naive_levenshtein(std::string_view a, std::string_view b) {
    if (a.empty()) return static_cast<int>(b.size());
    if (b.empty()) return static_cast<int>(a.size());
    const int tail = naive_levenshtein(a.substr(1), b.substr(1));
    if (a[0] == b[0]) return tail;
    const int del = naive_levenshtein(a.substr(1), b);
    const int ins = naive_levenshtein(a, b.substr(1));
    return 1 + std::min({tail, del, ins});
}

// Set-based Tanimoto over explicit bit index sets.
inline std::set<int> bit_index_set(const molexp::smiles::Fingerprint& fp) {
    std::set<int> bits;
    for (int i = 0; i < fp.width(); ++i)
        if (fp.test(i)) bits.insert(i);
    return bits;
}

inline double naive_tanimoto(const std::set<int>& a, const std::set<int>& b) {
    std::vector<int> inter, uni;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
    if (uni.empty()) return 0.0;
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

// Distinct circular-environment count by explicit neighborhood expansion;
// environments are serialized as canonical strings rather than hashes.
inline int distinct_environment_count(const molexp::smiles::MolGraph& g, int radius) {
    using molexp::smiles::BondOrder;
    std::vector<std::string> ids(g.num_atoms());
    std::set<std::string> all;
    for (std::size_t a = 0; a < g.num_atoms(); ++a) {
        const auto& at = g.atoms[a];
        ids[a] = std::string(molexp::smiles::element_symbol(at.element)) + ":" +
                 std::to_string(g.adjacency[a].size()) + ":" + std::to_string(at.formal_charge) +
                 ":" + (at.aromatic ? "a" : "-") + ":" + std::to_string(at.h_count);
        all.insert(ids[a]);
    }
    for (int r = 1; r <= radius; ++r) {
        std::vector<std::string> next(g.num_atoms());
        for (std::size_t a = 0; a < g.num_atoms(); ++a) {
            std::vector<std::string> parts;
            for (int bi : g.adjacency[a]) {
                const auto& bond = g.bonds[bi];
                parts.push_back(std::to_string(static_cast<int>(bond.order)) + "(" +
                                ids[g.other_end(bi, static_cast<int>(a))] + ")");
            }
            std::sort(parts.begin(), parts.end());
            std::string s = "r" + std::to_string(r) + "[" + ids[a] + "]";
            for (const auto& p : parts) s += p;
            next[a] = s;
            all.insert(s);
        }
        ids = std::move(next);
    }
    return static_cast<int>(all.size());
}

}  // namespace test_oracle
