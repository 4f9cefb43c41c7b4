#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "molexp/rng.hpp"
#include "molexp/smiles/graph.hpp"

namespace molexp::smiles {

// Parses a SMILES string over the supported element subset. Non-isomeric
// only: stereo markers (/ \ @), isotopes and dot-separated fragments are
// rejected. Implicit hydrogens are resolved against standard valences
// (C:4, N:3, O:2, S:2/4/6, halogens:1).
MolGraph parse_smiles(std::string_view s);

// Deterministic canonical form: Morgan-style iterative rank refinement on
// (element, degree, charge, h-count, aromatic) with remaining ties broken by
// the lexicographically smallest rewrite. Graphs equal up to atom reordering
// map to byte-identical strings.
std::string canonical_smiles(const MolGraph& g);

// Restricted randomization: depth-first rewrite from a random start atom
// with random neighbor order. Output re-parses to the same canonical form.
std::string randomized_smiles(const MolGraph& g, Rng& rng);

inline std::string canonicalize(std::string_view s) { return canonical_smiles(parse_smiles(s)); }

// Circular (ECFP-style) fingerprint over iterated neighborhood hashes.
class Fingerprint {
public:
    Fingerprint() = default;
    explicit Fingerprint(int width) : width_(width), words_((width + 63) / 64, 0) {}

    void set(std::uint64_t id) { words_[(id % width_) / 64] |= (1ULL << ((id % width_) % 64)); }
    bool test(int bit) const { return (words_[bit / 64] >> (bit % 64)) & 1ULL; }
    int width() const { return width_; }
    int count() const;

    bool operator==(const Fingerprint& other) const = default;

    static double tanimoto(const Fingerprint& a, const Fingerprint& b);

private:
    int width_ = 0;
    std::vector<std::uint64_t> words_;
};

inline constexpr int kDefaultFpRadius = 2;
inline constexpr int kDefaultFpWidth = 2048;

Fingerprint morgan_fingerprint(const MolGraph& g, int radius = kDefaultFpRadius,
                               int width = kDefaultFpWidth);

}  // namespace molexp::smiles
