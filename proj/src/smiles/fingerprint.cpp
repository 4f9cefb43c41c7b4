#include <algorithm>
#include <bit>
#include <cstring>

#include "molexp/smiles/smiles.hpp"
#include "detail.hpp"

namespace molexp::smiles {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a_append(std::uint64_t hash, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        hash ^= (value >> (8 * i)) & 0xffULL;
        hash *= kFnvPrime;
    }
    return hash;
}

}  // namespace

int Fingerprint::count() const {
    int total = 0;
    for (std::uint64_t w : words_) total += std::popcount(w);
    return total;
}

double Fingerprint::tanimoto(const Fingerprint& a, const Fingerprint& b) {
    int inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        inter += std::popcount(a.words_[i] & b.words_[i]);
        uni += std::popcount(a.words_[i] | b.words_[i]);
    }
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

Fingerprint morgan_fingerprint(const MolGraph& g, int radius, int width) {
    Fingerprint fp(width);
    const std::size_t n = g.num_atoms();

    // Radius-0 identifiers from atom invariants only.
    std::vector<std::uint64_t> ids(n);
    for (std::size_t a = 0; a < n; ++a) {
        const Atom& at = g.atoms[a];
        std::uint64_t h = kFnvOffset;
        h = fnv1a_append(h, static_cast<std::uint64_t>(at.element));
        h = fnv1a_append(h, g.adjacency[a].size());
        h = fnv1a_append(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(at.formal_charge) + 8));
        h = fnv1a_append(h, at.aromatic ? 1 : 0);
        h = fnv1a_append(h, static_cast<std::uint64_t>(at.h_count));
        ids[a] = h;
        fp.set(h);
    }

    // Iterated neighborhood hashing; neighbor contributions are sorted so
    // the identifiers depend only on the graph, not on atom input order.
    for (int r = 1; r <= radius; ++r) {
        std::vector<std::uint64_t> next(n);
        for (std::size_t a = 0; a < n; ++a) {
            std::vector<std::pair<int, std::uint64_t>> nbrs;
            nbrs.reserve(g.adjacency[a].size());
            for (int bi : g.adjacency[a])
                nbrs.emplace_back(detail::twice_order(g.bonds[bi].order),
                                  ids[g.other_end(bi, static_cast<int>(a))]);
            std::sort(nbrs.begin(), nbrs.end());
            std::uint64_t h = kFnvOffset;
            h = fnv1a_append(h, static_cast<std::uint64_t>(r));
            h = fnv1a_append(h, ids[a]);
            for (const auto& [order, nid] : nbrs) {
                h = fnv1a_append(h, static_cast<std::uint64_t>(order));
                h = fnv1a_append(h, nid);
            }
            next[a] = h;
            fp.set(h);
        }
        ids = std::move(next);
    }
    return fp;
}

}  // namespace molexp::smiles
