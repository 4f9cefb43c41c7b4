#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "molexp/smiles/smiles.hpp"
#include "detail.hpp"

namespace molexp::smiles {

namespace {

std::string atom_token(const MolGraph& g, int a) {
    const Atom& atom = g.atoms[a];
    const int sum = detail::order_sum(g, a);
    const auto& allowed = detail::base_valences(atom.element);

    int default_h = -1;
    if (atom.formal_charge == 0 && atom.element != Element::H) {
        if (atom.aromatic) {
            default_h = std::max(0, allowed.front() - sum);
        } else {
            for (int v : allowed)
                if (v >= sum) {
                    default_h = v - sum;
                    break;
                }
        }
    }

    std::string sym = element_symbol(atom.element);
    if (atom.aromatic)
        for (char& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    if (default_h >= 0 && default_h == atom.h_count) return sym;

    std::string out = "[" + sym;
    if (atom.h_count == 1)
        out += "H";
    else if (atom.h_count > 1)
        out += "H" + std::to_string(atom.h_count);
    if (atom.formal_charge > 0)
        out += atom.formal_charge == 1 ? "+" : "+" + std::to_string(atom.formal_charge);
    else if (atom.formal_charge < 0)
        out += atom.formal_charge == -1 ? "-" : "-" + std::to_string(-atom.formal_charge);
    out += "]";
    return out;
}

std::string bond_token(const MolGraph& g, const Bond& b) {
    switch (b.order) {
        case BondOrder::Single:
            return (g.atoms[b.a].aromatic && g.atoms[b.b].aromatic) ? "-" : "";
        case BondOrder::Double: return "=";
        case BondOrder::Triple: return "#";
        case BondOrder::Aromatic: return "";
    }
    return "";
}

// Rewrites the graph as a SMILES string following a fixed traversal plan:
// a start atom plus a per-atom incident-bond visit order.
class Writer {
public:
    Writer(const MolGraph& g, int start, const std::vector<std::vector<int>>& order)
        : g_(g), start_(start), order_(order) {}

    std::string write() {
        plan();
        std::string out;
        out.reserve(g_.num_atoms() * 2);
        emit(start_, out);
        return out;
    }

private:
    void plan() {
        children_.assign(g_.num_atoms(), {});
        closures_.assign(g_.num_atoms(), {});
        std::vector<bool> visited(g_.num_atoms(), false);
        std::vector<bool> bond_used(g_.bonds.size(), false);
        struct Frame {
            int atom;
            std::size_t next = 0;
        };
        std::vector<Frame> stack{{start_}};
        visited[start_] = true;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& ord = order_[f.atom];
            if (f.next >= ord.size()) {
                stack.pop_back();
                continue;
            }
            const int bi = ord[f.next++];
            if (bond_used[bi]) continue;
            const int v = g_.other_end(bi, f.atom);
            bond_used[bi] = true;
            if (!visited[v]) {
                visited[v] = true;
                children_[f.atom].push_back(bi);
                stack.push_back({v});
            } else {
                // Ring closure: the digit appears at both endpoints.
                closures_[f.atom].push_back(bi);
                closures_[v].push_back(bi);
            }
        }
    }

    void emit(int atom, std::string& out) {
        out += atom_token(g_, atom);
        for (int bi : closures_[atom]) {
            auto it = digit_of_.find(bi);
            int digit;
            if (it == digit_of_.end()) {
                digit = 1;
                while (digits_in_use_.count(digit)) ++digit;
                if (digit > 99) throw ParseError(ParseErrorKind::SymmetryLimit, "ring closure digits exhausted");
                digits_in_use_.insert(digit);
                digit_of_[bi] = digit;
            } else {
                digit = it->second;
                digits_in_use_.erase(digit);
            }
            out += bond_token(g_, g_.bonds[bi]);
            if (digit < 10)
                out += static_cast<char>('0' + digit);
            else {
                out += '%';
                out += static_cast<char>('0' + digit / 10);
                out += static_cast<char>('0' + digit % 10);
            }
        }
        const auto& kids = children_[atom];
        for (std::size_t i = 0; i < kids.size(); ++i) {
            const int bi = kids[i];
            const int child = g_.other_end(bi, atom);
            const bool last = i + 1 == kids.size();
            if (!last) out += '(';
            out += bond_token(g_, g_.bonds[bi]);
            emit(child, out);
            if (!last) out += ')';
        }
    }

    const MolGraph& g_;
    int start_;
    const std::vector<std::vector<int>>& order_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<int>> closures_;
    std::map<int, int> digit_of_;
    std::set<int> digits_in_use_;
};

std::string write_with_plan(const MolGraph& g, int start, const std::vector<std::vector<int>>& order) {
    return Writer(g, start, order).write();
}

int bond_order_code(BondOrder o) { return static_cast<int>(o); }

// Dense ranks (0-based) of lexicographically sorted keys.
template <typename Key>
std::vector<int> dense_ranks(const std::vector<Key>& keys) {
    std::vector<int> idx(keys.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> ranks(keys.size(), 0);
    int rank = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i > 0 && keys[idx[i - 1]] < keys[idx[i]]) ++rank;
        ranks[idx[i]] = rank;
    }
    return ranks;
}

int count_classes(const std::vector<int>& ranks) {
    return ranks.empty() ? 0 : 1 + *std::max_element(ranks.begin(), ranks.end());
}

std::vector<int> initial_ranks(const MolGraph& g) {
    using Key = std::tuple<int, int, int, int, int>;
    std::vector<Key> keys;
    keys.reserve(g.num_atoms());
    for (std::size_t a = 0; a < g.num_atoms(); ++a) {
        const Atom& at = g.atoms[a];
        keys.emplace_back(static_cast<int>(at.element), static_cast<int>(g.adjacency[a].size()),
                          at.formal_charge, at.h_count, at.aromatic ? 1 : 0);
    }
    return dense_ranks(keys);
}

// Iterative Morgan-style refinement over neighborhood rank multisets.
void refine(const MolGraph& g, std::vector<int>& ranks) {
    int classes = count_classes(ranks);
    while (classes < static_cast<int>(g.num_atoms())) {
        using Key = std::pair<int, std::vector<std::pair<int, int>>>;
        std::vector<Key> keys(g.num_atoms());
        for (std::size_t a = 0; a < g.num_atoms(); ++a) {
            std::vector<std::pair<int, int>> nbr;
            nbr.reserve(g.adjacency[a].size());
            for (int bi : g.adjacency[a])
                nbr.emplace_back(bond_order_code(g.bonds[bi].order),
                                 ranks[g.other_end(bi, static_cast<int>(a))]);
            std::sort(nbr.begin(), nbr.end());
            keys[a] = {ranks[a], std::move(nbr)};
        }
        auto next = dense_ranks(keys);
        const int next_classes = count_classes(next);
        ranks = std::move(next);
        if (next_classes == classes) break;
        classes = next_classes;
    }
}

std::vector<std::vector<int>> order_by_ranks(const MolGraph& g, const std::vector<int>& ranks) {
    std::vector<std::vector<int>> order(g.num_atoms());
    for (std::size_t a = 0; a < g.num_atoms(); ++a) {
        order[a] = g.adjacency[a];
        std::sort(order[a].begin(), order[a].end(), [&](int x, int y) {
            return ranks[g.other_end(x, static_cast<int>(a))] <
                   ranks[g.other_end(y, static_cast<int>(a))];
        });
    }
    return order;
}

std::string write_from_ranks(const MolGraph& g, const std::vector<int>& ranks) {
    const int start = static_cast<int>(
        std::min_element(ranks.begin(), ranks.end()) - ranks.begin());
    return write_with_plan(g, start, order_by_ranks(g, ranks));
}

struct TieBreaker {
    const MolGraph& g;
    long budget = 100000;

    std::string best(std::vector<int> ranks) {
        refine(g, ranks);
        if (count_classes(ranks) == static_cast<int>(g.num_atoms())) {
            if (--budget < 0)
                throw ParseError(ParseErrorKind::SymmetryLimit, "canonical tie-break budget exhausted");
            return write_from_ranks(g, ranks);
        }
        // Promote each member of the lowest tied class in turn; the minimum
        // rewrite over the branch is invariant to input atom order.
        int tied_rank = -1;
        for (int r = 0;; ++r) {
            int count = 0;
            for (int x : ranks)
                if (x == r) ++count;
            if (count >= 2) {
                tied_rank = r;
                break;
            }
        }
        std::string best_str;
        for (std::size_t a = 0; a < ranks.size(); ++a) {
            if (ranks[a] != tied_rank) continue;
            std::vector<int> doubled(ranks.size());
            for (std::size_t x = 0; x < ranks.size(); ++x) doubled[x] = ranks[x] * 2;
            doubled[a] -= 1;
            std::string candidate = best(dense_ranks(doubled));
            if (best_str.empty() || candidate < best_str) best_str = std::move(candidate);
        }
        return best_str;
    }
};

}  // namespace

std::string canonical_smiles(const MolGraph& g) {
    TieBreaker tb{g};
    return tb.best(initial_ranks(g));
}

std::string randomized_smiles(const MolGraph& g, Rng& rng) {
    const int start = static_cast<int>(rng.below(g.num_atoms()));
    std::vector<std::vector<int>> order(g.num_atoms());
    for (std::size_t a = 0; a < g.num_atoms(); ++a) {
        order[a] = g.adjacency[a];
        rng.shuffle(order[a]);
    }
    return write_with_plan(g, start, order);
}

}  // namespace molexp::smiles
