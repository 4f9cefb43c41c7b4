#pragma once

#include <vector>

#include "molexp/smiles/graph.hpp"

namespace molexp::smiles::detail {

// Allowed valences for the neutral element.
inline const std::vector<int>& base_valences(Element e) {
    static const std::vector<int> c{4}, n{3}, o{2}, s{2, 4, 6}, hal{1}, h{1};
    switch (e) {
        case Element::C: return c;
        case Element::N: return n;
        case Element::O: return o;
        case Element::S: return s;
        case Element::F:
        case Element::Cl:
        case Element::Br: return hal;
        case Element::H: return h;
    }
    return c;
}

// Twice the bond order so aromatic (1.5) stays integral.
inline int twice_order(BondOrder o) {
    switch (o) {
        case BondOrder::Single: return 2;
        case BondOrder::Double: return 4;
        case BondOrder::Triple: return 6;
        case BondOrder::Aromatic: return 3;
    }
    return 2;
}

inline int order_sum(const MolGraph& g, int atom) {
    int twice = 0;
    for (int bi : g.adjacency[atom]) twice += twice_order(g.bonds[bi].order);
    return twice / 2;
}

}  // namespace molexp::smiles::detail
