#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "molexp/smiles/smiles.hpp"
#include "detail.hpp"

namespace molexp::smiles {

const char* element_symbol(Element e) {
    switch (e) {
        case Element::C: return "C";
        case Element::N: return "N";
        case Element::O: return "O";
        case Element::S: return "S";
        case Element::F: return "F";
        case Element::Cl: return "Cl";
        case Element::Br: return "Br";
        case Element::H: return "H";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(ParseErrorKind kind, const std::string& msg) { throw ParseError(kind, msg); }

std::vector<int> charged_valences(Element e, int charge) {
    std::vector<int> out;
    for (int v : detail::base_valences(e)) {
        const int shifted = v + charge;
        if (shifted >= 0) out.push_back(shifted);
    }
    return out;
}

struct RawAtom {
    Element element;
    bool aromatic = false;
    int formal_charge = 0;
    int bracket_h = -1;  // -1: implicit (bare organic-subset atom)
};

// Bond order as written; -1 means unspecified (single or aromatic, resolved
// after ring perception).
struct RawBond {
    int a;
    int b;
    int spec;  // -1 implicit, else BondOrder value
};

struct RingOpen {
    int atom;
    int spec;
};

bool is_aromatic_symbol(char c) { return c == 'c' || c == 'n' || c == 'o' || c == 's'; }

std::optional<Element> element_from(std::string_view sym) {
    if (sym == "C" || sym == "c") return Element::C;
    if (sym == "N" || sym == "n") return Element::N;
    if (sym == "O" || sym == "o") return Element::O;
    if (sym == "S" || sym == "s") return Element::S;
    if (sym == "F") return Element::F;
    if (sym == "Cl") return Element::Cl;
    if (sym == "Br") return Element::Br;
    if (sym == "H") return Element::H;
    return std::nullopt;
}

int bond_spec_from(char c) {
    switch (c) {
        case '-': return static_cast<int>(BondOrder::Single);
        case '=': return static_cast<int>(BondOrder::Double);
        case '#': return static_cast<int>(BondOrder::Triple);
        case ':': return static_cast<int>(BondOrder::Aromatic);
    }
    return 0;
}

RawAtom parse_bracket(std::string_view s, std::size_t& i) {
    // s[i] == '['
    const std::size_t start = i;
    ++i;
    RawAtom atom;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        fail(ParseErrorKind::UnknownAtomSymbol, "isotope labels not supported at position " + std::to_string(start));
    std::optional<Element> el;
    if (i + 1 < s.size()) el = element_from(s.substr(i, 2));
    if (el) {
        atom.aromatic = false;
        i += 2;
    } else if (i < s.size()) {
        el = element_from(s.substr(i, 1));
        if (!el) fail(ParseErrorKind::UnknownAtomSymbol, std::string("unknown atom symbol in bracket: '") + s[i] + "'");
        atom.aromatic = is_aromatic_symbol(s[i]);
        ++i;
    } else {
        fail(ParseErrorKind::BadBracketAtom, "unterminated bracket atom");
    }
    atom.element = *el;
    atom.bracket_h = 0;
    if (i < s.size() && s[i] == '@')
        fail(ParseErrorKind::UnknownAtomSymbol, "stereo marker '@' not supported (non-isomeric grammar)");
    if (i < s.size() && s[i] == 'H') {
        if (atom.element == Element::H) fail(ParseErrorKind::BadBracketAtom, "hydrogen count on [H] atom");
        ++i;
        int count = 1;
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            count = s[i] - '0';
            ++i;
        }
        atom.bracket_h = count;
    }
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        const char sign_char = s[i];
        const int sign = sign_char == '+' ? 1 : -1;
        ++i;
        int magnitude = 1;
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            magnitude = s[i] - '0';
            ++i;
        } else {
            while (i < s.size() && s[i] == sign_char) {
                ++magnitude;
                ++i;
            }
        }
        if (magnitude > 3) fail(ParseErrorKind::BadBracketAtom, "formal charge out of range");
        atom.formal_charge = sign * magnitude;
    }
    if (i >= s.size() || s[i] != ']') fail(ParseErrorKind::BadBracketAtom, "expected ']' to close bracket atom");
    ++i;
    return atom;
}

// Marks bonds that lie on a cycle (non-bridge edges) via iterative DFS.
void mark_ring_bonds(MolGraph& g) {
    const int n = static_cast<int>(g.atoms.size());
    std::vector<int> disc(n, -1), low(n, 0);
    struct Frame {
        int atom;
        int parent_bond;
        std::size_t next;
    };
    int timer = 0;
    for (int root = 0; root < n; ++root) {
        if (disc[root] >= 0) continue;
        std::vector<Frame> stack{{root, -1, 0}};
        disc[root] = low[root] = timer++;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next < g.adjacency[f.atom].size()) {
                const int bi = g.adjacency[f.atom][f.next++];
                if (bi == f.parent_bond) continue;
                const int v = g.other_end(bi, f.atom);
                if (disc[v] < 0) {
                    disc[v] = low[v] = timer++;
                    stack.push_back({v, bi, 0});
                } else {
                    // Back edge: always on a cycle.
                    g.bonds[bi].in_ring = true;
                    low[f.atom] = std::min(low[f.atom], disc[v]);
                }
            } else {
                const Frame done = f;
                stack.pop_back();
                if (done.parent_bond >= 0) {
                    const int parent = g.other_end(done.parent_bond, done.atom);
                    low[parent] = std::min(low[parent], low[done.atom]);
                    // Tree edge is a bridge iff the subtree never reaches
                    // back above its parent.
                    if (low[done.atom] <= disc[parent]) g.bonds[done.parent_bond].in_ring = true;
                }
            }
        }
    }
}

}  // namespace

MolGraph parse_smiles(std::string_view s) {
    if (s.empty()) fail(ParseErrorKind::EmptyInput, "empty SMILES string");

    std::vector<RawAtom> raw_atoms;
    std::vector<RawBond> raw_bonds;
    std::vector<int> branch_stack;
    std::map<int, RingOpen> open_rings;
    int prev_atom = -1;
    int pending = 0;  // 0: none, -1: implicit next, else bond spec

    auto add_bond = [&](int a, int b, int spec) {
        if (a == b) fail(ParseErrorKind::BadRingBond, "self bond");
        for (const auto& rb : raw_bonds)
            if ((rb.a == a && rb.b == b) || (rb.a == b && rb.b == a))
                fail(ParseErrorKind::BadRingBond, "duplicate bond between atoms");
        raw_bonds.push_back({a, b, spec});
    };

    auto close_ring = [&](int number) {
        auto it = open_rings.find(number);
        if (it == open_rings.end()) {
            if (prev_atom < 0) fail(ParseErrorKind::BadRingBond, "ring bond before any atom");
            open_rings[number] = RingOpen{prev_atom, pending};
        } else {
            int spec = it->second.spec;
            if (spec != 0 && pending != 0 && spec != pending)
                fail(ParseErrorKind::BadRingBond, "ring bond order mismatch");
            if (spec == 0) spec = pending;
            add_bond(it->second.atom, prev_atom, spec == 0 ? -1 : spec);
            open_rings.erase(it);
        }
        pending = 0;
    };

    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '/' || c == '\\' || c == '@')
            fail(ParseErrorKind::UnknownAtomSymbol, "stereo markers not supported (non-isomeric grammar)");
        if (c == '.')
            fail(ParseErrorKind::UnknownAtomSymbol, "multi-fragment '.' not supported");
        if (const int spec = bond_spec_from(c); spec != 0) {
            if (pending != 0) fail(ParseErrorKind::DanglingBond, "consecutive bond symbols");
            if (prev_atom < 0) fail(ParseErrorKind::DanglingBond, "bond symbol before any atom");
            pending = spec;
            ++i;
            continue;
        }
        if (c == '(') {
            if (prev_atom < 0) fail(ParseErrorKind::UnbalancedParenthesis, "branch before any atom");
            if (pending != 0) fail(ParseErrorKind::DanglingBond, "bond symbol before '('");
            branch_stack.push_back(prev_atom);
            ++i;
            continue;
        }
        if (c == ')') {
            if (branch_stack.empty()) fail(ParseErrorKind::UnbalancedParenthesis, "unmatched ')'");
            if (pending != 0) fail(ParseErrorKind::DanglingBond, "bond symbol before ')'");
            prev_atom = branch_stack.back();
            branch_stack.pop_back();
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            if (prev_atom < 0) fail(ParseErrorKind::BadRingBond, "ring closure before any atom");
            close_ring(c - '0');
            ++i;
            continue;
        }
        if (c == '%') {
            if (i + 2 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
                !std::isdigit(static_cast<unsigned char>(s[i + 2])))
                fail(ParseErrorKind::BadRingBond, "'%' ring closure needs two digits");
            if (prev_atom < 0) fail(ParseErrorKind::BadRingBond, "ring closure before any atom");
            close_ring((s[i + 1] - '0') * 10 + (s[i + 2] - '0'));
            i += 3;
            continue;
        }

        RawAtom atom;
        if (c == '[') {
            atom = parse_bracket(s, i);
        } else {
            std::optional<Element> el;
            bool aromatic = false;
            if (i + 1 < s.size() && (s.substr(i, 2) == "Cl" || s.substr(i, 2) == "Br")) {
                el = element_from(s.substr(i, 2));
                i += 2;
            } else if (element_from(s.substr(i, 1)) && s[i] != 'H') {
                el = element_from(s.substr(i, 1));
                aromatic = is_aromatic_symbol(c);
                ++i;
            } else {
                fail(ParseErrorKind::UnknownAtomSymbol, std::string("unknown symbol '") + c + "'");
            }
            atom.element = *el;
            atom.aromatic = aromatic;
        }
        const int idx = static_cast<int>(raw_atoms.size());
        raw_atoms.push_back(atom);
        if (prev_atom >= 0) add_bond(prev_atom, idx, pending == 0 ? -1 : pending);
        pending = 0;
        prev_atom = idx;
    }

    if (!branch_stack.empty()) fail(ParseErrorKind::UnbalancedParenthesis, "unclosed '('");
    if (!open_rings.empty()) fail(ParseErrorKind::UnclosedRingBond, "unclosed ring bond digit");
    if (pending != 0) fail(ParseErrorKind::DanglingBond, "trailing bond symbol");

    // Fold explicit [H] atoms into the neighbor's hydrogen count.
    std::vector<int> fold_h(raw_atoms.size(), 0);
    std::vector<bool> removed(raw_atoms.size(), false);
    for (std::size_t a = 0; a < raw_atoms.size(); ++a) {
        if (raw_atoms[a].element != Element::H) continue;
        if (raw_atoms[a].formal_charge != 0 || (raw_atoms[a].bracket_h > 0))
            fail(ParseErrorKind::ValenceViolation, "unsupported explicit hydrogen atom");
        int incident = 0, neighbor = -1;
        for (const auto& b : raw_bonds) {
            if (b.a == static_cast<int>(a) || b.b == static_cast<int>(a)) {
                ++incident;
                neighbor = b.a == static_cast<int>(a) ? b.b : b.a;
                if (b.spec != -1 && b.spec != static_cast<int>(BondOrder::Single))
                    fail(ParseErrorKind::ValenceViolation, "non-single bond to explicit hydrogen");
            }
        }
        if (incident != 1 || raw_atoms[neighbor].element == Element::H)
            fail(ParseErrorKind::ValenceViolation, "explicit hydrogen must bond one heavy atom");
        fold_h[neighbor] += 1;
        removed[a] = true;
    }

    MolGraph g;
    std::vector<int> remap(raw_atoms.size(), -1);
    for (std::size_t a = 0; a < raw_atoms.size(); ++a) {
        if (removed[a]) continue;
        remap[a] = static_cast<int>(g.atoms.size());
        Atom out;
        out.element = raw_atoms[a].element;
        out.aromatic = raw_atoms[a].aromatic;
        out.formal_charge = raw_atoms[a].formal_charge;
        g.atoms.push_back(out);
    }
    if (g.atoms.empty()) fail(ParseErrorKind::ValenceViolation, "no heavy atoms");

    std::vector<int> specs;
    for (const auto& rb : raw_bonds) {
        if (removed[rb.a] || removed[rb.b]) continue;
        Bond b;
        b.a = remap[rb.a];
        b.b = remap[rb.b];
        g.bonds.push_back(b);
        specs.push_back(rb.spec);
    }
    g.adjacency.assign(g.atoms.size(), {});
    for (std::size_t bi = 0; bi < g.bonds.size(); ++bi) {
        g.adjacency[g.bonds[bi].a].push_back(static_cast<int>(bi));
        g.adjacency[g.bonds[bi].b].push_back(static_cast<int>(bi));
    }

    mark_ring_bonds(g);

    // Resolve unspecified bond orders: aromatic only between two aromatic
    // atoms inside a ring, single otherwise.
    for (std::size_t bi = 0; bi < g.bonds.size(); ++bi) {
        Bond& b = g.bonds[bi];
        if (specs[bi] == -1) {
            const bool aromatic = g.atoms[b.a].aromatic && g.atoms[b.b].aromatic && b.in_ring;
            b.order = aromatic ? BondOrder::Aromatic : BondOrder::Single;
        } else {
            b.order = static_cast<BondOrder>(specs[bi]);
            if (b.order == BondOrder::Aromatic &&
                !(g.atoms[b.a].aromatic && g.atoms[b.b].aromatic && b.in_ring))
                fail(ParseErrorKind::ValenceViolation, "aromatic bond outside an aromatic ring");
        }
    }

    // Aromatic atoms must sit in an aromatic ring.
    for (std::size_t a = 0; a < g.atoms.size(); ++a) {
        if (!g.atoms[a].aromatic) continue;
        int aromatic_bonds = 0;
        for (int bi : g.adjacency[a])
            if (g.bonds[bi].order == BondOrder::Aromatic) ++aromatic_bonds;
        if (aromatic_bonds < 2)
            fail(ParseErrorKind::ValenceViolation, "aromatic atom outside an aromatic ring");
    }

    // Hydrogen counts and valence checks.
    for (std::size_t a_raw = 0; a_raw < raw_atoms.size(); ++a_raw) {
        if (removed[a_raw]) continue;
        const int a = remap[a_raw];
        Atom& atom = g.atoms[a];
        const int order_sum = detail::order_sum(g, a);
        // Sigma-bond count: aromatic bonds occupy one sigma valence; the pi
        // system accounts for the rest, so valence checks on aromatic atoms
        // use this count (lets pyrrole [nH] and furan o through).
        int sigma_sum = 0;
        for (int bi : g.adjacency[a]) {
            const BondOrder o = g.bonds[bi].order;
            sigma_sum += o == BondOrder::Aromatic ? 1 : static_cast<int>(o);
        }
        const auto allowed = charged_valences(atom.element, atom.formal_charge);
        if (allowed.empty()) fail(ParseErrorKind::ValenceViolation, "charge leaves no allowed valence");
        const int max_allowed = *std::max_element(allowed.begin(), allowed.end());

        if (raw_atoms[a_raw].bracket_h >= 0) {
            atom.h_count = raw_atoms[a_raw].bracket_h + fold_h[a_raw];
            const int occupied = atom.aromatic ? sigma_sum : order_sum;
            if (occupied + atom.h_count > max_allowed)
                fail(ParseErrorKind::ValenceViolation,
                     std::string("valence exceeded on ") + element_symbol(atom.element));
        } else if (atom.aromatic) {
            atom.h_count = std::max(0, allowed.front() - order_sum) + fold_h[a_raw];
            if (sigma_sum + atom.h_count > max_allowed)
                fail(ParseErrorKind::ValenceViolation,
                     std::string("valence exceeded on aromatic ") + element_symbol(atom.element));
        } else {
            const int need = order_sum + fold_h[a_raw];
            int chosen = -1;
            for (int v : allowed)
                if (v >= need) {
                    chosen = v;
                    break;
                }
            if (chosen < 0)
                fail(ParseErrorKind::ValenceViolation,
                     std::string("valence exceeded on ") + element_symbol(atom.element));
            atom.h_count = chosen - order_sum;
        }
    }

    return g;
}

}  // namespace molexp::smiles
