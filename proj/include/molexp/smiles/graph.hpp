#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace molexp::smiles {

// Element subset handled by the whole pipeline. Explicit [H] atoms are folded
// into the neighbor's hydrogen count at parse time, so graphs only carry
// heavy atoms.
enum class Element : std::uint8_t { C, N, O, S, F, Cl, Br, H };

const char* element_symbol(Element e);

struct Atom {
    Element element = Element::C;
    bool aromatic = false;
    int formal_charge = 0;
    int h_count = 0;  // total attached hydrogens, implicit ones resolved
};

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Bond {
    int a = -1;
    int b = -1;
    BondOrder order = BondOrder::Single;
    bool in_ring = false;
};

struct MolGraph {
    std::vector<Atom> atoms;
    std::vector<Bond> bonds;
    // Incident bond indices per atom, in parse order.
    std::vector<std::vector<int>> adjacency;

    int other_end(int bond_index, int atom) const {
        const Bond& b = bonds[bond_index];
        return b.a == atom ? b.b : b.a;
    }
    std::size_t num_atoms() const { return atoms.size(); }
};

enum class ParseErrorKind {
    EmptyInput,
    UnbalancedParenthesis,
    UnclosedRingBond,
    UnknownAtomSymbol,
    ValenceViolation,
    BadRingBond,
    DanglingBond,
    BadBracketAtom,
    SymmetryLimit,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    ParseErrorKind kind() const { return kind_; }

private:
    ParseErrorKind kind_;
};

}  // namespace molexp::smiles
