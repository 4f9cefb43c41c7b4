#include <doctest.h>

#include <set>
#include <string>

#include "molexp/rng.hpp"
#include "molexp/smiles/smiles.hpp"

using namespace molexp;
using namespace molexp::smiles;

TEST_CASE("parse basic chains") {
    MolGraph g = parse_smiles("CCO");
    CHECK(g.atoms.size() == 3);
    CHECK(g.bonds.size() == 2);
    CHECK(g.bonds[0].order == BondOrder::Single);
    CHECK(g.atoms[0].h_count == 3);
    CHECK(g.atoms[1].h_count == 2);
    CHECK(g.atoms[2].h_count == 1);
}

TEST_CASE("parse benzene") {
    MolGraph g = parse_smiles("c1ccccc1");
    CHECK(g.atoms.size() == 6);
    CHECK(g.bonds.size() == 6);
    for (const auto& a : g.atoms) {
        CHECK(a.aromatic);
        CHECK(a.h_count == 1);
    }
    for (const auto& b : g.bonds) {
        CHECK(b.order == BondOrder::Aromatic);
        CHECK(b.in_ring);
    }
}

TEST_CASE("parse paracetamol") {
    MolGraph g = parse_smiles("CC(=O)Nc1ccc(O)cc1");
    CHECK(g.atoms.size() == 11);
    int aromatic = 0;
    for (const auto& a : g.atoms) aromatic += a.aromatic ? 1 : 0;
    CHECK(aromatic == 6);
}

TEST_CASE("parse heteroaromatics and brackets") {
    CHECK_NOTHROW(parse_smiles("c1ccncc1"));      // pyridine
    CHECK_NOTHROW(parse_smiles("c1cc[nH]c1"));    // pyrrole
    CHECK_NOTHROW(parse_smiles("c1ccoc1"));       // furan
    CHECK_NOTHROW(parse_smiles("c1ccsc1"));       // thiophene
    CHECK_NOTHROW(parse_smiles("CS(=O)(=O)C"));   // sulfone, valence 6
    CHECK_NOTHROW(parse_smiles("C[N+](C)(C)C"));  // quaternary ammonium
    CHECK_NOTHROW(parse_smiles("[O-]C(=O)C"));    // carboxylate

    MolGraph pyrrole = parse_smiles("c1cc[nH]c1");
    int n_h = -1;
    for (const auto& a : pyrrole.atoms)
        if (a.element == Element::N) n_h = a.h_count;
    CHECK(n_h == 1);

    MolGraph thiophene = parse_smiles("c1ccsc1");
    for (const auto& a : thiophene.atoms)
        if (a.element == Element::S) CHECK(a.h_count == 0);
}

TEST_CASE("parse errors") {
    auto kind_of = [](const std::string& s) {
        try {
            parse_smiles(s);
        } catch (const ParseError& e) {
            return e.kind();
        }
        return ParseErrorKind::EmptyInput;  // sentinel: parse unexpectedly succeeded
    };
    CHECK(kind_of("C(C") == ParseErrorKind::UnbalancedParenthesis);
    CHECK(kind_of("CC)") == ParseErrorKind::UnbalancedParenthesis);
    CHECK(kind_of("C1CC") == ParseErrorKind::UnclosedRingBond);
    CHECK(kind_of("CXC") == ParseErrorKind::UnknownAtomSymbol);
    CHECK(kind_of("C/C=C/C") == ParseErrorKind::UnknownAtomSymbol);
    CHECK(kind_of("C[C@H](N)O") == ParseErrorKind::UnknownAtomSymbol);
    CHECK(kind_of("CC.CC") == ParseErrorKind::UnknownAtomSymbol);
    CHECK(kind_of("C(C)(C)(C)(C)C") == ParseErrorKind::ValenceViolation);
    CHECK(kind_of("cc") == ParseErrorKind::ValenceViolation);
    CHECK(kind_of("N(=O)=O") == ParseErrorKind::ValenceViolation);
    CHECK_THROWS_AS(parse_smiles(""), ParseError);
}

TEST_CASE("canonical reordering invariance") {
    CHECK(canonicalize("OCC") == canonicalize("CCO"));
    CHECK(canonicalize("C(O)C") == canonicalize("CCO"));
    CHECK(canonicalize("c1ccccc1") == canonicalize("c1ccccc1"));
    CHECK(canonicalize("CC(=O)Nc1ccc(O)cc1") == canonicalize("Oc1ccc(NC(C)=O)cc1"));
}

TEST_CASE("canonical idempotence") {
    for (const char* s : {"CCO", "c1ccccc1", "CC(=O)Nc1ccc(O)cc1", "c1cc[nH]c1",
                          "CC(C)CC1CCC(C)CC1", "C[N+](C)(C)CC([O-])=O", "N#Cc1ccccc1",
                          "c1ccc2ccccc2c1", "CC12CCC(C1)C2"}) {
        const std::string canon = canonicalize(s);
        CHECK(canonicalize(canon) == canon);
    }
}

TEST_CASE("randomized smiles preserve canonical form") {
    Rng rng(7);
    for (const char* s : {"CCO", "c1ccccc1", "CC(=O)Nc1ccc(O)cc1", "c1ccc2ccccc2c1",
                          "CC(C)(C)c1ccc(O)cc1", "OCC1OC(O)C(O)C(O)C1O"}) {
        MolGraph g = parse_smiles(s);
        const std::string canon = canonical_smiles(g);
        for (int i = 0; i < 50; ++i) {
            const std::string r = randomized_smiles(g, rng);
            CHECK(canonicalize(r) == canon);
        }
    }
}

TEST_CASE("randomized smiles explores distinct rewrites") {
    MolGraph g = parse_smiles("CCC(C)O");  // butan-2-ol
    Rng rng(11);
    std::set<std::string> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(randomized_smiles(g, rng));
    CHECK(seen.size() >= 2);

    MolGraph single = parse_smiles("C");
    for (int i = 0; i < 5; ++i) CHECK(randomized_smiles(single, rng) == "C");
}

TEST_CASE("fingerprint order invariance and basics") {
    CHECK(morgan_fingerprint(parse_smiles("CCO")) == morgan_fingerprint(parse_smiles("OCC")));
    CHECK(morgan_fingerprint(parse_smiles("C")).count() >= 1);
    // Benzene is one big symmetry class; paracetamol has many environments.
    const int benzene = morgan_fingerprint(parse_smiles("c1ccccc1")).count();
    const int paracetamol = morgan_fingerprint(parse_smiles("CC(=O)Nc1ccc(O)cc1")).count();
    CHECK(benzene < paracetamol);
}

TEST_CASE("fingerprint invariant under randomization") {
    Rng rng(13);
    for (const char* s : {"CC(=O)Nc1ccc(O)cc1", "CCC(C)O", "c1ccc2ccccc2c1"}) {
        MolGraph g = parse_smiles(s);
        auto fp = morgan_fingerprint(g);
        for (int i = 0; i < 20; ++i)
            CHECK(morgan_fingerprint(parse_smiles(randomized_smiles(g, rng))) == fp);
    }
}
