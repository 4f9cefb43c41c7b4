// Line-oriented scoring stub used by the external-oracle tests: reads one
// SMILES per line and answers one decimal per line.
//
// Usage:
//   oracle_stub const <value>          always answer <value>
//   oracle_stub leven <target>         Levenshtein similarity to <target>
//   oracle_stub silent                 never answer (timeout path)
//   oracle_stub garbage                answer non-numeric lines

#include <cstdio>
#include <iostream>
#include <string>

#include "molexp/oracle/similarity.hpp"

int main(int argc, char** argv) {
    if (argc < 2) return 2;
    const std::string mode = argv[1];
    std::string line;
    while (std::getline(std::cin, line)) {
        if (mode == "const") {
            std::printf("%s\n", argv[2]);
        } else if (mode == "leven") {
            const double value = molexp::oracle::levenshtein_similarity(line, argv[2]);
            std::printf("%.17g\n", value);
        } else if (mode == "silent") {
            continue;
        } else if (mode == "garbage") {
            std::printf("not-a-number\n");
        } else {
            return 2;
        }
        std::fflush(stdout);
    }
    return 0;
}
