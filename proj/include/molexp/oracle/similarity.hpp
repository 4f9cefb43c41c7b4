#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace molexp::oracle {

class OracleError : public std::runtime_error {
public:
    enum class Kind { EmptyReference, SpawnFailure, Timeout, MalformedOutput };
    OracleError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Unit-cost edit distance (insert/delete/substitute).
int levenshtein_distance(std::string_view a, std::string_view b);

// clip((|target| - dist(m, target)) / |target|, 0, 1). Both operands are
// expected to be canonical SMILES from the same canonicalizer.
double levenshtein_similarity(std::string_view m, std::string_view target);

// |A∩B| / |A∪B| over fingerprint bit sets; parse errors propagate.
double tanimoto_similarity(const std::string& a, const std::string& b);

}  // namespace molexp::oracle
