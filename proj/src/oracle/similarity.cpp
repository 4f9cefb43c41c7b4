#include <algorithm>
#include <numeric>
#include <vector>

#include "molexp/oracle/similarity.hpp"
#include "molexp/smiles/smiles.hpp"

namespace molexp::oracle {

int levenshtein_distance(std::string_view a, std::string_view b) {
    const std::size_t n = b.size();
    std::vector<int> prev(n + 1), cur(n + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        cur[0] = static_cast<int>(i) + 1;
        for (std::size_t j = 0; j < n; ++j) {
            const int sub = prev[j] + (a[i] == b[j] ? 0 : 1);
            cur[j + 1] = std::min({prev[j + 1] + 1, cur[j] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

double levenshtein_similarity(std::string_view m, std::string_view target) {
    if (target.empty())
        throw OracleError(OracleError::Kind::EmptyReference, "empty reference string");
    const double dist = levenshtein_distance(m, target);
    const double value = (static_cast<double>(target.size()) - dist) / static_cast<double>(target.size());
    return std::clamp(value, 0.0, 1.0);
}

double tanimoto_similarity(const std::string& a, const std::string& b) {
    const auto fa = smiles::morgan_fingerprint(smiles::parse_smiles(a));
    const auto fb = smiles::morgan_fingerprint(smiles::parse_smiles(b));
    return smiles::Fingerprint::tanimoto(fa, fb);
}

}  // namespace molexp::oracle
