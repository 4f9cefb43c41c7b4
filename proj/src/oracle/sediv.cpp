#include "molexp/oracle/sediv.hpp"

#include "molexp/rng.hpp"
#include "molexp/smiles/smiles.hpp"

namespace molexp::oracle {

double sphere_exclusion_diversity(const std::vector<std::string>& sample, double threshold) {
    std::vector<smiles::Fingerprint> centers;
    long parseable = 0;
    for (const auto& s : sample) {
        smiles::Fingerprint fp;
        try {
            fp = smiles::morgan_fingerprint(smiles::parse_smiles(s));
        } catch (const smiles::ParseError&) {
            continue;
        }
        ++parseable;
        bool outside_all = true;
        for (const auto& c : centers) {
            if (smiles::Fingerprint::tanimoto(fp, c) >= threshold) {
                outside_all = false;
                break;
            }
        }
        if (outside_all) centers.push_back(std::move(fp));
    }
    if (parseable == 0) return 0.0;
    return static_cast<double>(centers.size()) / static_cast<double>(parseable);
}

std::vector<std::string> sediv_subsample(const std::vector<std::string>& unique_canonicals,
                                         int sample_size, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> idx(unique_canonicals.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    const std::size_t n = std::min<std::size_t>(sample_size, idx.size());
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(unique_canonicals[idx[i]]);
    return out;
}

}  // namespace molexp::oracle
