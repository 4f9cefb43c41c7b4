#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace molexp::oracle {

inline constexpr double kSeDivThreshold = 0.65;
inline constexpr int kSeDivSampleSize = 1000;

// Greedy sphere exclusion diversity: walk the sample in the given order,
// keep a molecule as a new center when its Tanimoto similarity to every
// kept center is below the threshold; returns centers / parseable sample
// size. Unparseable entries are skipped and excluded from the denominator.
double sphere_exclusion_diversity(const std::vector<std::string>& sample, double threshold);

// Seeded subsample (without replacement) used to feed the metric; the
// returned order is the evaluation order.
std::vector<std::string> sediv_subsample(const std::vector<std::string>& unique_canonicals,
                                         int sample_size, std::uint64_t seed);

}  // namespace molexp::oracle
