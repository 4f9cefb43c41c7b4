#pragma once

#include <optional>
#include <string>
#include <vector>

#include "molexp/smiles/smiles.hpp"

namespace molexp::oracle {

enum class SimilarityKind { Levenshtein, Tanimoto };
enum class MetricMode { Max, Mean };

struct ExternalOracleConfig {
    std::string command;
    double timeout_s = 30.0;
};

class ExternalOracle;

// One benchmark task: a set of canonical target SMILES plus scoring config.
struct TaskSpec {
    std::string name;
    std::vector<std::string> targets;  // re-canonicalized at load time
    std::vector<smiles::Fingerprint> target_fps;
    SimilarityKind similarity_kind = SimilarityKind::Levenshtein;
    MetricMode metric_mode = MetricMode::Max;
    long budget = 10000;
    std::optional<double> threshold;
    std::optional<ExternalOracleConfig> external_oracle;

    static TaskSpec load(const std::string& path);
    static TaskSpec from_json_text(const std::string& text);

    int num_targets() const { return static_cast<int>(targets.size()); }

    // Similarities of an already-parsed molecule against every target.
    std::vector<double> similarities(const std::string& canonical,
                                     const smiles::MolGraph& graph) const;
};

struct MoleculeScore {
    bool valid = false;
    std::string canonical;
    double reward = 0.0;
    std::vector<double> sims;
};

// Parses, canonicalizes and scores one molecule. Invalid SMILES score 0 and
// still consume budget at the call site. When `external` is set the reward
// comes from the external process while per-target similarities are still
// recorded for metrics.
MoleculeScore score_molecule(const std::string& smiles_str, const TaskSpec& task,
                             ExternalOracle* external = nullptr);

// reward = max over targets of the task similarity (spec'd convenience form).
double task_reward(const std::string& smiles_str, const TaskSpec& task);

}  // namespace molexp::oracle
