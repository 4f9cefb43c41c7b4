#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "molexp/oracle/task.hpp"

namespace molexp::oracle {

struct RunRecord {
    long step = 0;  // 1-based molecule index within the run
    int agent_id = 0;
    std::string smiles;
    std::string canonical;  // empty when invalid
    bool valid = false;
    double reward = 0.0;
    std::vector<double> sims;
};

// Accumulates every scored molecule of a run plus the running per-target
// aggregates. Single-owner: callers serialize appends per board.
class ScoreBoard {
public:
    explicit ScoreBoard(int num_targets)
        : max_sims_(num_targets, 0.0), sum_sims_(num_targets, 0.0) {}

    void append(RunRecord record);

    bool seen(const std::string& canonical) const { return unique_set_.count(canonical) > 0; }

    const std::vector<RunRecord>& records() const { return records_; }
    const std::vector<double>& per_target_max() const { return max_sims_; }
    std::vector<double> per_target_mean() const;
    long scored() const { return scored_; }
    long valid_count() const { return valid_; }
    // Unique canonical SMILES in first-seen order.
    const std::vector<std::string>& unique_canonicals() const { return unique_list_; }

    double benchmark_score(MetricMode mode) const;

private:
    friend int diversity_filter(const std::string&, ScoreBoard&);
    std::vector<RunRecord> records_;
    std::vector<double> max_sims_;
    std::vector<double> sum_sims_;
    long scored_ = 0;
    long valid_ = 0;
    std::unordered_set<std::string> unique_set_;
    std::vector<std::string> unique_list_;
};

// Product over targets of the per-target aggregate (max by default).
double benchmark_score(const ScoreBoard& board, const TaskSpec& task);

// 0 for an already-seen canonical SMILES, 1 otherwise; marks it seen.
int diversity_filter(const std::string& canonical, ScoreBoard& board);

}  // namespace molexp::oracle
